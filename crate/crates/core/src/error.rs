use thiserror::Error;

use crate::lexicon::SyntacticFunction;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Wraps any error raised while reading a line-oriented document.
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("unknown {what} `{token}`")]
    UnknownToken { what: &'static str, token: String },

    #[error("empty realization set for function {0}")]
    EmptyRealizations(SyntacticFunction),

    #[error("function {0} occurs twice in one frame")]
    DuplicateFunction(SyntacticFunction),

    #[error("duplicate entry id `{0}`")]
    DuplicateEntryId(String),

    #[error("invalid entry `{id}`: {reason}")]
    InvalidEntry { id: String, reason: String },

    #[error("lemma mismatch: expected `{expected}`, found `{found}`")]
    LemmaMismatch { expected: String, found: String },

    #[error("category mismatch for lemma `{lemma}`")]
    CategoryMismatch { lemma: String },

    #[error("sentence `{0}` has no observed frame")]
    EmptyFrameList(String),

    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),

    #[error("sentence mismatch: {0}")]
    SentenceMismatch(String),

    #[error("record sets disagree: {0}")]
    RecordMismatch(String),

    #[error("duplicate sentence id `{0}`")]
    DuplicateSentenceId(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate form `{0}` in form-to-lemma map")]
    DuplicateForm(String),
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Error {
        Error::AtLine {
            line,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping line annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            Error::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}
