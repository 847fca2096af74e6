//! Lexicon-only analyzability oracle.
//!
//! A sentence is described by the frames observed around its predicates. A
//! frame is accepted by an entry when its slots fit the entry's frame, no
//! obligatory slot is missing and the entry licenses the redistribution the
//! clause is in. A sentence is analyzable when every one of its frames is
//! accepted by some entry of its lemma.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lexicon::{LexicalEntry, Lexicon, Realization, Redistribution, SyntacticFunction};
use crate::text::{content_lines, is_atom};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservedFrame {
    pub lemma: String,
    slots: Vec<(SyntacticFunction, Realization)>,
    pub context: Redistribution,
}

impl ObservedFrame {
    pub fn new(
        lemma: impl Into<String>,
        slots: Vec<(SyntacticFunction, Realization)>,
        context: Redistribution,
    ) -> Result<ObservedFrame> {
        let lemma = lemma.into();
        if !is_atom(&lemma) {
            return Err(Error::Syntax(format!("invalid lemma `{lemma}`")));
        }
        for (i, (f, _)) in slots.iter().enumerate() {
            if slots[..i].iter().any(|(g, _)| g == f) {
                return Err(Error::DuplicateFunction(*f));
            }
        }
        Ok(ObservedFrame {
            lemma,
            slots,
            context,
        })
    }

    pub fn slots(&self) -> &[(SyntacticFunction, Realization)] {
        &self.slots
    }

    fn has(&self, function: SyntacticFunction) -> bool {
        self.slots.iter().any(|(f, _)| *f == function)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureReason {
    MissingLemma,
    UncodedEntry,
    MissingRedistribution,
    MissingObligatoryComplement,
    UnknownConstruction,
}

impl FailureReason {
    pub const ALL: [FailureReason; 5] = [
        FailureReason::MissingLemma,
        FailureReason::UncodedEntry,
        FailureReason::MissingRedistribution,
        FailureReason::MissingObligatoryComplement,
        FailureReason::UnknownConstruction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::MissingLemma => "MISSING-LEMMA",
            FailureReason::UncodedEntry => "UNCODED-ENTRY",
            FailureReason::MissingRedistribution => "MISSING-REDISTRIBUTION",
            FailureReason::MissingObligatoryComplement => "MISSING-OBLIGATORY-COMPLEMENT",
            FailureReason::UnknownConstruction => "UNKNOWN-CONSTRUCTION",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FailureReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FailureReason::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "failure reason",
                token: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Analyzable { witnesses: Vec<String> },
    Failed(FailureReason),
}

impl Verdict {
    pub fn is_analyzable(&self) -> bool {
        matches!(self, Verdict::Analyzable { .. })
    }

    pub fn failure_reason(&self) -> Option<FailureReason> {
        match self {
            Verdict::Failed(r) => Some(*r),
            Verdict::Analyzable { .. } => None,
        }
    }
}

/// Per-sentence outcome under one lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub forms: Vec<String>,
    pub analyzable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Clauses {
    slots_fit: bool,
    obligatory_present: bool,
    licensed: bool,
}

impl Clauses {
    fn all(self) -> bool {
        self.slots_fit && self.obligatory_present && self.licensed
    }
}

fn evaluate(e: &LexicalEntry, obs: &ObservedFrame) -> Clauses {
    let slots_fit = obs.slots.iter().all(|(f, r)| {
        e.frame
            .slot(*f)
            .is_some_and(|slot| slot.realizations.contains(r))
    });
    let subject_exempt = matches!(
        obs.context,
        Redistribution::Passive | Redistribution::Impersonal
    );
    let obligatory_present = e.frame.slots().iter().all(|slot| {
        let obligatory = !e.coded || !slot.optional;
        !obligatory
            || obs.has(slot.function)
            || (subject_exempt && slot.function == SyntacticFunction::Suj)
    });
    Clauses {
        slots_fit,
        obligatory_present,
        licensed: e.redistributions.contains(&obs.context),
    }
}

pub fn entry_accepts(e: &LexicalEntry, obs: &ObservedFrame) -> Result<bool> {
    if e.lemma != obs.lemma {
        return Err(Error::LemmaMismatch {
            expected: e.lemma.clone(),
            found: obs.lemma.clone(),
        });
    }
    Ok(evaluate(e, obs).all())
}

/// Verdict for one observed frame. Failure reasons are tried in the order
/// missing lemma, uncoded entries, missing redistribution, missing
/// obligatory complement, and finally unknown construction.
pub fn check_sentence(lex: &Lexicon, obs: &ObservedFrame) -> Verdict {
    let Some(entries) = lex.get(&obs.lemma) else {
        return Verdict::Failed(FailureReason::MissingLemma);
    };
    let clauses: Vec<Clauses> = entries.iter().map(|e| evaluate(e, obs)).collect();
    let witnesses: Vec<String> = entries
        .iter()
        .zip(&clauses)
        .filter(|(_, c)| c.all())
        .map(|(e, _)| e.entry_id.clone())
        .collect();
    if !witnesses.is_empty() {
        return Verdict::Analyzable { witnesses };
    }
    let reason = if entries.iter().all(|e| !e.coded) {
        FailureReason::UncodedEntry
    } else if clauses
        .iter()
        .any(|c| c.slots_fit && c.obligatory_present && !c.licensed)
    {
        FailureReason::MissingRedistribution
    } else if clauses
        .iter()
        .any(|c| c.slots_fit && c.licensed && !c.obligatory_present)
    {
        FailureReason::MissingObligatoryComplement
    } else {
        FailureReason::UnknownConstruction
    };
    Verdict::Failed(reason)
}

/// One annotated sentence: its id and the frames observed in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub sentence_id: String,
    pub frames: Vec<ObservedFrame>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnosis {
    pub records: Vec<SentenceRecord>,
    /// One count per failed frame.
    pub histogram: BTreeMap<FailureReason, usize>,
}

impl Diagnosis {
    /// Tab-separated `reason count` lines for the non-zero reasons.
    pub fn histogram_tsv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str("#reason\tcount\n");
        for (reason, count) in &self.histogram {
            out.push_str(&format!("{reason}\t{count}\n"));
        }
        out
    }
}

pub fn diagnose_corpus(lex: &Lexicon, corpus: &[AnnotatedSentence]) -> Result<Diagnosis> {
    let mut diagnosis = Diagnosis::default();
    for sentence in corpus {
        if sentence.frames.is_empty() {
            return Err(Error::EmptyFrameList(sentence.sentence_id.clone()));
        }
        let mut analyzable = true;
        for frame in &sentence.frames {
            if let Verdict::Failed(reason) = check_sentence(lex, frame) {
                analyzable = false;
                *diagnosis.histogram.entry(reason).or_default() += 1;
            }
        }
        diagnosis.records.push(SentenceRecord {
            sentence_id: sentence.sentence_id.clone(),
            forms: sentence.frames.iter().map(|f| f.lemma.clone()).collect(),
            analyzable,
        });
    }
    Ok(diagnosis)
}

/// Parses the corpus annotation format, one frame per line:
/// `sentence_id  lemma  redistribution  Function:Realization;...`.
/// Lines sharing a sentence id are grouped, in order of first appearance.
pub fn parse_corpus(text: &str) -> Result<Vec<AnnotatedSentence>> {
    let mut sentences: Vec<AnnotatedSentence> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let (id, frame) = parse_corpus_line(line).map_err(|e| e.at_line(lineno))?;
        match index.get(&id) {
            Some(&i) => sentences[i].frames.push(frame),
            None => {
                index.insert(id.clone(), sentences.len());
                sentences.push(AnnotatedSentence {
                    sentence_id: id,
                    frames: vec![frame],
                });
            }
        }
    }
    Ok(sentences)
}

fn parse_corpus_line(line: &str) -> Result<(String, ObservedFrame)> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(Error::Syntax(format!(
            "expected 4 tab-separated fields, found {}",
            fields.len()
        )));
    }
    if !is_atom(fields[0]) {
        return Err(Error::Syntax(format!(
            "invalid sentence id `{}`",
            fields[0]
        )));
    }
    let mut slots = Vec::new();
    if !fields[3].is_empty() {
        for pair in fields[3].split(';') {
            let (f, r) = pair
                .split_once(':')
                .ok_or_else(|| Error::Syntax(format!("observed slot `{pair}` lacks `:`")))?;
            slots.push((f.parse()?, r.parse()?));
        }
    }
    let frame = ObservedFrame::new(fields[1], slots, fields[2].parse()?)?;
    Ok((fields[0].to_string(), frame))
}

pub fn serialize_corpus(corpus: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for s in corpus {
        for f in &s.frames {
            let slots: Vec<String> = f.slots.iter().map(|(f, r)| format!("{f}:{r}")).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                s.sentence_id,
                f.lemma,
                f.context,
                slots.join(";")
            ));
        }
    }
    out
}

/// Sentence records, one per line: `sentence_id  ok|failed  form1,form2,...`.
/// This is the same layout as the mining corpus, so the output of a check
/// run can be handed to the miner directly.
pub fn serialize_records(records: &[SentenceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            r.sentence_id,
            if r.analyzable { "ok" } else { "failed" },
            r.forms.join(",")
        ));
    }
    out
}

pub fn parse_records(text: &str) -> Result<Vec<SentenceRecord>> {
    content_lines(text)
        .map(|(lineno, line)| {
            parse_status_line(line)
                .map(|(sentence_id, failed, forms)| SentenceRecord {
                    sentence_id,
                    forms,
                    analyzable: !failed,
                })
                .map_err(|e| e.at_line(lineno))
        })
        .collect()
}

/// `id  failed|ok  forms` → `(id, failed, forms)`.
pub(crate) fn parse_status_line(line: &str) -> Result<(String, bool, Vec<String>)> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(Error::Syntax(format!(
            "expected 3 tab-separated fields, found {}",
            fields.len()
        )));
    }
    if !is_atom(fields[0]) {
        return Err(Error::Syntax(format!(
            "invalid sentence id `{}`",
            fields[0]
        )));
    }
    let failed = match fields[1] {
        "failed" => true,
        "ok" => false,
        other => {
            return Err(Error::UnknownToken {
                what: "sentence status",
                token: other.to_string(),
            })
        }
    };
    let forms: Vec<String> = fields[2].split(',').map(str::to_string).collect();
    if forms.iter().any(|f| !is_atom(f)) {
        return Err(Error::Syntax(format!("invalid form list `{}`", fields[2])));
    }
    Ok((fields[0].to_string(), failed, forms))
}
