//! Passage-style syntactic annotations and their evaluation against a gold
//! standard: chunks (constituents) and dependencies (relations) between
//! content words.

mod markup;
mod score;

pub use markup::{parse_passage, serialize_passage};
pub use score::{
    coverage, match_constituents, match_relations, score_corpus, Alignment, Analyzed,
    CategoryScores, Counts, Coverage, EvalScores, RelaxationMode, Score,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstituentType {
    /// Nominal group.
    Gn,
    /// Verbal kernel.
    Nv,
    /// Adjectival group.
    Ga,
    /// Adverbial group.
    Gr,
    /// Prepositional group.
    Gp,
    /// Prepositional group with a verbal kernel.
    Pv,
}

impl ConstituentType {
    pub const ALL: [ConstituentType; 6] = [
        ConstituentType::Gn,
        ConstituentType::Nv,
        ConstituentType::Ga,
        ConstituentType::Gr,
        ConstituentType::Gp,
        ConstituentType::Pv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstituentType::Gn => "GN",
            ConstituentType::Nv => "NV",
            ConstituentType::Ga => "GA",
            ConstituentType::Gr => "GR",
            ConstituentType::Gp => "GP",
            ConstituentType::Pv => "PV",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    SujV,
    AuxV,
    CodV,
    CplV,
    ModV,
    Comp,
    AtbSo,
    ModN,
    ModA,
    ModR,
    ModP,
    Coord,
    Appos,
    Juxt,
}

impl RelationType {
    pub const ALL: [RelationType; 14] = [
        RelationType::SujV,
        RelationType::AuxV,
        RelationType::CodV,
        RelationType::CplV,
        RelationType::ModV,
        RelationType::Comp,
        RelationType::AtbSo,
        RelationType::ModN,
        RelationType::ModA,
        RelationType::ModR,
        RelationType::ModP,
        RelationType::Coord,
        RelationType::Appos,
        RelationType::Juxt,
    ];

    pub fn as_str(self) -> &'static str {
        use RelationType::*;
        match self {
            SujV => "SUJ-V",
            AuxV => "AUX-V",
            CodV => "COD-V",
            CplV => "CPL-V",
            ModV => "MOD-V",
            Comp => "COMP",
            AtbSo => "ATB-SO",
            ModN => "MOD-N",
            ModA => "MOD-A",
            ModR => "MOD-R",
            ModP => "MOD-P",
            Coord => "COORD",
            Appos => "APPOS",
            Juxt => "JUXT",
        }
    }
}

macro_rules! token_enum_impls {
    ($ty:ty, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                <$ty>::ALL
                    .into_iter()
                    .find(|t| t.as_str() == s)
                    .ok_or_else(|| Error::UnknownToken {
                        what: $what,
                        token: s.to_string(),
                    })
            }
        }
    };
}

token_enum_impls!(ConstituentType, "constituent type");
token_enum_impls!(RelationType, "relation type");

/// A chunk over the half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Constituent {
    pub ctype: ConstituentType,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub rtype: RelationType,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceAnnotation {
    pub sentence_id: String,
    pub tokens: Vec<String>,
    pub constituents: Vec<Constituent>,
    pub relations: Vec<Relation>,
    /// `false` when the parser only produced partial analyses. Always true on
    /// the gold side.
    pub full_parse: bool,
}

impl SentenceAnnotation {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| {
            Err(Error::InvalidAnnotation(format!(
                "{}: {msg}",
                self.sentence_id
            )))
        };
        if self.sentence_id.is_empty() || self.sentence_id.contains(['\t', '\n', '\r']) {
            return bad("invalid sentence id".into());
        }
        if let Some(t) = self
            .tokens
            .iter()
            .find(|t| t.is_empty() || t.trim() != t.as_str())
        {
            return bad(format!("token `{t}` is empty or padded with whitespace"));
        }
        let n = self.tokens.len();
        for c in &self.constituents {
            if c.start >= c.end || c.end > n {
                return bad(format!(
                    "constituent {} [{}, {}) out of range for {n} tokens",
                    c.ctype, c.start, c.end
                ));
            }
        }
        for r in &self.relations {
            if r.source >= n || r.target >= n {
                return bad(format!(
                    "relation {} {}->{} out of range for {n} tokens",
                    r.rtype, r.source, r.target
                ));
            }
            if r.source == r.target {
                return bad(format!("relation {} loops on token {}", r.rtype, r.source));
            }
        }
        Ok(())
    }
}
