//! Valence lexicon data model.
//!
//! A [`Lexicon`] maps lemmas to their [`LexicalEntry`] senses. Each entry
//! carries a subcategorization frame made of [`FunctionSlot`]s, the set of
//! redistributions it licenses, and the provenance of the information.

mod format;
mod stats;

pub use format::{parse_lexicon, serialize_lexicon};
pub use stats::{lexicon_stats, StatsReport};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionClass {
    Base,
    Oblique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SyntacticFunction {
    Suj,
    Obj,
    /// Indirect object introduced by "à".
    Obja,
    /// Indirect object introduced by "de".
    Objde,
    Att,
    Loc,
    Dloc,
    Obl,
    Obl2,
}

impl SyntacticFunction {
    pub const ALL: [SyntacticFunction; 9] = [
        SyntacticFunction::Suj,
        SyntacticFunction::Obj,
        SyntacticFunction::Obja,
        SyntacticFunction::Objde,
        SyntacticFunction::Att,
        SyntacticFunction::Loc,
        SyntacticFunction::Dloc,
        SyntacticFunction::Obl,
        SyntacticFunction::Obl2,
    ];

    pub fn class(self) -> FunctionClass {
        use SyntacticFunction::*;
        match self {
            Suj | Obj | Obja | Objde => FunctionClass::Base,
            Att | Loc | Dloc | Obl | Obl2 => FunctionClass::Oblique,
        }
    }

    pub fn is_base(self) -> bool {
        self.class() == FunctionClass::Base
    }

    pub fn as_str(self) -> &'static str {
        use SyntacticFunction::*;
        match self {
            Suj => "Suj",
            Obj => "Obj",
            Obja => "Obja",
            Objde => "Objde",
            Att => "Att",
            Loc => "Loc",
            Dloc => "Dloc",
            Obl => "Obl",
            Obl2 => "Obl2",
        }
    }
}

impl fmt::Display for SyntacticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SyntacticFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntacticFunction::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "syntactic function",
                token: s.to_string(),
            })
    }
}

/// How a slot is realized on the surface.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Realization {
    Np,
    Clitic,
    FiniteClause,
    InfClause,
    /// Prepositional phrase headed by the given lowercase preposition.
    Pp(String),
}

impl Realization {
    pub fn pp(prep: &str) -> Result<Realization> {
        if !valid_preposition(prep) {
            return Err(Error::UnknownToken {
                what: "preposition",
                token: prep.to_string(),
            });
        }
        Ok(Realization::Pp(prep.to_string()))
    }

    fn is_valid(&self) -> bool {
        match self {
            Realization::Pp(prep) => valid_preposition(prep),
            _ => true,
        }
    }
}

fn valid_preposition(prep: &str) -> bool {
    !prep.is_empty()
        && prep.to_lowercase() == prep
        && !prep
            .chars()
            .any(|c| c.is_whitespace() || "|;:,()<>\"&".contains(c))
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::Np => f.write_str("NP"),
            Realization::Clitic => f.write_str("CLITIC"),
            Realization::FiniteClause => f.write_str("FINITE-CLAUSE"),
            Realization::InfClause => f.write_str("INF-CLAUSE"),
            Realization::Pp(prep) => write!(f, "PP({prep})"),
        }
    }
}

impl FromStr for Realization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NP" => Ok(Realization::Np),
            "CLITIC" => Ok(Realization::Clitic),
            "FINITE-CLAUSE" => Ok(Realization::FiniteClause),
            "INF-CLAUSE" => Ok(Realization::InfClause),
            _ => match s.strip_prefix("PP(").and_then(|r| r.strip_suffix(')')) {
                Some(prep) => Realization::pp(prep),
                None => Err(Error::UnknownToken {
                    what: "realization",
                    token: s.to_string(),
                }),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSlot {
    pub function: SyntacticFunction,
    pub realizations: BTreeSet<Realization>,
    /// The slot may be left unrealized in a sentence.
    pub optional: bool,
}

impl FunctionSlot {
    pub fn new(
        function: SyntacticFunction,
        realizations: impl IntoIterator<Item = Realization>,
        optional: bool,
    ) -> Result<FunctionSlot> {
        let realizations: BTreeSet<_> = realizations.into_iter().collect();
        if realizations.is_empty() {
            return Err(Error::EmptyRealizations(function));
        }
        if let Some(bad) = realizations.iter().find(|r| !r.is_valid()) {
            return Err(Error::UnknownToken {
                what: "realization",
                token: bad.to_string(),
            });
        }
        Ok(FunctionSlot {
            function,
            realizations,
            optional,
        })
    }
}

/// Ordered slots, at most one per syntactic function.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SubcatFrame {
    slots: Vec<FunctionSlot>,
}

impl SubcatFrame {
    pub fn new(slots: Vec<FunctionSlot>) -> Result<SubcatFrame> {
        let mut seen = BTreeSet::new();
        for slot in &slots {
            if slot.realizations.is_empty() {
                return Err(Error::EmptyRealizations(slot.function));
            }
            if !seen.insert(slot.function) {
                return Err(Error::DuplicateFunction(slot.function));
            }
        }
        Ok(SubcatFrame { slots })
    }

    pub fn slots(&self) -> &[FunctionSlot] {
        &self.slots
    }

    pub fn slot(&self, function: SyntacticFunction) -> Option<&FunctionSlot> {
        self.slots.iter().find(|s| s.function == function)
    }

    pub fn functions(&self) -> BTreeSet<SyntacticFunction> {
        self.slots.iter().map(|s| s.function).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn into_slots(self) -> Vec<FunctionSlot> {
        self.slots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Redistribution {
    Active,
    Passive,
    Impersonal,
    SeMiddle,
    ObjCliticization,
}

impl Redistribution {
    pub const ALL: [Redistribution; 5] = [
        Redistribution::Active,
        Redistribution::Passive,
        Redistribution::Impersonal,
        Redistribution::SeMiddle,
        Redistribution::ObjCliticization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Redistribution::Active => "ACTIVE",
            Redistribution::Passive => "PASSIVE",
            Redistribution::Impersonal => "IMPERSONAL",
            Redistribution::SeMiddle => "SE-MIDDLE",
            Redistribution::ObjCliticization => "OBJ-CLITICIZATION",
        }
    }
}

impl fmt::Display for Redistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Redistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Redistribution::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "redistribution",
                token: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    V,
    /// Predicative noun.
    NPred,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::V => "V",
            Category::NPred => "N-PRED",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "V" => Ok(Category::V),
            "N-PRED" => Ok(Category::NPred),
            _ => Err(Error::UnknownToken {
                what: "category",
                token: s.to_string(),
            }),
        }
    }
}

/// Where a piece of lexical information came from: a source lexicon and the
/// entry identifier it uses there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub source: String,
    pub id: String,
}

impl Provenance {
    pub fn new(source: impl Into<String>, id: impl Into<String>) -> Provenance {
        Provenance {
            source: source.into(),
            id: id.into(),
        }
    }

    fn is_valid(&self) -> bool {
        !self.source.is_empty()
            && !self.id.is_empty()
            && !self.source.contains([':', ',', '\t', '\n', '\r'])
            && !self.id.contains([',', '\t', '\n', '\r'])
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.id)
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (source, id) = s
            .split_once(':')
            .ok_or_else(|| Error::Syntax(format!("provenance `{s}` is not `source:id`")))?;
        let p = Provenance::new(source, id);
        if !p.is_valid() {
            return Err(Error::Syntax(format!("malformed provenance `{s}`")));
        }
        Ok(p)
    }
}

/// One sense of a lemma.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalEntry {
    pub lemma: String,
    pub category: Category,
    pub entry_id: String,
    pub frame: SubcatFrame,
    pub redistributions: BTreeSet<Redistribution>,
    /// `false` for table entries whose constructions were never coded beyond
    /// the base construction.
    pub coded: bool,
    pub provenance: Vec<Provenance>,
    pub examples: Vec<String>,
}

impl LexicalEntry {
    /// Checks the entry-level invariants. Every constructor path in this crate
    /// goes through here before an entry reaches a [`Lexicon`].
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| {
            Err(Error::InvalidEntry {
                id: self.entry_id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.lemma.is_empty()
            || self.lemma.to_lowercase() != self.lemma
            || self.lemma.contains(|c: char| c.is_whitespace() || c == ',')
        {
            return invalid("lemma must be a non-empty lowercase word");
        }
        if self.entry_id.is_empty() || self.entry_id.contains(char::is_whitespace) {
            return invalid("entry id must be non-empty and contain no whitespace");
        }
        if self.provenance.is_empty() {
            return invalid("provenance is empty");
        }
        if self.provenance.iter().any(|p| !p.is_valid()) {
            return invalid("malformed provenance");
        }
        if self
            .examples
            .iter()
            .any(|e| e.is_empty() || e.contains(['\t', '\n', '\r']))
        {
            return invalid("examples must be non-empty single-line text without tabs");
        }
        if self.coded && !self.redistributions.contains(&Redistribution::Active) {
            return invalid("coded entry lacks ACTIVE");
        }
        if !self.coded && self.frame.slots().iter().any(|s| s.optional) {
            return invalid("uncoded entry has an optional slot");
        }
        // SubcatFrame's fields are private, so its invariants already hold.
        Ok(())
    }

    /// Base functions (subject and objects) of the frame, optionality ignored.
    pub fn base_signature(&self) -> BTreeSet<SyntacticFunction> {
        base_signature(self)
    }

    pub fn oblique_signature(&self) -> BTreeSet<SyntacticFunction> {
        oblique_signature(self)
    }
}

pub fn base_signature(e: &LexicalEntry) -> BTreeSet<SyntacticFunction> {
    e.frame
        .slots()
        .iter()
        .map(|s| s.function)
        .filter(|f| f.is_base())
        .collect()
}

pub fn oblique_signature(e: &LexicalEntry) -> BTreeSet<SyntacticFunction> {
    e.frame
        .slots()
        .iter()
        .map(|s| s.function)
        .filter(|f| !f.is_base())
        .collect()
}

/// A named lexicon. Entries of each lemma are kept sorted by entry id, which
/// is also the order used for serialization and merging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    entries: BTreeMap<String, Vec<LexicalEntry>>,
    ids: BTreeSet<String>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>) -> Lexicon {
        Lexicon {
            name: name.into(),
            entries: BTreeMap::new(),
            ids: BTreeSet::new(),
        }
    }

    pub fn from_entries(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = LexicalEntry>,
    ) -> Result<Lexicon> {
        let mut lex = Lexicon::new(name);
        for e in entries {
            lex.insert(e)?;
        }
        Ok(lex)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn insert(&mut self, entry: LexicalEntry) -> Result<()> {
        entry.validate()?;
        if self.ids.contains(&entry.entry_id) {
            return Err(Error::DuplicateEntryId(entry.entry_id));
        }
        self.ids.insert(entry.entry_id.clone());
        let list = self.entries.entry(entry.lemma.clone()).or_default();
        let pos = list.partition_point(|e| e.entry_id < entry.entry_id);
        list.insert(pos, entry);
        Ok(())
    }

    /// Removes every entry of `lemma`, returning them.
    pub fn remove_lemma(&mut self, lemma: &str) -> Vec<LexicalEntry> {
        let removed = self.entries.remove(lemma).unwrap_or_default();
        for e in &removed {
            self.ids.remove(&e.entry_id);
        }
        removed
    }

    /// Replaces an entry in place, keeping its id. The replacement is validated.
    pub fn replace(&mut self, entry: LexicalEntry) -> Result<()> {
        entry.validate()?;
        let list = self
            .entries
            .get_mut(&entry.lemma)
            .ok_or_else(|| Error::InvalidEntry {
                id: entry.entry_id.clone(),
                reason: "no such lemma".into(),
            })?;
        let slot = list
            .iter_mut()
            .find(|e| e.entry_id == entry.entry_id)
            .ok_or_else(|| Error::InvalidEntry {
                id: entry.entry_id.clone(),
                reason: "no such entry".into(),
            })?;
        *slot = entry;
        Ok(())
    }

    pub fn get(&self, lemma: &str) -> Option<&[LexicalEntry]> {
        self.entries.get(lemma).map(Vec::as_slice)
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `(lemma, entries)` pairs in lemma order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[LexicalEntry])> {
        self.entries
            .iter()
            .map(|(l, es)| (l.as_str(), es.as_slice()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values().flatten()
    }

    pub fn lemma_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entry_count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(lemma: &str, id: &str, slots: &[(SyntacticFunction, bool)]) -> LexicalEntry {
        LexicalEntry {
            lemma: lemma.into(),
            category: Category::V,
            entry_id: id.into(),
            frame: SubcatFrame::new(
                slots
                    .iter()
                    .map(|&(f, opt)| FunctionSlot::new(f, [Realization::Np], opt).unwrap())
                    .collect(),
            )
            .unwrap(),
            redistributions: [Redistribution::Active].into(),
            coded: true,
            provenance: vec![Provenance::new("test", id)],
            examples: vec![],
        }
    }

    use SyntacticFunction::*;

    #[test]
    fn classification_is_total_and_disjoint() {
        let base: Vec<_> = SyntacticFunction::ALL
            .iter()
            .filter(|f| f.is_base())
            .collect();
        assert_eq!(base, [&Suj, &Obj, &Obja, &Objde]);
        for f in SyntacticFunction::ALL {
            assert_eq!(f.as_str().parse::<SyntacticFunction>().unwrap(), f);
        }
    }

    #[test]
    fn signatures() {
        let e = entry("x", "x1", &[(Suj, false), (Obj, false), (Obja, true)]);
        assert_eq!(base_signature(&e), [Suj, Obj, Obja].into());
        assert!(oblique_signature(&e).is_empty());

        let e = entry("x", "x1", &[(Suj, false), (Loc, false)]);
        assert_eq!(base_signature(&e), [Suj].into());

        let e = entry("x", "x1", &[]);
        assert!(base_signature(&e).is_empty());
        assert!(oblique_signature(&e).is_empty());

        let e = entry("x", "x1", &[(Suj, false), (Loc, false), (Dloc, false)]);
        assert_eq!(oblique_signature(&e), [Loc, Dloc].into());

        let e = entry("x", "x1", &[(Suj, false), (Obl, true), (Att, false)]);
        assert_eq!(oblique_signature(&e), [Obl, Att].into());
    }

    #[test]
    fn frame_rejects_duplicates_and_empty_realizations() {
        let s = FunctionSlot::new(Suj, [Realization::Np], false).unwrap();
        assert_eq!(
            SubcatFrame::new(vec![s.clone(), s]),
            Err(Error::DuplicateFunction(Suj))
        );
        assert_eq!(
            FunctionSlot::new(Obj, [], false),
            Err(Error::EmptyRealizations(Obj))
        );
    }

    #[test]
    fn preposition_must_be_lowercase() {
        assert!(Realization::pp("à").is_ok());
        assert!(Realization::pp("À").is_err());
        assert!(Realization::pp("").is_err());
        assert_eq!(
            "PP(de)".parse::<Realization>().unwrap(),
            Realization::Pp("de".into())
        );
    }

    #[test]
    fn lexicon_rejects_duplicate_ids_and_keeps_id_order() {
        let mut lex = Lexicon::new("t");
        lex.insert(entry("b", "b2", &[(Suj, false)])).unwrap();
        lex.insert(entry("b", "b1", &[(Suj, false)])).unwrap();
        assert_eq!(
            lex.insert(entry("a", "b1", &[])),
            Err(Error::DuplicateEntryId("b1".into()))
        );
        let ids: Vec<_> = lex
            .get("b")
            .unwrap()
            .iter()
            .map(|e| e.entry_id.as_str())
            .collect();
        assert_eq!(ids, ["b1", "b2"]);
        assert_eq!(lex.entry_count(), 2);
    }

    #[test]
    fn entry_invariants() {
        let mut e = entry("x", "x1", &[(Suj, false), (Obj, true)]);
        e.coded = false;
        assert!(e.validate().is_err());
        let mut e = entry("x", "x1", &[(Suj, false)]);
        e.redistributions.clear();
        assert!(e.validate().is_err());
        e.coded = false;
        assert!(e.validate().is_ok());
        let mut e = entry("x", "x1", &[]);
        e.provenance.clear();
        assert!(e.validate().is_err());
    }
}
