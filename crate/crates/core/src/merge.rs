//! Fusion of a reference lexicon with a second lexicon.
//!
//! Two entries of the same lemma and category are put in correspondence when
//! their base functions (subject, objects) are identical and the oblique
//! functions of the reference entry are included in those of the other one.
//! Every reference entry is fused with at most one other entry, so for each
//! lemma the merged entry count lies between the larger of the two source
//! counts and their sum. Lemmas whose count exceeds that maximum contain at
//! least one reference entry and one other entry that found no partner; they
//! are queued for manual validation.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::lexicon::{Category, FunctionSlot, LexicalEntry, Lexicon, SubcatFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchReason {
    BaseMismatch,
    ObliqueNotIncluded,
    Matched,
}

impl fmt::Display for MatchReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchReason::BaseMismatch => "BASE-MISMATCH",
            MatchReason::ObliqueNotIncluded => "OBLIQUE-NOT-INCLUDED",
            MatchReason::Matched => "MATCHED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchDecision {
    pub ref_entry_id: String,
    pub other_entry_id: String,
    pub matched: bool,
    pub reason: MatchReason,
}

/// Decides whether `reference` can be put in correspondence with `other`.
/// The test is directional: obliques of `reference` must be included in
/// those of `other`.
pub fn entry_matches(reference: &LexicalEntry, other: &LexicalEntry) -> Result<MatchDecision> {
    if reference.lemma != other.lemma {
        return Err(Error::LemmaMismatch {
            expected: reference.lemma.clone(),
            found: other.lemma.clone(),
        });
    }
    if reference.category != other.category {
        return Err(Error::CategoryMismatch {
            lemma: reference.lemma.clone(),
        });
    }
    let reason = compare_signatures(reference, other);
    Ok(MatchDecision {
        ref_entry_id: reference.entry_id.clone(),
        other_entry_id: other.entry_id.clone(),
        matched: reason == MatchReason::Matched,
        reason,
    })
}

/// Base and oblique functions as bit sets, optionality ignored.
fn signature_bits(e: &LexicalEntry) -> (u16, u16) {
    let mut base = 0;
    let mut oblique = 0;
    for slot in e.frame.slots() {
        let bit = 1 << slot.function as u16;
        if slot.function.is_base() {
            base |= bit;
        } else {
            oblique |= bit;
        }
    }
    (base, oblique)
}

fn compare_signatures(reference: &LexicalEntry, other: &LexicalEntry) -> MatchReason {
    let (rb, ro) = signature_bits(reference);
    let (ob, oo) = signature_bits(other);
    if rb != ob {
        MatchReason::BaseMismatch
    } else if ro & !oo != 0 {
        MatchReason::ObliqueNotIncluded
    } else {
        MatchReason::Matched
    }
}

/// Source entry ids that went into one merged entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntrySources {
    pub ref_ids: Vec<String>,
    pub other_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedLemmaResult {
    pub lemma: String,
    pub category: Category,
    pub entries: Vec<LexicalEntry>,
    /// Parallel to `entries`.
    pub sources: Vec<EntrySources>,
    pub needs_validation: bool,
    pub ref_count: usize,
    pub other_count: usize,
    pub merged_count: usize,
}

fn common_key<'a>(
    ref_entries: &'a [LexicalEntry],
    other_entries: &'a [LexicalEntry],
) -> Result<(&'a str, Category)> {
    let mut all = ref_entries.iter().chain(other_entries);
    let first = all
        .next()
        .ok_or_else(|| Error::InvalidParameter("merge_lemma needs at least one entry".into()))?;
    for e in all {
        if e.lemma != first.lemma {
            return Err(Error::LemmaMismatch {
                expected: first.lemma.clone(),
                found: e.lemma.clone(),
            });
        }
        if e.category != first.category {
            return Err(Error::CategoryMismatch {
                lemma: first.lemma.clone(),
            });
        }
    }
    Ok((&first.lemma, first.category))
}

/// One merged entry, as indices into the reference and other entry lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Fused(usize, usize),
    RefOnly(usize),
    OtherOnly(usize),
}

/// The pairing step of [`merge_lemma`], without building any entry.
/// Reference entries are visited in order; each one takes the first matching
/// other entry that has not been used yet. Unpaired other entries follow in
/// their original order.
pub fn pair_entries(
    ref_entries: &[LexicalEntry],
    other_entries: &[LexicalEntry],
) -> Result<Vec<Pairing>> {
    common_key(ref_entries, other_entries)?;
    let others: Vec<(u16, u16)> = other_entries.iter().map(signature_bits).collect();
    let mut consumed = vec![false; other_entries.len()];
    let mut plan = Vec::with_capacity(ref_entries.len() + other_entries.len());
    for (i, r) in ref_entries.iter().enumerate() {
        let (rb, ro) = signature_bits(r);
        let partner = (0..others.len()).find(|&j| {
            let (ob, oo) = others[j];
            !consumed[j] && rb == ob && ro & !oo == 0
        });
        plan.push(match partner {
            Some(j) => {
                consumed[j] = true;
                Pairing::Fused(i, j)
            }
            None => Pairing::RefOnly(i),
        });
    }
    plan.extend(
        (0..others.len())
            .filter(|&j| !consumed[j])
            .map(Pairing::OtherOnly),
    );
    Ok(plan)
}

/// Merges the entries of one lemma following [`pair_entries`]: paired
/// entries are fused, leftovers from either side are copied unchanged.
pub fn merge_lemma(
    ref_entries: &[LexicalEntry],
    other_entries: &[LexicalEntry],
) -> Result<MergedLemmaResult> {
    let (lemma, category) = common_key(ref_entries, other_entries)?;
    let plan = pair_entries(ref_entries, other_entries)?;
    let mut entries = Vec::with_capacity(plan.len());
    let mut sources = Vec::with_capacity(plan.len());
    for p in plan {
        let (entry, ref_ids, other_ids) = match p {
            Pairing::Fused(i, j) => {
                let (r, o) = (&ref_entries[i], &other_entries[j]);
                (
                    fuse(r, o),
                    vec![r.entry_id.clone()],
                    vec![o.entry_id.clone()],
                )
            }
            Pairing::RefOnly(i) => {
                let r = &ref_entries[i];
                (r.clone(), vec![r.entry_id.clone()], vec![])
            }
            Pairing::OtherOnly(j) => {
                let o = &other_entries[j];
                (o.clone(), vec![], vec![o.entry_id.clone()])
            }
        };
        entries.push(entry);
        sources.push(EntrySources { ref_ids, other_ids });
    }

    let ref_count = ref_entries.len();
    let other_count = other_entries.len();
    let merged_count = entries.len();
    Ok(MergedLemmaResult {
        lemma: lemma.to_string(),
        category,
        entries,
        sources,
        needs_validation: merged_count > ref_count.max(other_count),
        ref_count,
        other_count,
        merged_count,
    })
}

/// Builds the fused entry. The frame follows `other` (whose obliques include
/// those of `reference`), realizations are unioned on shared slots and a slot
/// is optional when either side has it optional.
fn fuse(reference: &LexicalEntry, other: &LexicalEntry) -> LexicalEntry {
    let mut slots: Vec<FunctionSlot> = other.frame.slots().to_vec();
    for rs in reference.frame.slots() {
        match slots.iter_mut().find(|s| s.function == rs.function) {
            Some(s) => {
                s.realizations.extend(rs.realizations.iter().cloned());
                s.optional |= rs.optional;
            }
            None => slots.push(rs.clone()),
        }
    }
    let frame = SubcatFrame::new(slots).expect("fused slots keep one slot per function");

    let mut examples = reference.examples.clone();
    for ex in &other.examples {
        if !examples.contains(ex) {
            examples.push(ex.clone());
        }
    }
    LexicalEntry {
        lemma: reference.lemma.clone(),
        category: reference.category,
        entry_id: reference.entry_id.clone(),
        frame,
        redistributions: reference
            .redistributions
            .union(&other.redistributions)
            .copied()
            .collect(),
        coded: reference.coded || other.coded,
        provenance: reference
            .provenance
            .iter()
            .chain(&other.provenance)
            .cloned()
            .collect(),
        examples,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeTotals {
    pub lemmas: usize,
    pub entries: usize,
    pub flagged_lemmas: usize,
    pub flagged_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeReport {
    pub lemmas: Vec<MergedLemmaResult>,
    pub totals: MergeTotals,
}

impl MergeReport {
    pub fn new(lemmas: Vec<MergedLemmaResult>) -> MergeReport {
        let totals = MergeReport::recount(&lemmas);
        MergeReport { lemmas, totals }
    }

    pub fn recount(lemmas: &[MergedLemmaResult]) -> MergeTotals {
        let mut t = MergeTotals {
            lemmas: lemmas
                .iter()
                .map(|r| r.lemma.as_str())
                .collect::<BTreeSet<_>>()
                .len(),
            ..MergeTotals::default()
        };
        for r in lemmas {
            t.entries += r.merged_count;
            if r.needs_validation {
                t.flagged_lemmas += 1;
                t.flagged_entries += r.merged_count;
            }
        }
        t
    }

    /// Tab-separated report rows:
    /// `lemma ref_count other_count merged_count flag` and a `#TOTALS` line.
    pub fn to_tsv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str("#lemma\tref_count\tother_count\tmerged_count\tflag\n");
        for r in &self.lemmas {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.lemma,
                r.ref_count,
                r.other_count,
                r.merged_count,
                if r.needs_validation { "yes" } else { "no" }
            ));
        }
        let t = &self.totals;
        out.push_str(&format!(
            "#TOTALS\tlemmas={}\tentries={}\tflagged_lemmas={}\tflagged_entries={}\n",
            t.lemmas, t.entries, t.flagged_lemmas, t.flagged_entries
        ));
        out
    }
}

fn sanitize_id_part(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if s.is_empty() {
        "other".into()
    } else {
        s
    }
}

/// Merges `other` into `reference`. The result is named after the reference
/// lexicon. Copied entries of `other` whose id is already used by the
/// reference get a `~<other name>` suffix.
pub fn merge_lexicons(reference: &Lexicon, other: &Lexicon) -> (Lexicon, MergeReport) {
    let lemmas: BTreeSet<&str> = reference.lemmas().chain(other.lemmas()).collect();
    let suffix = sanitize_id_part(other.name());
    let mut generated: BTreeSet<String> = BTreeSet::new();
    let mut merged = Lexicon::new(reference.name());
    let mut results = Vec::new();

    for lemma in lemmas {
        let refs = reference.get(lemma).unwrap_or(&[]);
        let others = other.get(lemma).unwrap_or(&[]);
        for category in [Category::V, Category::NPred] {
            let r: Vec<LexicalEntry> = refs
                .iter()
                .filter(|e| e.category == category)
                .cloned()
                .collect();
            let o: Vec<LexicalEntry> = others
                .iter()
                .filter(|e| e.category == category)
                .cloned()
                .collect();
            if r.is_empty() && o.is_empty() {
                continue;
            }
            let mut result = merge_lemma(&r, &o).expect("entries share lemma and category");
            for (entry, src) in result.entries.iter_mut().zip(&result.sources) {
                if src.ref_ids.is_empty() && reference.contains_id(&entry.entry_id) {
                    let base = format!("{}~{}", entry.entry_id, suffix);
                    let mut candidate = base.clone();
                    let mut n = 2;
                    while reference.contains_id(&candidate)
                        || other.contains_id(&candidate)
                        || generated.contains(&candidate)
                    {
                        candidate = format!("{base}{n}");
                        n += 1;
                    }
                    generated.insert(candidate.clone());
                    entry.entry_id = candidate;
                }
            }
            for entry in &result.entries {
                merged
                    .insert(entry.clone())
                    .expect("merged entries are valid and have unique ids");
            }
            results.push(result);
        }
    }
    (merged, MergeReport::new(results))
}

/// Lemmas needing manual validation, largest merged count first.
pub fn validation_queue(report: &MergeReport) -> Vec<String> {
    let mut flagged: Vec<&MergedLemmaResult> = report
        .lemmas
        .iter()
        .filter(|r| r.needs_validation)
        .collect();
    flagged.sort_by(|a, b| {
        b.merged_count
            .cmp(&a.merged_count)
            .then_with(|| a.lemma.cmp(&b.lemma))
    });
    let mut seen = BTreeSet::new();
    flagged
        .into_iter()
        .filter(|r| seen.insert(r.lemma.as_str()))
        .map(|r| r.lemma.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{
        parse_lexicon, Provenance, Realization, Redistribution, SyntacticFunction,
    };
    use SyntacticFunction::*;

    fn entry(id: &str, funcs: &[SyntacticFunction]) -> LexicalEntry {
        LexicalEntry {
            lemma: "x".into(),
            category: Category::V,
            entry_id: id.into(),
            frame: SubcatFrame::new(
                funcs
                    .iter()
                    .map(|&f| FunctionSlot::new(f, [Realization::Np], false).unwrap())
                    .collect(),
            )
            .unwrap(),
            redistributions: [Redistribution::Active].into(),
            coded: true,
            provenance: vec![Provenance::new("src", id)],
            examples: vec![],
        }
    }

    #[test]
    fn match_reasons() {
        let d = entry_matches(&entry("r", &[Suj, Obj]), &entry("o", &[Suj, Obj, Loc])).unwrap();
        assert_eq!(d.reason, MatchReason::Matched);
        assert!(d.matched);
        let d = entry_matches(&entry("r", &[Suj, Obj]), &entry("o", &[Suj, Obja])).unwrap();
        assert_eq!(d.reason, MatchReason::BaseMismatch);
        let d = entry_matches(&entry("r", &[Suj, Loc]), &entry("o", &[Suj, Dloc])).unwrap();
        assert_eq!(d.reason, MatchReason::ObliqueNotIncluded);
        // both conditions fail
        let d = entry_matches(&entry("r", &[Suj, Loc]), &entry("o", &[Obj, Dloc])).unwrap();
        assert_eq!(d.reason, MatchReason::BaseMismatch);
    }

    #[test]
    fn matching_is_directional() {
        let narrow = entry("a", &[Suj, Obj]);
        let wide = entry("b", &[Suj, Obj, Loc]);
        assert!(entry_matches(&narrow, &wide).unwrap().matched);
        assert_eq!(
            entry_matches(&wide, &narrow).unwrap().reason,
            MatchReason::ObliqueNotIncluded
        );
    }

    #[test]
    fn match_errors_on_mismatched_keys() {
        let mut other = entry("o", &[Suj]);
        other.lemma = "y".into();
        assert!(matches!(
            entry_matches(&entry("r", &[Suj]), &other),
            Err(Error::LemmaMismatch { .. })
        ));
        let mut other = entry("o", &[Suj]);
        other.category = Category::NPred;
        assert!(matches!(
            entry_matches(&entry("r", &[Suj]), &other),
            Err(Error::CategoryMismatch { .. })
        ));
    }

    #[test]
    fn merge_lemma_count_cases() {
        let r = merge_lemma(&[], &[entry("o", &[Suj])]).unwrap();
        assert_eq!((r.ref_count, r.other_count, r.merged_count), (0, 1, 1));
        assert!(!r.needs_validation);

        let r = merge_lemma(&[entry("r", &[Suj, Obj])], &[entry("o", &[Suj, Obj, Loc])]).unwrap();
        assert_eq!((r.ref_count, r.other_count, r.merged_count), (1, 1, 1));
        assert!(!r.needs_validation);

        let r = merge_lemma(&[entry("r", &[Suj, Obj])], &[entry("o", &[Suj, Obja])]).unwrap();
        assert_eq!((r.ref_count, r.other_count, r.merged_count), (1, 1, 2));
        assert!(r.needs_validation);
    }

    #[test]
    fn fused_entry_combines_information() {
        let mut r = entry("r", &[Suj, Obj]);
        r.examples = vec!["un".into()];
        let mut o = entry("o", &[Suj, Obj, Loc]);
        let mut slots = o.frame.clone().into_slots();
        slots[1] = FunctionSlot::new(Obj, [Realization::Clitic], true).unwrap();
        o.frame = SubcatFrame::new(slots).unwrap();
        o.redistributions.insert(Redistribution::Passive);
        o.examples = vec!["deux".into(), "un".into()];

        let m = merge_lemma(&[r], &[o]).unwrap();
        let f = &m.entries[0];
        assert_eq!(f.entry_id, "r");
        assert_eq!(f.frame.functions(), [Suj, Obj, Loc].into());
        let obj = f.frame.slot(Obj).unwrap();
        assert!(obj.optional);
        assert_eq!(
            obj.realizations,
            [Realization::Np, Realization::Clitic].into()
        );
        assert!(f.redistributions.contains(&Redistribution::Passive));
        assert_eq!(f.examples, ["un", "deux"]);
        assert_eq!(
            f.provenance,
            vec![Provenance::new("src", "r"), Provenance::new("src", "o")]
        );
        assert_eq!(m.sources[0].ref_ids, ["r"]);
        assert_eq!(m.sources[0].other_ids, ["o"]);
    }

    #[test]
    fn merge_lemma_rejects_mixed_input() {
        let mut o = entry("o", &[Suj]);
        o.lemma = "z".into();
        assert!(merge_lemma(&[entry("r", &[Suj])], &[o]).is_err());
        let mut o = entry("o", &[Suj]);
        o.category = Category::NPred;
        assert!(merge_lemma(&[entry("r", &[Suj])], &[o]).is_err());
    }

    #[test]
    fn disjoint_lexicons() {
        let a = parse_lexicon("ref", "a\tV\ta1\tSuj:NP\tACTIVE\tcoded\tref:1\n").unwrap();
        let b = parse_lexicon("other", "b\tV\tb1\tSuj:NP\tACTIVE\tcoded\tother:1\n").unwrap();
        let (m, report) = merge_lexicons(&a, &b);
        assert_eq!(m.lemmas().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(report.totals.flagged_lemmas, 0);
        assert!(validation_queue(&report).is_empty());
    }

    #[test]
    fn identical_lexicons_double_provenance() {
        let text = "a\tV\ta1\tSuj:NP;Obj:NP\tACTIVE\tcoded\tref:1\n\
                    a\tV\ta2\tSuj:NP;Obja:PP(à)\tACTIVE\tcoded\tref:2\n";
        let a = parse_lexicon("ref", text).unwrap();
        let (m, report) = merge_lexicons(&a, &a);
        assert_eq!(m.entry_count(), 2);
        assert_eq!(report.totals.flagged_lemmas, 0);
        for e in m.entries() {
            assert_eq!(e.provenance.len(), 2);
            assert_eq!(e.provenance[0], e.provenance[1]);
        }
    }

    #[test]
    fn empty_other_returns_reference() {
        let text = "a\tV\ta1\tSuj:NP;Obj:NP\tACTIVE\tcoded\tref:1\n\
                    b\tN-PRED\tb1\tSuj:NP\tACTIVE\tcoded\tref:2\n";
        let a = parse_lexicon("ref", text).unwrap();
        let (m, _) = merge_lexicons(&a, &Lexicon::new("other"));
        assert_eq!(m, a);
    }

    #[test]
    fn colliding_ids_are_renamed() {
        let a = parse_lexicon("ref", "a\tV\tx1\tSuj:NP\tACTIVE\tcoded\tref:1\n").unwrap();
        let b = parse_lexicon("dv", "a\tV\tx1\tSuj:NP;Obj:NP\tACTIVE\tcoded\tdv:1\n").unwrap();
        let (m, report) = merge_lexicons(&a, &b);
        let ids: Vec<_> = m.entries().map(|e| e.entry_id.as_str()).collect();
        assert_eq!(ids, ["x1", "x1~dv"]);
        assert!(report.lemmas[0].needs_validation);
    }

    #[test]
    fn queue_order() {
        let mk = |lemma: &str, merged: usize, flag: bool| MergedLemmaResult {
            lemma: lemma.into(),
            category: Category::V,
            entries: vec![],
            sources: vec![],
            needs_validation: flag,
            ref_count: 1,
            other_count: 1,
            merged_count: merged,
        };
        let report = MergeReport::new(vec![mk("x", 3, true), mk("y", 5, true), mk("z", 9, false)]);
        assert_eq!(validation_queue(&report), ["y", "x"]);
        assert_eq!(report.totals.flagged_entries, 8);
    }

    #[test]
    fn report_tsv_layout() {
        let a = parse_lexicon("ref", "a\tV\ta1\tSuj:NP\tACTIVE\tcoded\tref:1\n").unwrap();
        let b = parse_lexicon("o", "a\tV\tb1\tObj:NP\tACTIVE\tcoded\to:1\n").unwrap();
        let (_, report) = merge_lexicons(&a, &b);
        assert_eq!(
            report.to_tsv(""),
            "#lemma\tref_count\tother_count\tmerged_count\tflag\n\
             a\t1\t1\t2\tyes\n\
             #TOTALS\tlemmas=1\tentries=2\tflagged_lemmas=1\tflagged_entries=2\n"
        );
    }
}
