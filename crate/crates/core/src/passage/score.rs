use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::{ConstituentType, RelationType, SentenceAnnotation};
use crate::checker::SentenceRecord;
use crate::error::{Error, Result};
use crate::report::format_percent;

/// How loosely constituent boundaries are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelaxationMode {
    /// Identical spans.
    Exact,
    /// Identical start token.
    Left,
    /// Any shared token.
    Overlap,
}

impl RelaxationMode {
    pub const ALL: [RelaxationMode; 3] = [
        RelaxationMode::Exact,
        RelaxationMode::Left,
        RelaxationMode::Overlap,
    ];

    pub fn compatible(self, gold: (usize, usize), hyp: (usize, usize)) -> bool {
        match self {
            RelaxationMode::Exact => gold == hyp,
            RelaxationMode::Left => gold.0 == hyp.0,
            RelaxationMode::Overlap => gold.0.max(hyp.0) < gold.1.min(hyp.1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelaxationMode::Exact => "exact",
            RelaxationMode::Left => "left",
            RelaxationMode::Overlap => "overlap",
        }
    }
}

impl fmt::Display for RelaxationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelaxationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelaxationMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "relaxation mode",
                token: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub true_positives: u64,
    pub gold: u64,
    pub hyp: u64,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        self.true_positives += rhs.true_positives;
        self.gold += rhs.gold;
        self.hyp += rhs.hyp;
    }
}

/// Per-type counts for one sentence or a whole corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment<T: Ord> {
    pub per_type: BTreeMap<T, Counts>,
}

impl<T: Ord + Copy> Alignment<T> {
    fn new(types: &[T]) -> Alignment<T> {
        Alignment {
            per_type: types.iter().map(|&t| (t, Counts::default())).collect(),
        }
    }

    fn counts_mut(&mut self, t: T) -> &mut Counts {
        self.per_type.entry(t).or_default()
    }

    pub fn aggregate(&self) -> Counts {
        let mut total = Counts::default();
        for c in self.per_type.values() {
            total += *c;
        }
        total
    }

    fn absorb(&mut self, other: &Alignment<T>) {
        for (t, c) in &other.per_type {
            *self.counts_mut(*t) += *c;
        }
    }
}

fn check_pair(gold: &SentenceAnnotation, hyp: &SentenceAnnotation) -> Result<()> {
    if gold.sentence_id != hyp.sentence_id {
        return Err(Error::SentenceMismatch(format!(
            "gold `{}` vs hyp `{}`",
            gold.sentence_id, hyp.sentence_id
        )));
    }
    if gold.tokens.len() != hyp.tokens.len() {
        return Err(Error::SentenceMismatch(format!(
            "`{}` has {} gold tokens but {} hyp tokens",
            gold.sentence_id,
            gold.tokens.len(),
            hyp.tokens.len()
        )));
    }
    Ok(())
}

/// One-to-one constituent matching of maximum size. Gold constituents are
/// first visited in `(start, end)` order, each taking the closest compatible
/// unused hyp constituent of the same type (distance = |Δstart| + |Δend|,
/// ties to the earlier hyp constituent). Augmenting paths then repair the
/// cases where an early greedy choice blocks a later gold constituent, so the
/// true positive count is the largest possible and grows with the mode's
/// tolerance.
pub fn match_constituents(
    gold: &SentenceAnnotation,
    hyp: &SentenceAnnotation,
    mode: RelaxationMode,
) -> Result<Alignment<ConstituentType>> {
    check_pair(gold, hyp)?;
    let mut al = Alignment::new(&ConstituentType::ALL);
    for c in &gold.constituents {
        al.counts_mut(c.ctype).gold += 1;
    }
    for c in &hyp.constituents {
        al.counts_mut(c.ctype).hyp += 1;
    }

    let mut order: Vec<usize> = (0..gold.constituents.len()).collect();
    order.sort_by_key(|&i| (gold.constituents[i].start, gold.constituents[i].end));
    // compatible hyp constituents of every gold one, closest first
    let candidates: Vec<Vec<usize>> = gold
        .constituents
        .iter()
        .map(|g| {
            let mut c: Vec<usize> = (0..hyp.constituents.len())
                .filter(|&j| {
                    let h = &hyp.constituents[j];
                    h.ctype == g.ctype && mode.compatible((g.start, g.end), (h.start, h.end))
                })
                .collect();
            c.sort_by_key(|&j| {
                let h = &hyp.constituents[j];
                (g.start.abs_diff(h.start) + g.end.abs_diff(h.end), j)
            });
            c
        })
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; hyp.constituents.len()];
    let mut matched = vec![false; gold.constituents.len()];
    for &gi in &order {
        if let Some(&j) = candidates[gi].iter().find(|&&j| owner[j].is_none()) {
            owner[j] = Some(gi);
            matched[gi] = true;
        }
    }
    for &gi in &order {
        if !matched[gi] {
            let mut visited = vec![false; hyp.constituents.len()];
            matched[gi] = augment(gi, &candidates, &mut owner, &mut visited);
        }
    }
    for (gi, g) in gold.constituents.iter().enumerate() {
        if matched[gi] {
            al.counts_mut(g.ctype).true_positives += 1;
        }
    }
    Ok(al)
}

/// Looks for an alternating path from gold `gi` to a free hyp constituent
/// and flips it.
fn augment(
    gi: usize,
    candidates: &[Vec<usize>],
    owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &j in &candidates[gi] {
        if visited[j] {
            continue;
        }
        visited[j] = true;
        let free = match owner[j] {
            None => true,
            Some(other) => augment(other, candidates, owner, visited),
        };
        if free {
            owner[j] = Some(gi);
            return true;
        }
    }
    false
}

/// Relations match on identical `(type, source, target)`; duplicates each
/// consume one partner.
pub fn match_relations(
    gold: &SentenceAnnotation,
    hyp: &SentenceAnnotation,
) -> Result<Alignment<RelationType>> {
    check_pair(gold, hyp)?;
    let mut al = Alignment::new(&RelationType::ALL);
    let mut pool: BTreeMap<_, u64> = BTreeMap::new();
    for r in &hyp.relations {
        al.counts_mut(r.rtype).hyp += 1;
        *pool.entry(*r).or_default() += 1;
    }
    for r in &gold.relations {
        let c = al.counts_mut(r.rtype);
        c.gold += 1;
        if let Some(n) = pool.get_mut(r).filter(|n| **n > 0) {
            *n -= 1;
            c.true_positives += 1;
        }
    }
    Ok(al)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub counts: Counts,
    pub precision: Ratio<u64>,
    pub recall: Ratio<u64>,
    pub f_measure: Ratio<u64>,
}

impl Score {
    /// Precision and recall of an empty side are 1 (nothing wrongly
    /// produced, nothing missed); the f-measure is 0 when both are 0.
    pub fn from_counts(counts: Counts) -> Score {
        let Counts {
            true_positives: tp,
            gold,
            hyp,
        } = counts;
        let ratio = |n: u64, d: u64| {
            if d == 0 {
                Ratio::from_integer(1)
            } else {
                Ratio::new(n, d)
            }
        };
        // 2PR/(P+R) reduces to 2tp/(gold+hyp) once both sides are non-empty.
        let f_measure = match (gold, hyp) {
            (0, 0) => Ratio::from_integer(1),
            (0, _) | (_, 0) => Ratio::from_integer(0),
            _ => Ratio::new(2 * tp, gold + hyp),
        };
        Score {
            counts,
            precision: ratio(tp, hyp),
            recall: ratio(tp, gold),
            f_measure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryScores<T: Ord> {
    pub aggregate: Score,
    pub per_type: BTreeMap<T, Score>,
}

impl<T: Ord + Copy> CategoryScores<T> {
    fn from_alignment(al: &Alignment<T>) -> CategoryScores<T> {
        CategoryScores {
            aggregate: Score::from_counts(al.aggregate()),
            per_type: al
                .per_type
                .iter()
                .map(|(t, c)| (*t, Score::from_counts(*c)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalScores {
    pub mode: RelaxationMode,
    pub constituents: CategoryScores<ConstituentType>,
    pub relations: CategoryScores<RelationType>,
}

/// Micro-averaged scores over aligned gold and hypothesis corpora.
pub fn score_corpus(
    gold: &[SentenceAnnotation],
    hyp: &[SentenceAnnotation],
    mode: RelaxationMode,
) -> Result<EvalScores> {
    if gold.len() != hyp.len() {
        return Err(Error::SentenceMismatch(format!(
            "{} gold sentences but {} hyp sentences",
            gold.len(),
            hyp.len()
        )));
    }
    let mut cons = Alignment::new(&ConstituentType::ALL);
    let mut rels = Alignment::new(&RelationType::ALL);
    for (g, h) in gold.iter().zip(hyp) {
        cons.absorb(&match_constituents(g, h, mode)?);
        rels.absorb(&match_relations(g, h)?);
    }
    Ok(EvalScores {
        mode,
        constituents: CategoryScores::from_alignment(&cons),
        relations: CategoryScores::from_alignment(&rels),
    })
}

impl EvalScores {
    /// Three tab-separated tables: a summary row (coverage, constituent and
    /// relation f-measures), the f-measure of every relation type, and a
    /// detail table with counts, precision, recall and f-measure per type.
    /// All figures are percentages with two decimals.
    pub fn to_tsv(&self, header: &str, label: &str, coverage: &Coverage) -> String {
        let mut out = String::from(header);
        out.push_str("#table\tsummary\n");
        out.push_str("lexicon\tcoverage_sentences\tcoverage_pct\tconstituents_f\trelations_f\n");
        out.push_str(&format!(
            "{label}\t{}\t{}\t{}\t{}\n",
            coverage.count,
            coverage.percent(),
            format_percent(self.constituents.aggregate.f_measure),
            format_percent(self.relations.aggregate.f_measure),
        ));

        out.push_str("#table\trelations_f\nlexicon");
        for t in RelationType::ALL {
            out.push_str(&format!("\t{t}"));
        }
        out.push_str(&format!("\n{label}"));
        for t in RelationType::ALL {
            out.push_str(&format!(
                "\t{}",
                format_percent(self.relations.per_type[&t].f_measure)
            ));
        }
        out.push('\n');

        out.push_str("#table\tdetail\n");
        out.push_str("kind\ttype\ttp\tgold\thyp\tprecision\trecall\tf_measure\n");
        let mut row = |kind: &str, ty: &str, s: &Score| {
            out.push_str(&format!(
                "{kind}\t{ty}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                s.counts.true_positives,
                s.counts.gold,
                s.counts.hyp,
                format_percent(s.precision),
                format_percent(s.recall),
                format_percent(s.f_measure)
            ));
        };
        for (t, s) in &self.constituents.per_type {
            row("constituent", t.as_str(), s);
        }
        row("constituent", "ALL", &self.constituents.aggregate);
        for (t, s) in &self.relations.per_type {
            row("relation", t.as_str(), s);
        }
        row("relation", "ALL", &self.relations.aggregate);
        out
    }
}

/// Anything that can count as a fully analyzed sentence.
pub trait Analyzed {
    fn analyzed(&self) -> bool;
}

impl Analyzed for SentenceRecord {
    fn analyzed(&self) -> bool {
        self.analyzable
    }
}

impl Analyzed for SentenceAnnotation {
    fn analyzed(&self) -> bool {
        self.full_parse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub count: u64,
    pub total: u64,
    pub ratio: Ratio<u64>,
}

impl Coverage {
    /// Percentage with two decimals, rounded half up.
    pub fn percent(&self) -> String {
        format_percent(self.ratio)
    }
}

pub fn coverage<T: Analyzed>(items: &[T]) -> Result<Coverage> {
    if items.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let count = items.iter().filter(|i| i.analyzed()).count() as u64;
    let total = items.len() as u64;
    Ok(Coverage {
        count,
        total,
        ratio: Ratio::new(count, total),
    })
}
