//! Random instance generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use valence_core::checker::{AnnotatedSentence, ObservedFrame};
use valence_core::lexicon::{
    Category, FunctionSlot, LexicalEntry, Lexicon, Provenance, Realization, Redistribution,
    SubcatFrame, SyntacticFunction,
};
use valence_core::mining::{MiningCorpus, MiningSentence};
use valence_core::passage::{
    Constituent, ConstituentType, Relation, RelationType, RelaxationMode, SentenceAnnotation,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PREPS: [&str; 5] = ["à", "de", "sur", "avec", "entre"];

pub fn random_realization(rng: &mut impl Rng) -> Realization {
    match rng.random_range(0..5) {
        0 => Realization::Np,
        1 => Realization::Clitic,
        2 => Realization::FiniteClause,
        3 => Realization::InfClause,
        _ => Realization::Pp(PREPS.choose(rng).unwrap().to_string()),
    }
}

pub fn random_frame(
    rng: &mut impl Rng,
    universe: &[SyntacticFunction],
    coded: bool,
) -> SubcatFrame {
    let mut funcs: Vec<SyntacticFunction> = universe
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.5))
        .collect();
    // shuffle slot order a bit
    if funcs.len() > 1 && rng.random_bool(0.3) {
        funcs.swap(0, 1);
    }
    frame_of(rng, &funcs, coded)
}

pub fn frame_of(rng: &mut impl Rng, funcs: &[SyntacticFunction], coded: bool) -> SubcatFrame {
    SubcatFrame::new(
        funcs
            .iter()
            .map(|&f| {
                let n = rng.random_range(1..=3);
                let reals: Vec<Realization> = (0..n).map(|_| random_realization(rng)).collect();
                FunctionSlot::new(f, reals, coded && rng.random_bool(0.3)).unwrap()
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_entry(
    rng: &mut impl Rng,
    lemma: &str,
    id: &str,
    universe: &[SyntacticFunction],
) -> LexicalEntry {
    let coded = rng.random_bool(0.85);
    let mut redistributions: BTreeSet<Redistribution> = Redistribution::ALL
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.4))
        .collect();
    if coded {
        redistributions.insert(Redistribution::Active);
    }
    let n_examples = rng.random_range(0..3);
    LexicalEntry {
        lemma: lemma.to_string(),
        category: if rng.random_bool(0.9) {
            Category::V
        } else {
            Category::NPred
        },
        entry_id: id.to_string(),
        frame: random_frame(rng, universe, coded),
        redistributions,
        coded,
        provenance: (0..rng.random_range(1..=2))
            .map(|k| Provenance::new(["lefff", "dv", "lglex"][k % 3], format!("{id}:{k}")))
            .collect(),
        examples: (0..n_examples)
            .map(|k| format!("Exemple {k} pour {lemma}."))
            .collect(),
    }
}

pub fn lemma_name(i: usize) -> String {
    const SYL: [&str; 8] = ["ma", "ré", "pa", "ti", "co", "lu", "zé", "ba"];
    format!("{}{}er", SYL[i % 8], SYL[(i / 8) % 8]) + &"x".repeat(i / 64)
}

pub fn random_lexicon(
    rng: &mut impl Rng,
    name: &str,
    lemmas: usize,
    max_entries: usize,
) -> Lexicon {
    let mut lex = Lexicon::new(name);
    for i in 0..lemmas {
        let lemma = lemma_name(i);
        for k in 0..rng.random_range(1..=max_entries) {
            let id = format!("{name}_{lemma}_{k}");
            lex.insert(random_entry(rng, &lemma, &id, &SyntacticFunction::ALL))
                .unwrap();
        }
    }
    lex
}

/// Verbal entry with NP-only, obligatory slots and ACTIVE only.
pub fn plain_entry(lemma: &str, id: &str, funcs: &[SyntacticFunction]) -> LexicalEntry {
    LexicalEntry {
        lemma: lemma.to_string(),
        category: Category::V,
        entry_id: id.to_string(),
        frame: SubcatFrame::new(
            funcs
                .iter()
                .map(|&f| FunctionSlot::new(f, [Realization::Np], false).unwrap())
                .collect(),
        )
        .unwrap(),
        redistributions: [Redistribution::Active].into(),
        coded: true,
        provenance: vec![Provenance::new("t", id)],
        examples: vec![],
    }
}

// ---------------------------------------------------------------- merging

/// Base / oblique partition, written out independently of the library.
fn signature_bits(e: &LexicalEntry) -> (u16, u16) {
    let mut base = 0u16;
    let mut obl = 0u16;
    for slot in e.frame.slots() {
        let name = slot.function.to_string();
        let bit = 1u16
            << SyntacticFunction::ALL
                .iter()
                .position(|f| *f == slot.function)
                .unwrap();
        match name.as_str() {
            "Suj" | "Obj" | "Obja" | "Objde" => base |= bit,
            _ => obl |= bit,
        }
    }
    (base, obl)
}

/// Enumerates every (ref, other) pair, then replays the one-to-one greedy
/// policy on the resulting match matrix. Returns the merged entry count.
pub fn merged_count_oracle(refs: &[LexicalEntry], others: &[LexicalEntry]) -> usize {
    let matrix: Vec<Vec<bool>> = refs
        .iter()
        .map(|r| {
            let (rb, ro) = signature_bits(r);
            others
                .iter()
                .map(|o| {
                    let (ob, oo) = signature_bits(o);
                    r.category == o.category && rb == ob && ro & !oo == 0
                })
                .collect()
        })
        .collect();
    let mut taken = vec![false; others.len()];
    let mut fused = 0;
    for row in &matrix {
        if let Some(j) = (0..others.len()).find(|&j| row[j] && !taken[j]) {
            taken[j] = true;
            fused += 1;
        }
    }
    refs.len() + others.len() - fused
}

// ---------------------------------------------------------------- passage

pub fn random_annotation(
    rng: &mut impl Rng,
    id: &str,
    max_constituents: usize,
    max_relations: usize,
) -> SentenceAnnotation {
    let n = rng.random_range(2..=10);
    let constituents = (0..rng.random_range(0..=max_constituents))
        .map(|_| {
            let start = rng.random_range(0..n);
            let end = rng.random_range(start + 1..=n);
            Constituent {
                ctype: *ConstituentType::ALL[..3].choose(rng).unwrap(),
                start,
                end,
            }
        })
        .collect();
    let relations = (0..rng.random_range(0..=max_relations))
        .map(|_| {
            let source = rng.random_range(0..n);
            let mut target = rng.random_range(0..n - 1);
            if target >= source {
                target += 1;
            }
            Relation {
                rtype: *RelationType::ALL[..4].choose(rng).unwrap(),
                source,
                target,
            }
        })
        .collect();
    SentenceAnnotation {
        sentence_id: id.to_string(),
        tokens: (0..n).map(|i| format!("w{i}")).collect(),
        constituents,
        relations,
        full_parse: rng.random_bool(0.8),
    }
}

/// A hypothesis derived from `gold` by dropping, shifting and retyping some
/// items, so that it overlaps the gold annotation partially.
pub fn perturb(rng: &mut impl Rng, gold: &SentenceAnnotation) -> SentenceAnnotation {
    let n = gold.tokens.len();
    let mut hyp = gold.clone();
    hyp.constituents.clear();
    for c in &gold.constituents {
        if !rng.random_bool(0.85) {
            continue;
        }
        let mut c = *c;
        match rng.random_range(0..5) {
            0 if c.end < n => c.end += 1,
            1 if c.start + 1 < c.end => c.start += 1,
            2 => c.ctype = *ConstituentType::ALL[..3].choose(rng).unwrap(),
            _ => {}
        }
        hyp.constituents.push(c);
    }
    for _ in 0..rng.random_range(0..=2) {
        let start = rng.random_range(0..n);
        hyp.constituents.push(Constituent {
            ctype: *ConstituentType::ALL[..3].choose(rng).unwrap(),
            start,
            end: rng.random_range(start + 1..=n),
        });
    }
    hyp.relations.clear();
    for r in &gold.relations {
        if !rng.random_bool(0.8) {
            continue;
        }
        let mut r = *r;
        if rng.random_bool(0.2) {
            r.rtype = *RelationType::ALL[..4].choose(rng).unwrap();
        }
        hyp.relations.push(r);
    }
    hyp.full_parse = rng.random_bool(0.7);
    hyp
}

/// Size of a maximum one-to-one matching between compatible constituents,
/// by exhaustive search.
pub fn optimal_constituent_matches(
    gold: &SentenceAnnotation,
    hyp: &SentenceAnnotation,
    mode: RelaxationMode,
) -> usize {
    fn compatible(g: &Constituent, h: &Constituent, mode: RelaxationMode) -> bool {
        g.ctype == h.ctype
            && match mode {
                RelaxationMode::Exact => g.start == h.start && g.end == h.end,
                RelaxationMode::Left => g.start == h.start,
                RelaxationMode::Overlap => g.start < h.end && h.start < g.end,
            }
    }
    fn best(
        i: usize,
        gold: &[Constituent],
        hyp: &[Constituent],
        used: &mut Vec<bool>,
        mode: RelaxationMode,
    ) -> usize {
        if i == gold.len() {
            return 0;
        }
        let mut top = best(i + 1, gold, hyp, used, mode);
        for j in 0..hyp.len() {
            if !used[j] && compatible(&gold[i], &hyp[j], mode) {
                used[j] = true;
                top = top.max(1 + best(i + 1, gold, hyp, used, mode));
                used[j] = false;
            }
        }
        top
    }
    let mut used = vec![false; hyp.constituents.len()];
    best(0, &gold.constituents, &hyp.constituents, &mut used, mode)
}

/// Closest-first greedy pass alone, with no repair step: gold constituents
/// in `(start, end)` order each take the nearest compatible unused hyp
/// constituent.
pub fn closest_first_greedy(
    gold: &SentenceAnnotation,
    hyp: &SentenceAnnotation,
    mode: RelaxationMode,
) -> usize {
    let mut gold_sorted = gold.constituents.clone();
    gold_sorted.sort_by_key(|c| (c.start, c.end));
    let mut used = vec![false; hyp.constituents.len()];
    let mut tp = 0;
    for g in &gold_sorted {
        let mut best: Option<(usize, usize)> = None;
        for (j, h) in hyp.constituents.iter().enumerate() {
            let ok = match mode {
                RelaxationMode::Exact => g.start == h.start && g.end == h.end,
                RelaxationMode::Left => g.start == h.start,
                RelaxationMode::Overlap => g.start < h.end && h.start < g.end,
            };
            if used[j] || h.ctype != g.ctype || !ok {
                continue;
            }
            let d = g.start.abs_diff(h.start) + g.end.abs_diff(h.end);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        if let Some((_, j)) = best {
            used[j] = true;
            tp += 1;
        }
    }
    tp
}

/// Multiset intersection size of the relation lists.
pub fn relation_intersection(gold: &SentenceAnnotation, hyp: &SentenceAnnotation) -> usize {
    let mut count: BTreeMap<(String, usize, usize), i64> = BTreeMap::new();
    for r in &gold.relations {
        *count
            .entry((r.rtype.to_string(), r.source, r.target))
            .or_default() += 1;
    }
    let mut inter = 0;
    for r in &hyp.relations {
        if let Some(c) = count.get_mut(&(r.rtype.to_string(), r.source, r.target)) {
            if *c > 0 {
                *c -= 1;
                inter += 1;
            }
        }
    }
    inter
}

// ---------------------------------------------------------------- mining

pub fn random_mining_corpus(
    rng: &mut impl Rng,
    max_sentences: usize,
    max_forms: usize,
) -> MiningCorpus {
    let n_forms = rng.random_range(1..=max_forms);
    let forms: Vec<String> = (0..n_forms).map(|i| format!("f{i}")).collect();
    let n = rng.random_range(1..=max_sentences);
    let mut sentences: Vec<MiningSentence> = (0..n)
        .map(|i| MiningSentence {
            sentence_id: format!("s{i:03}"),
            forms: (0..rng.random_range(1..=4))
                .map(|_| forms.choose(rng).unwrap().clone())
                .collect(),
            failed: rng.random_bool(0.35),
        })
        .collect();
    // make sure at least one sentence fails
    sentences[0].failed = true;
    // enumeration order must not matter
    if rng.random_bool(0.5) {
        sentences.reverse();
    }
    MiningCorpus::new(sentences).unwrap()
}

/// Straightforward fixed-point iteration over the raw corpus, with maps
/// keyed by form and no precomputed structure.
pub struct BruteForceMiner {
    pub history: Vec<BTreeMap<String, f64>>,
}

impl BruteForceMiner {
    pub fn run(corpus: &MiningCorpus, iterations: usize) -> BruteForceMiner {
        let mut occ: BTreeMap<String, f64> = BTreeMap::new();
        let mut failed_occ: BTreeMap<String, f64> = BTreeMap::new();
        for s in corpus.sentences() {
            for f in &s.forms {
                *occ.entry(f.clone()).or_default() += 1.0;
                *failed_occ.entry(f.clone()).or_default() += if s.failed { 1.0 } else { 0.0 };
            }
        }
        let mut s: BTreeMap<String, f64> = occ
            .iter()
            .map(|(f, n)| (f.clone(), failed_occ[f] / n))
            .collect();
        let mut history = vec![s.clone()];
        for _ in 0..iterations {
            let mut acc: BTreeMap<String, f64> = occ.keys().map(|f| (f.clone(), 0.0)).collect();
            for sent in corpus.sentences().iter().filter(|x| x.failed) {
                let z: f64 = sent.forms.iter().map(|f| s[f]).sum();
                for f in &sent.forms {
                    let share = if z == 0.0 {
                        1.0 / sent.forms.len() as f64
                    } else {
                        s[f] / z
                    };
                    *acc.get_mut(f).unwrap() += share;
                }
            }
            s = acc
                .into_iter()
                .map(|(f, a)| {
                    let n = occ[&f];
                    (f, a / n)
                })
                .collect();
            history.push(s.clone());
        }
        BruteForceMiner { history }
    }
}

// ---------------------------------------------------------------- checker

pub fn random_observed(rng: &mut impl Rng, lemma: &str) -> ObservedFrame {
    let funcs: Vec<SyntacticFunction> = SyntacticFunction::ALL
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.3))
        .collect();
    let slots = funcs
        .into_iter()
        .map(|f| (f, random_realization(rng)))
        .collect();
    let ctx = *Redistribution::ALL.choose(rng).unwrap();
    ObservedFrame::new(lemma, slots, ctx).unwrap()
}

/// Observed frame realizing every slot of `e` with its first realization.
pub fn full_observation(e: &LexicalEntry, ctx: Redistribution) -> ObservedFrame {
    ObservedFrame::new(
        e.lemma.clone(),
        e.frame
            .slots()
            .iter()
            .map(|s| (s.function, s.realizations.iter().next().unwrap().clone()))
            .collect(),
        ctx,
    )
    .unwrap()
}

pub fn random_corpus(
    rng: &mut impl Rng,
    lex: &Lexicon,
    sentences: usize,
) -> Vec<AnnotatedSentence> {
    let lemmas: Vec<String> = lex.lemmas().map(str::to_string).collect();
    (0..sentences)
        .map(|i| {
            let frames = (0..rng.random_range(1..=3))
                .map(|_| {
                    if rng.random_bool(0.1) || lemmas.is_empty() {
                        random_observed(rng, "inconnu")
                    } else {
                        let lemma = lemmas.choose(rng).unwrap();
                        let entries = lex.get(lemma).unwrap();
                        if rng.random_bool(0.5) {
                            let e = entries.choose(rng).unwrap();
                            full_observation(e, *Redistribution::ALL.choose(rng).unwrap())
                        } else {
                            random_observed(rng, lemma)
                        }
                    }
                })
                .collect();
            AnnotatedSentence {
                sentence_id: format!("s{i}"),
                frames,
            }
        })
        .collect()
}
