mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use valence_core::lexicon::{
    base_signature, lexicon_stats, oblique_signature, parse_lexicon, serialize_lexicon,
};

proptest! {
    #[test]
    fn serialization_round_trips(seed in any::<u64>(), lemmas in 0usize..40) {
        let mut rng = common::rng(seed);
        let lex = common::random_lexicon(&mut rng, "rt", lemmas, 4);
        let text = serialize_lexicon(&lex);
        let back = parse_lexicon("rt", &text).unwrap();
        prop_assert_eq!(&back, &lex);
        prop_assert_eq!(serialize_lexicon(&back), text);
    }

    #[test]
    fn signatures_partition_frame(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let lex = common::random_lexicon(&mut rng, "sig", 10, 3);
        for e in lex.entries() {
            let base = base_signature(e);
            let obl = oblique_signature(e);
            prop_assert!(base.is_disjoint(&obl));
            let union: std::collections::BTreeSet<_> = base.union(&obl).copied().collect();
            prop_assert_eq!(union, e.frame.functions());
        }
    }
}

#[test]
fn hundred_entry_lexicon_reaches_fixpoint() {
    let mut rng = common::rng(7);
    let lex = common::random_lexicon(&mut rng, "big", 40, 5);
    assert!(lex.entry_count() >= 100, "{}", lex.entry_count());
    let once = serialize_lexicon(&lex);
    let twice = serialize_lexicon(&parse_lexicon("big", &once).unwrap());
    assert_eq!(once, twice);
}

#[test]
fn stats_match_recount() {
    let mut rng = common::rng(11);
    let lex = common::random_lexicon(&mut rng, "stats", 50, 6);
    let text = serialize_lexicon(&lex);

    // recount from the serialized text
    let mut per_lemma: BTreeMap<&str, usize> = BTreeMap::new();
    for line in text.lines() {
        *per_lemma
            .entry(line.split('\t').next().unwrap())
            .or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> =
        per_lemma.iter().map(|(l, n)| (l.to_string(), *n)).collect();
    ranked.sort_by(|a, b| (std::cmp::Reverse(a.1), &a.0).cmp(&(std::cmp::Reverse(b.1), &b.0)));

    let stats = lexicon_stats(&lex, 5);
    assert_eq!(stats.lemma_count, per_lemma.len());
    assert_eq!(stats.entry_count, text.lines().count());
    assert_eq!(
        stats.max_entries_per_lemma,
        *per_lemma.values().max().unwrap()
    );
    assert_eq!(stats.most_ambiguous, ranked[..5].to_vec());
}
