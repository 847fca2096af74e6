use super::Lexicon;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatsReport {
    pub lemma_count: usize,
    pub entry_count: usize,
    pub max_entries_per_lemma: usize,
    /// Most ambiguous lemmas with their entry counts.
    pub most_ambiguous: Vec<(String, usize)>,
}

impl StatsReport {
    /// `key value` summary rows followed by the ranked ambiguous lemmas.
    pub fn to_tsv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str(&format!(
            "lemmas\t{}\nentries\t{}\nmax_entries_per_lemma\t{}\n",
            self.lemma_count, self.entry_count, self.max_entries_per_lemma
        ));
        out.push_str("#rank\tlemma\tentries\n");
        for (i, (lemma, n)) in self.most_ambiguous.iter().enumerate() {
            out.push_str(&format!("{}\t{lemma}\t{n}\n", i + 1));
        }
        out
    }
}

pub fn lexicon_stats(lex: &Lexicon, top_k: usize) -> StatsReport {
    let mut counts: Vec<(String, usize)> = lex
        .iter()
        .map(|(lemma, entries)| (lemma.to_string(), entries.len()))
        .collect();
    let max = counts.iter().map(|(_, n)| *n).max().unwrap_or(0);
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    counts.truncate(top_k);
    StatsReport {
        lemma_count: lex.lemma_count(),
        entry_count: lex.entry_count(),
        max_entries_per_lemma: max,
        most_ambiguous: counts,
    }
}
