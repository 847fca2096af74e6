//! Lemma frequencies from a table of inflected-form counts.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::text::content_lines;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    pub counts: Vec<(String, u64)>,
    pub lemma_of: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopLemmas {
    pub lemmas: Vec<(String, u64)>,
    /// Count rows whose form has no lemma in the map.
    pub unmapped_forms: usize,
}

/// `form<TAB>count` lines. Repeated forms are summed by [`top_lemmas`].
pub fn parse_counts(text: &str) -> Result<Vec<(String, u64)>> {
    content_lines(text)
        .map(|(lineno, line)| {
            let (form, count) = two_fields(line).map_err(|e| e.at_line(lineno))?;
            let count = count.parse::<u64>().map_err(|_| {
                Error::Syntax(format!("count `{count}` is not a non-negative integer"))
                    .at_line(lineno)
            })?;
            Ok((form.to_string(), count))
        })
        .collect()
}

/// `form<TAB>lemma` lines; a form may appear only once.
pub fn parse_lemma_map(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let (form, lemma) = two_fields(line).map_err(|e| e.at_line(lineno))?;
        if map.insert(form.to_string(), lemma.to_string()).is_some() {
            return Err(Error::DuplicateForm(form.to_string()).at_line(lineno));
        }
    }
    Ok(map)
}

fn two_fields(line: &str) -> Result<(&str, &str)> {
    match line.split('\t').collect::<Vec<_>>()[..] {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a, b)),
        _ => Err(Error::Syntax(
            "expected two non-empty tab-separated fields".into(),
        )),
    }
}

pub fn top_lemmas(freq: &FrequencyTable, n: usize) -> TopLemmas {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    let mut unmapped_forms = 0;
    for (form, count) in &freq.counts {
        match freq.lemma_of.get(form) {
            Some(lemma) => *totals.entry(lemma).or_default() += count,
            None => unmapped_forms += 1,
        }
    }
    let mut lemmas: Vec<(String, u64)> = totals
        .into_iter()
        .map(|(l, c)| (l.to_string(), c))
        .collect();
    lemmas.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    lemmas.truncate(n);
    TopLemmas {
        lemmas,
        unmapped_forms,
    }
}

pub fn top_lemmas_tsv(header: &str, top: &TopLemmas) -> String {
    let mut out = String::from(header);
    out.push_str("#rank\tlemma\tfrequency\n");
    for (i, (lemma, count)) in top.lemmas.iter().enumerate() {
        out.push_str(&format!("{}\t{lemma}\t{count}\n", i + 1));
    }
    out
}
