//! Python bindings: lexicons, merging, the frame checker, Passage scoring,
//! error mining and lemma frequencies.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use valence_core::checker::{diagnose_corpus, parse_corpus, parse_records, serialize_records};
use valence_core::freq::{parse_counts, parse_lemma_map, FrequencyTable};
use valence_core::lexicon as lx;
use valence_core::merge::{merge_lexicons, validation_queue};
use valence_core::mining::{self, MiningParams};
use valence_core::passage::{self, RelaxationMode, Score};
use valence_core::report::format_percent;

fn err(e: valence_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A validated valence lexicon.
#[pyclass(frozen)]
struct Lexicon {
    inner: lx::Lexicon,
}

#[pymethods]
impl Lexicon {
    /// Parses the tab-separated lexicon format.
    #[staticmethod]
    #[pyo3(signature = (text, name = "lexicon"))]
    fn parse(text: &str, name: &str) -> PyResult<Lexicon> {
        lx::parse_lexicon(name, text)
            .map(|inner| Lexicon { inner })
            .map_err(err)
    }

    fn to_tsv(&self) -> String {
        lx::serialize_lexicon(&self.inner)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn lemmas(&self) -> Vec<String> {
        self.inner.lemmas().map(str::to_string).collect()
    }

    /// Entry ids of `lemma`, empty when the lemma is absent.
    fn entry_ids(&self, lemma: &str) -> Vec<String> {
        self.inner
            .get(lemma)
            .map(|es| es.iter().map(|e| e.entry_id.clone()).collect())
            .unwrap_or_default()
    }

    /// `(lemma_count, entry_count, max_entries_per_lemma, [(lemma, entries)])`.
    #[pyo3(signature = (top_k = 10))]
    fn stats(&self, top_k: usize) -> (usize, usize, usize, Vec<(String, usize)>) {
        let s = lx::lexicon_stats(&self.inner, top_k);
        (
            s.lemma_count,
            s.entry_count,
            s.max_entries_per_lemma,
            s.most_ambiguous,
        )
    }

    fn __len__(&self) -> usize {
        self.inner.entry_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Lexicon({:?}, lemmas={}, entries={})",
            self.inner.name(),
            self.inner.lemma_count(),
            self.inner.entry_count()
        )
    }
}

/// Merges `other` into `reference`. Returns the merged lexicon, one
/// `(lemma, ref_count, other_count, merged_count, needs_validation)` row per
/// lemma, and the validation queue.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn merge(
    reference: &Lexicon,
    other: &Lexicon,
) -> (
    Lexicon,
    Vec<(String, usize, usize, usize, bool)>,
    Vec<String>,
) {
    let (merged, report) = merge_lexicons(&reference.inner, &other.inner);
    let rows = report
        .lemmas
        .iter()
        .map(|r| {
            (
                r.lemma.clone(),
                r.ref_count,
                r.other_count,
                r.merged_count,
                r.needs_validation,
            )
        })
        .collect();
    (Lexicon { inner: merged }, rows, validation_queue(&report))
}

/// Runs the frame checker over an annotated corpus. Returns the records in
/// their text format and the `(reason, count)` failure histogram.
#[pyfunction]
fn check(lexicon: &Lexicon, corpus: &str) -> PyResult<(String, Vec<(String, usize)>)> {
    let sentences = parse_corpus(corpus).map_err(err)?;
    let d = diagnose_corpus(&lexicon.inner, &sentences).map_err(err)?;
    let hist = d
        .histogram
        .iter()
        .map(|(r, n)| (r.as_str().to_string(), *n))
        .collect();
    Ok((serialize_records(&d.records), hist))
}

fn score_row(s: &Score) -> (u64, u64, u64, String, String, String) {
    (
        s.counts.true_positives,
        s.counts.gold,
        s.counts.hyp,
        format_percent(s.precision),
        format_percent(s.recall),
        format_percent(s.f_measure),
    )
}

/// Scores a hypothesis Passage document against the gold one. Returns
/// `[(kind, type, tp, gold, hyp, precision, recall, f)]` with `ALL` rows for
/// the aggregates; percentages are strings with two decimals.
#[pyfunction]
#[pyo3(signature = (gold, hyp, mode = "exact"))]
#[allow(clippy::type_complexity)]
fn evaluate(
    gold: &str,
    hyp: &str,
    mode: &str,
) -> PyResult<Vec<(String, String, u64, u64, u64, String, String, String)>> {
    let mode: RelaxationMode = mode.parse().map_err(err)?;
    let g = passage::parse_passage(gold).map_err(err)?;
    let h = passage::parse_passage(hyp).map_err(err)?;
    let scores = passage::score_corpus(&g, &h, mode).map_err(err)?;
    let row = |kind: &str, ty: &str, s: &Score| {
        let (tp, gn, hn, p, r, f) = score_row(s);
        (kind.to_string(), ty.to_string(), tp, gn, hn, p, r, f)
    };
    let mut out = Vec::new();
    for (t, s) in &scores.constituents.per_type {
        out.push(row("constituent", t.as_str(), s));
    }
    out.push(row("constituent", "ALL", &scores.constituents.aggregate));
    for (t, s) in &scores.relations.per_type {
        out.push(row("relation", t.as_str(), s));
    }
    out.push(row("relation", "ALL", &scores.relations.aggregate));
    Ok(out)
}

/// Ranks suspicious forms. Takes either the reference and hypothesis
/// records from `check`, or a ready-made mining corpus. Returns
/// `([(rank, form, score, failed_sentences)], iterations, converged)`.
#[pyfunction]
#[pyo3(signature = (ref_records = None, hyp_records = None, corpus = None, epsilon = 1e-9, max_iter = 200, top_k = 20))]
#[allow(clippy::type_complexity)]
fn mine(
    ref_records: Option<&str>,
    hyp_records: Option<&str>,
    corpus: Option<&str>,
    epsilon: f64,
    max_iter: usize,
    top_k: usize,
) -> PyResult<(Vec<(usize, String, f64, usize)>, usize, bool)> {
    let params = MiningParams::new(epsilon, max_iter).map_err(err)?;
    let corpus = match (ref_records, hyp_records, corpus) {
        (Some(r), Some(h), None) => {
            let r = parse_records(r).map_err(err)?;
            let h = parse_records(h).map_err(err)?;
            mining::build_mining_corpus(&r, &h).map_err(err)?
        }
        (None, None, Some(c)) => mining::parse_mining_corpus(c).map_err(err)?,
        _ => {
            return Err(PyValueError::new_err(
                "give either ref_records and hyp_records, or corpus",
            ))
        }
    };
    let result = mining::compute_suspicion(&corpus, &params).map_err(err)?;
    let ranked = mining::rank_suspects(&result.scores, top_k)
        .into_iter()
        .map(|r| {
            (
                r.rank,
                r.suspect.form,
                r.suspect.score,
                r.suspect.failed_sentences,
            )
        })
        .collect();
    Ok((ranked, result.iterations, result.converged))
}

/// The `n` most frequent lemmas and the number of unmapped form rows.
#[pyfunction]
#[pyo3(signature = (counts, lemma_map, n = 100))]
fn top_lemmas(counts: &str, lemma_map: &str, n: usize) -> PyResult<(Vec<(String, u64)>, usize)> {
    let table = FrequencyTable {
        counts: parse_counts(counts).map_err(err)?,
        lemma_of: parse_lemma_map(lemma_map).map_err(err)?,
    };
    let top = valence_core::freq::top_lemmas(&table, n);
    Ok((top.lemmas, top.unmapped_forms))
}

#[pymodule]
fn valence(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lexicon>()?;
    m.add_function(wrap_pyfunction!(merge, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(top_lemmas, m)?)?;
    Ok(())
}
