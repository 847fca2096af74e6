//! Comparative error mining.
//!
//! The corpus holds sentences that a reference lexicon analyzes; a sentence
//! is *failed* when the hypothesis lexicon does not. Every form gets a
//! suspicion score in `[0, 1]` computed as a fixed point of two coupled
//! equations:
//!
//! * local level: each failed sentence distributes one unit of blame over its
//!   occurrences, proportionally to the current score of their forms (evenly
//!   if all of them are at zero); occurrences in non-failed sentences get
//!   nothing;
//! * global level: the new score of a form is the mean blame over all of its
//!   occurrences in the corpus.
//!
//! Iteration starts from the raw failure rate of each form.

use std::collections::{BTreeMap, BTreeSet};

use crate::checker::{parse_status_line, SentenceRecord};
use crate::error::{Error, Result};
use crate::report::format_score;
use crate::text::{content_lines, is_atom};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningSentence {
    pub sentence_id: String,
    pub forms: Vec<String>,
    pub failed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiningCorpus {
    sentences: Vec<MiningSentence>,
}

impl MiningCorpus {
    pub fn new(sentences: Vec<MiningSentence>) -> Result<MiningCorpus> {
        let mut ids = BTreeSet::new();
        for s in &sentences {
            if !is_atom(&s.sentence_id) {
                return Err(Error::Syntax(format!(
                    "invalid sentence id `{}`",
                    s.sentence_id
                )));
            }
            if s.forms.is_empty() || s.forms.iter().any(|f| !is_atom(f)) {
                return Err(Error::Syntax(format!(
                    "sentence `{}` needs a non-empty list of forms",
                    s.sentence_id
                )));
            }
            if !ids.insert(s.sentence_id.as_str()) {
                return Err(Error::DuplicateSentenceId(s.sentence_id.clone()));
            }
        }
        Ok(MiningCorpus { sentences })
    }

    pub fn sentences(&self) -> &[MiningSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn failed_count(&self) -> usize {
        self.sentences.iter().filter(|s| s.failed).count()
    }
}

pub fn parse_mining_corpus(text: &str) -> Result<MiningCorpus> {
    let mut sentences = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in content_lines(text) {
        let (sentence_id, failed, forms) =
            parse_status_line(line).map_err(|e| e.at_line(lineno))?;
        if !seen.insert(sentence_id.clone()) {
            return Err(Error::DuplicateSentenceId(sentence_id).at_line(lineno));
        }
        sentences.push(MiningSentence {
            sentence_id,
            forms,
            failed,
        });
    }
    MiningCorpus::new(sentences)
}

pub fn serialize_mining_corpus(corpus: &MiningCorpus) -> String {
    let mut out = String::new();
    for s in &corpus.sentences {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.sentence_id,
            if s.failed { "failed" } else { "ok" },
            s.forms.join(",")
        ));
    }
    out
}

/// Keeps the sentences the reference lexicon analyzes; a kept sentence is
/// failed when the hypothesis lexicon does not analyze it.
pub fn build_mining_corpus(
    ref_records: &[SentenceRecord],
    hyp_records: &[SentenceRecord],
) -> Result<MiningCorpus> {
    let mut hyp: BTreeMap<&str, &SentenceRecord> = BTreeMap::new();
    for r in hyp_records {
        if hyp.insert(&r.sentence_id, r).is_some() {
            return Err(Error::DuplicateSentenceId(r.sentence_id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut sentences = Vec::new();
    for r in ref_records {
        if !seen.insert(r.sentence_id.as_str()) {
            return Err(Error::DuplicateSentenceId(r.sentence_id.clone()));
        }
        let h = hyp.get(r.sentence_id.as_str()).ok_or_else(|| {
            Error::RecordMismatch(format!("`{}` missing from hypothesis run", r.sentence_id))
        })?;
        if h.forms != r.forms {
            return Err(Error::RecordMismatch(format!(
                "forms of `{}` differ between runs",
                r.sentence_id
            )));
        }
        if r.analyzable {
            sentences.push(MiningSentence {
                sentence_id: r.sentence_id.clone(),
                forms: r.forms.clone(),
                failed: !h.analyzable,
            });
        }
    }
    if let Some(extra) = hyp.keys().find(|id| !seen.contains(*id)) {
        return Err(Error::RecordMismatch(format!(
            "`{extra}` missing from reference run"
        )));
    }
    MiningCorpus::new(sentences)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    /// Stop once no score moves by this much or more.
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl MiningParams {
    pub fn new(epsilon: f64, max_iterations: usize) -> Result<MiningParams> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(MiningParams {
            epsilon,
            max_iterations,
        })
    }
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            epsilon: 1e-9,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuspicionScore {
    pub form: String,
    pub score: f64,
    /// Occurrences of the form in the whole corpus.
    pub occurrences: usize,
    /// Failed sentences containing the form.
    pub failed_sentences: usize,
    /// First failed sentence (by id) containing the form.
    pub sample_sentence_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult {
    /// One score per form, in form order.
    pub scores: Vec<SuspicionScore>,
    pub iterations: usize,
    pub converged: bool,
}

/// One update of the fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub scores: Vec<f64>,
    /// Blame handed out by each failed sentence, in solver sentence order.
    pub sentence_mass: Vec<f64>,
}

/// Precomputed occurrence structure of a corpus. Sentences are taken in id
/// order and forms in lexicographic order, which fixes the summation order.
#[derive(Debug, Clone)]
pub struct SuspicionSolver {
    forms: Vec<String>,
    occurrences: Vec<usize>,
    failed_occurrences: Vec<usize>,
    failed_sentences: Vec<usize>,
    samples: Vec<Option<String>>,
    /// Form indices of each failed sentence.
    failed: Vec<Vec<usize>>,
}

impl SuspicionSolver {
    pub fn new(corpus: &MiningCorpus) -> Result<SuspicionSolver> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut sentences: Vec<&MiningSentence> = corpus.sentences.iter().collect();
        sentences.sort_by(|a, b| a.sentence_id.cmp(&b.sentence_id));
        let forms: Vec<String> = sentences
            .iter()
            .flat_map(|s| s.forms.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&str, usize> = forms
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();

        let n = forms.len();
        let mut solver = SuspicionSolver {
            occurrences: vec![0; n],
            failed_occurrences: vec![0; n],
            failed_sentences: vec![0; n],
            samples: vec![None; n],
            failed: Vec::new(),
            forms: Vec::new(),
        };
        for s in sentences {
            let ids: Vec<usize> = s.forms.iter().map(|f| index[f.as_str()]).collect();
            for &i in &ids {
                solver.occurrences[i] += 1;
            }
            if s.failed {
                for &i in &ids {
                    solver.failed_occurrences[i] += 1;
                }
                for i in ids.iter().copied().collect::<BTreeSet<_>>() {
                    solver.failed_sentences[i] += 1;
                    if solver.samples[i].is_none() {
                        solver.samples[i] = Some(s.sentence_id.clone());
                    }
                }
                solver.failed.push(ids);
            }
        }
        solver.forms = forms;
        Ok(solver)
    }

    pub fn forms(&self) -> &[String] {
        &self.forms
    }

    pub fn occurrences(&self) -> &[usize] {
        &self.occurrences
    }

    /// Failure rate of every form: failed occurrences over all occurrences.
    pub fn initial_scores(&self) -> Vec<f64> {
        self.failed_occurrences
            .iter()
            .zip(&self.occurrences)
            .map(|(&f, &n)| f as f64 / n as f64)
            .collect()
    }

    pub fn step(&self, scores: &[f64]) -> Step {
        let mut blame = vec![0.0; self.forms.len()];
        let mut sentence_mass = Vec::with_capacity(self.failed.len());
        for ids in &self.failed {
            let total: f64 = ids.iter().map(|&i| scores[i]).sum();
            let mut mass = 0.0;
            for &i in ids {
                let local = if total > 0.0 {
                    scores[i] / total
                } else {
                    1.0 / ids.len() as f64
                };
                blame[i] += local;
                mass += local;
            }
            sentence_mass.push(mass);
        }
        let scores = blame
            .iter()
            .zip(&self.occurrences)
            .map(|(&b, &n)| b / n as f64)
            .collect();
        Step {
            scores,
            sentence_mass,
        }
    }

    pub fn solve(&self, params: &MiningParams) -> MiningResult {
        let mut scores = self.initial_scores();
        let mut iterations = 0;
        let mut converged = false;
        while iterations < params.max_iterations {
            let next = self.step(&scores).scores;
            let delta = next
                .iter()
                .zip(&scores)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            scores = next;
            iterations += 1;
            if delta < params.epsilon {
                converged = true;
                break;
            }
        }
        MiningResult {
            scores: self.finish(&scores),
            iterations,
            converged,
        }
    }

    fn finish(&self, scores: &[f64]) -> Vec<SuspicionScore> {
        (0..self.forms.len())
            .map(|i| SuspicionScore {
                form: self.forms[i].clone(),
                score: scores[i],
                occurrences: self.occurrences[i],
                failed_sentences: self.failed_sentences[i],
                sample_sentence_id: self.samples[i].clone(),
            })
            .collect()
    }
}

pub fn compute_suspicion(corpus: &MiningCorpus, params: &MiningParams) -> Result<MiningResult> {
    Ok(SuspicionSolver::new(corpus)?.solve(params))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedSuspect {
    pub rank: usize,
    pub suspect: SuspicionScore,
}

/// The `top_k` most suspicious forms: score descending, then failed
/// sentence count descending, then form.
pub fn rank_suspects(scores: &[SuspicionScore], top_k: usize) -> Vec<RankedSuspect> {
    let mut sorted: Vec<&SuspicionScore> = scores.iter().collect();
    sorted.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.failed_sentences.cmp(&a.failed_sentences))
            .then_with(|| a.form.cmp(&b.form))
    });
    sorted
        .into_iter()
        .take(top_k)
        .enumerate()
        .map(|(i, s)| RankedSuspect {
            rank: i + 1,
            suspect: s.clone(),
        })
        .collect()
}

/// `rank form score failed_sentences sample_sentence_id`, scores with six
/// decimals, `-` when no failed sentence contains the form.
pub fn suspects_tsv(header: &str, ranked: &[RankedSuspect]) -> String {
    let mut out = String::from(header);
    out.push_str("#rank\tform\tscore\tfailed_sentences\tsample_sentence_id\n");
    for r in ranked {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.rank,
            r.suspect.form,
            format_score(r.suspect.score),
            r.suspect.failed_sentences,
            r.suspect.sample_sentence_id.as_deref().unwrap_or("-")
        ));
    }
    out
}
