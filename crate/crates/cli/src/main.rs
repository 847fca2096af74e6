//! `valence`: command-line front end for the lexicon workbench.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tempfile::NamedTempFile;

use valence_core::checker::{diagnose_corpus, parse_corpus, parse_records, serialize_records};
use valence_core::freq::{
    parse_counts, parse_lemma_map, top_lemmas, top_lemmas_tsv, FrequencyTable,
};
use valence_core::lexicon::{lexicon_stats, parse_lexicon, serialize_lexicon, Lexicon};
use valence_core::merge::{merge_lexicons, validation_queue};
use valence_core::mining::{
    build_mining_corpus, compute_suspicion, parse_mining_corpus, rank_suspects, suspects_tsv,
    MiningParams,
};
use valence_core::passage::{coverage, parse_passage, score_corpus, RelaxationMode};
use valence_core::report::RunManifest;

#[derive(Parser)]
#[command(name = "valence", version, about = "Valence lexicon workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Directory receiving the report files (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Lexicon validation and statistics.
    #[command(subcommand)]
    Lex(LexCommand),
    /// Merge a reference lexicon with a second one.
    Merge {
        reference: PathBuf,
        other: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Check which sentences of an annotated corpus a lexicon can analyze.
    Check {
        lexicon: PathBuf,
        corpus: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Score a hypothesis Passage file against a gold one.
    Eval {
        gold: PathBuf,
        hyp: PathBuf,
        #[arg(long, default_value = "exact")]
        mode: RelaxationMode,
        /// Row label in the summary table (defaults to the hyp file stem).
        #[arg(long)]
        label: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Rank the forms most likely responsible for failures.
    Mine {
        /// Records of the reference run (`check` output).
        #[arg(long = "ref", requires = "hyp", conflicts_with = "corpus")]
        reference: Option<PathBuf>,
        /// Records of the hypothesis run.
        #[arg(long, requires = "reference")]
        hyp: Option<PathBuf>,
        /// Ready-made mining corpus.
        #[arg(long, required_unless_present = "reference")]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[arg(long = "top-k", default_value_t = 20)]
        top_k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Most frequent lemmas from a form frequency table.
    Freq {
        counts: PathBuf,
        lemma_map: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum LexCommand {
    /// Validate a lexicon and write it back in normal form.
    Parse {
        lexicon: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Lemma and entry counts, most ambiguous lemmas first.
    Stats {
        lexicon: PathBuf,
        #[arg(long = "top-k", default_value_t = 10)]
        top_k: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))
}

/// Parses `path` with `parse`, prefixing errors with `file:line`.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> valence_core::Result<T>) -> Result<T> {
    let text = read(path)?;
    parse(&text).map_err(|e| match e.line() {
        Some(line) => anyhow::anyhow!("{}:{line}: {}", path.display(), e.root()),
        None => anyhow::anyhow!("{}: {e}", path.display()),
    })
}

fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "lexicon".into());
    load(path, |t| parse_lexicon(&name, t))
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial report.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .with_context(|| format!("{}: cannot create directory", dir.display()))?;
    let target = dir.join(name);
    let mut tmp =
        NamedTempFile::new_in(dir).with_context(|| format!("{}: cannot write", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(&target)
        .with_context(|| format!("{}: cannot write", target.display()))?;
    Ok(target)
}

fn manifest(command: &str, inputs: &[(&str, &Path)]) -> RunManifest {
    inputs
        .iter()
        .fold(RunManifest::new(command), |m, (role, p)| {
            m.input(*role, p.display().to_string())
        })
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    match cli.command {
        Command::Lex(LexCommand::Parse { lexicon, output }) => {
            let lex = load_lexicon(&lexicon)?;
            let header = manifest("lex parse", &[("lexicon", &lexicon)]).header();
            written.push(write_atomic(
                &output.out,
                "lexicon.tsv",
                &(header + &serialize_lexicon(&lex)),
            )?);
        }
        Command::Lex(LexCommand::Stats {
            lexicon,
            top_k,
            output,
        }) => {
            let lex = load_lexicon(&lexicon)?;
            let header = manifest("lex stats", &[("lexicon", &lexicon)]).header();
            written.push(write_atomic(
                &output.out,
                "stats.tsv",
                &lexicon_stats(&lex, top_k).to_tsv(&header),
            )?);
        }
        Command::Merge {
            reference,
            other,
            output,
        } => {
            let a = load_lexicon(&reference)?;
            let b = load_lexicon(&other)?;
            let (merged, report) = merge_lexicons(&a, &b);
            let header =
                manifest("merge", &[("reference", &reference), ("other", &other)]).header();
            written.push(write_atomic(
                &output.out,
                "merged.tsv",
                &(header.clone() + &serialize_lexicon(&merged)),
            )?);
            written.push(write_atomic(
                &output.out,
                "merge_report.tsv",
                &report.to_tsv(&header),
            )?);
            let mut queue = header + "#lemma\n";
            for lemma in validation_queue(&report) {
                queue.push_str(&lemma);
                queue.push('\n');
            }
            written.push(write_atomic(&output.out, "validation_queue.tsv", &queue)?);
        }
        Command::Check {
            lexicon,
            corpus,
            output,
        } => {
            let lex = load_lexicon(&lexicon)?;
            let sentences = load(&corpus, parse_corpus)?;
            let diagnosis =
                diagnose_corpus(&lex, &sentences).with_context(|| corpus.display().to_string())?;
            let mut header =
                manifest("check", &[("lexicon", &lexicon), ("corpus", &corpus)]).header();
            if let Ok(cov) = coverage(&diagnosis.records) {
                header.push_str(&format!(
                    "#coverage\t{}\t{}\t{}\n",
                    cov.count,
                    cov.total,
                    cov.percent()
                ));
            }
            written.push(write_atomic(
                &output.out,
                "records.tsv",
                &(header.clone() + &serialize_records(&diagnosis.records)),
            )?);
            written.push(write_atomic(
                &output.out,
                "histogram.tsv",
                &diagnosis.histogram_tsv(&header),
            )?);
        }
        Command::Eval {
            gold,
            hyp,
            mode,
            label,
            output,
        } => {
            let g = load(&gold, parse_passage)?;
            let h = load(&hyp, parse_passage)?;
            let scores = score_corpus(&g, &h, mode)?;
            let cov = coverage(&h).with_context(|| hyp.display().to_string())?;
            let label = label.unwrap_or_else(|| {
                hyp.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let mut m = manifest("eval", &[("gold", &gold), ("hyp", &hyp)]);
            m.mode = Some(mode);
            written.push(write_atomic(
                &output.out,
                "eval.tsv",
                &scores.to_tsv(&m.header(), &label, &cov),
            )?);
        }
        Command::Mine {
            reference,
            hyp,
            corpus,
            epsilon,
            max_iter,
            top_k,
            output,
        } => {
            let params = MiningParams::new(epsilon, max_iter)?;
            let (mining, m) = match (reference, hyp, corpus) {
                (Some(r), Some(h), None) => {
                    let rr = load(&r, parse_records)?;
                    let hr = load(&h, parse_records)?;
                    (
                        build_mining_corpus(&rr, &hr)?,
                        manifest("mine", &[("reference", &r), ("hyp", &h)]),
                    )
                }
                (None, None, Some(c)) => (
                    load(&c, parse_mining_corpus)?,
                    manifest("mine", &[("corpus", &c)]),
                ),
                _ => bail!("give either --ref and --hyp, or --corpus"),
            };
            if mining.failed_count() == 0 {
                eprintln!("warning: no failed sentence, every score is zero");
            }
            let result = compute_suspicion(&mining, &params)?;
            if !result.converged {
                eprintln!(
                    "warning: no convergence after {} iterations",
                    result.iterations
                );
            }
            let mut m = m;
            m.mining = Some(params);
            let mut header = m.header();
            header.push_str(&format!(
                "#sentences\t{}\n#failed\t{}\n#iterations\t{}\n#converged\t{}\n",
                mining.len(),
                mining.failed_count(),
                result.iterations,
                if result.converged { "yes" } else { "no" }
            ));
            let ranked = rank_suspects(&result.scores, top_k);
            written.push(write_atomic(
                &output.out,
                "suspects.tsv",
                &suspects_tsv(&header, &ranked),
            )?);
        }
        Command::Freq {
            counts,
            lemma_map,
            n,
            output,
        } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let table = FrequencyTable {
                counts: load(&counts, parse_counts)?,
                lemma_of: load(&lemma_map, parse_lemma_map)?,
            };
            let top = top_lemmas(&table, n);
            if top.unmapped_forms > 0 {
                eprintln!(
                    "warning: {} form rows have no lemma and were ignored",
                    top.unmapped_forms
                );
            }
            let header =
                manifest("freq", &[("counts", &counts), ("lemma_map", &lemma_map)]).header();
            written.push(write_atomic(
                &output.out,
                "top_lemmas.tsv",
                &top_lemmas_tsv(&header, &top),
            )?);
        }
    }
    Ok(written)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(written) => {
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("valence: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
