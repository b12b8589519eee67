mod manifest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pertok::corpus::{
    corpus_stats, emit_token_lines, gen_fixture_with_truth, read_dependency_file, write_dependency_file,
    write_evaluation_pair, CorpusStats, DEFAULT_TOKEN_COLUMN,
};
use pertok::eval::{align_files, compare_rows, metrics, render, AlignMode, Format, MetricsRow};
use pertok::lexicon::{load_lexicon, Lexicon};
use pertok::tokenize::{Pipeline, PipelineSpec};
use pertok::Error;

use manifest::{now, RunManifest};

const LEXICON_ENV: &str = "PERTOK_LEXICON_DIR";

#[derive(Debug, Parser)]
#[command(name = "pertok", version, about = "Persian tokenizer pipelines and tokenization scoring")]
struct Cli {
    /// Lexicon directory; the bundled starter lexicon is used when unset.
    #[arg(long, global = true, env = LEXICON_ENV)]
    lexicon_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a dependency treebank into gold token lines and space-corrupted input text.
    Prepare {
        dataset: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// 1-based column holding the word form.
        #[arg(long, default_value_t = DEFAULT_TOKEN_COLUMN)]
        token_column: usize,
    },
    /// Run a tokenizer pipeline over text, one sentence per line.
    Tokenize {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Preset name, `stage+stage+...`, or a pipeline spec file.
        #[arg(long, default_value = "baseline")]
        pipeline: String,
        /// Where to write the run manifest; defaults to `<out>.manifest.json`.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Recorded in the manifest.
        #[arg(long)]
        seed: Option<u64>,
        /// Process lines on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Score system token lines against gold token lines.
    Evaluate {
        gold: PathBuf,
        sys: PathBuf,
        #[arg(long)]
        name: Option<String>,
        /// Time to report; defaults to the wall time in the system file's manifest, if any.
        #[arg(long)]
        time: Option<f64>,
        #[command(flatten)]
        scoring: Scoring,
    },
    /// Score several runs and report errors fixed against a baseline run.
    Compare {
        gold: PathBuf,
        /// `NAME=PATH`, repeatable.
        #[arg(long = "run", required = true, value_parser = parse_run)]
        runs: Vec<(String, PathBuf)>,
        #[arg(long)]
        baseline: String,
        #[command(flatten)]
        scoring: Scoring,
    },
    /// Generate a synthetic treebank with its gold lines, input text and truth.
    GenFixture {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        sentences: usize,
        #[arg(long, default_value_t = 0.3)]
        multiword_rate: f64,
    },
}

#[derive(Debug, Args)]
struct Scoring {
    #[arg(long, default_value = "strict")]
    mode: AlignMode,
    #[arg(long, default_value = "table")]
    format: Format,
}

fn parse_run(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CmdResult = Result<(), Failure>;

fn require_file(path: &Path) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{}: no such file", path.display())))
    }
}

fn write_out(text: &str) -> CmdResult {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Runtime(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }))
}

fn stats_block(stats: &CorpusStats) -> String {
    let rows = stats.rows();
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn lexicon(dir: Option<&Path>) -> pertok::Result<Lexicon> {
    match dir {
        Some(d) => load_lexicon(d),
        None => Ok(Lexicon::starter()),
    }
}

/// A preset, an inline stage list, or a spec file. The lexicon directory from the command line
/// (or environment) applies when the spec does not name one.
fn resolve_pipeline(arg: &str, lexicon_dir: Option<&Path>) -> Result<PipelineSpec, Failure> {
    let path = Path::new(arg);
    let mut spec = if path.is_file() {
        PipelineSpec::load(path)?
    } else {
        PipelineSpec::from_name(arg).map_err(|e| Failure::Usage(format!("--pipeline {arg}: {e}")))?
    };
    if spec.lexicon_dir.is_none() {
        spec.lexicon_dir = lexicon_dir.map(Path::to_path_buf);
    }
    Ok(spec)
}

fn sys_time(sys: &Path) -> Option<f64> {
    RunManifest::read(&RunManifest::default_path(sys)).map(|m| m.wall_s)
}

fn score(gold: &Path, sys: &Path, name: &str, time: Option<f64>, mode: AlignMode) -> pertok::Result<MetricsRow> {
    let counts = align_files(gold, sys, mode)?;
    Ok(metrics(counts, name, time.or_else(|| sys_time(sys))))
}

fn report(rows: &[MetricsRow], format: Format) -> CmdResult {
    write_out(&render(rows, format)?)?;
    for row in rows {
        for w in &row.warnings {
            eprintln!("warning: {}: {w}", row.name);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let lexicon_dir = cli.lexicon_dir.as_deref();
    match cli.command {
        Command::Prepare {
            dataset,
            out_dir,
            token_column,
        } => {
            require_file(&dataset)?;
            let gold = read_dependency_file(&dataset, token_column)?;
            let (gold_path, input_path) = write_evaluation_pair(&gold, &out_dir)?;
            let stats = corpus_stats(&gold)?;
            write_out(&format!(
                "{}\ngold:  {}\ninput: {}\n",
                stats_block(&stats),
                gold_path.display(),
                input_path.display()
            ))
        }
        Command::Tokenize {
            input,
            out,
            pipeline,
            manifest,
            seed,
            parallel,
        } => {
            require_file(&input)?;
            let spec = resolve_pipeline(&pipeline, lexicon_dir)?;
            let pipeline = Pipeline::build(&spec)?;
            let text = fs::read_to_string(&input).map_err(|e| Error::Io {
                path: input.clone(),
                source: e,
            })?;
            let started_at = now();
            let output = if parallel {
                pipeline.run_parallel(&text)
            } else {
                pipeline.run(&text)
            };
            emit_token_lines(&out, output.stream.sentences())?;
            let n_sentences = output.stream.sentences().count();
            let m = RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                spec_text: spec.to_string(),
                lexicon_dir: spec.lexicon_dir.clone(),
                spec,
                input,
                output: out.clone(),
                seed,
                parallel,
                started_at,
                finished_at: now(),
                stage_timings: RunManifest::stage_times(&output.timings),
                stage_total_s: output.timings.total().as_secs_f64(),
                wall_s: output.wall.as_secs_f64(),
                n_sentences,
                n_tokens: output.stream.len(),
            };
            let manifest_path = manifest.unwrap_or_else(|| RunManifest::default_path(&out));
            let json = serde_json::to_string_pretty(&m).expect("manifest serializes");
            fs::write(&manifest_path, json + "\n").map_err(|e| Error::Io {
                path: manifest_path.clone(),
                source: e,
            })?;
            eprintln!(
                "{} tokens in {:.3}s; manifest {}",
                m.n_tokens,
                m.wall_s,
                manifest_path.display()
            );
            Ok(())
        }
        Command::Evaluate {
            gold,
            sys,
            name,
            time,
            scoring,
        } => {
            require_file(&gold)?;
            require_file(&sys)?;
            let name = name.unwrap_or_else(|| {
                sys.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "system".into())
            });
            let row = score(&gold, &sys, &name, time, scoring.mode)?;
            report(&[row], scoring.format)
        }
        Command::Compare {
            gold,
            runs,
            baseline,
            scoring,
        } => {
            require_file(&gold)?;
            for (_, path) in &runs {
                require_file(path)?;
            }
            let mut names: Vec<&str> = runs.iter().map(|(n, _)| n.as_str()).collect();
            names.sort_unstable();
            if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
                return Err(Failure::Usage(format!("duplicate run name `{}`", w[0])));
            }
            if !names.contains(&baseline.as_str()) {
                return Err(Failure::Usage(format!("baseline `{baseline}` is not among the runs")));
            }
            let rows = runs
                .iter()
                .map(|(name, path)| score(&gold, path, name, None, scoring.mode))
                .collect::<pertok::Result<Vec<_>>>()?;
            report(&compare_rows(rows, &baseline)?, scoring.format)
        }
        Command::GenFixture {
            out_dir,
            seed,
            sentences,
            multiword_rate,
        } => {
            let lex = lexicon(lexicon_dir)?;
            let fixture = gen_fixture_with_truth(seed, sentences, &lex, multiword_rate)?;
            let (gold_path, input_path) = write_evaluation_pair(&fixture.corpus, &out_dir)?;
            let treebank = out_dir.join("fixture.conllu");
            write_dependency_file(&fixture.corpus, &treebank)?;
            let truth_path = out_dir.join("truth.json");
            let truth = serde_json::to_string_pretty(&fixture.truth).expect("truth serializes");
            fs::write(&truth_path, truth + "\n").map_err(|e| Error::Io {
                path: truth_path.clone(),
                source: e,
            })?;
            let stats = corpus_stats(&fixture.corpus)?;
            write_out(&format!(
                "{}\ntreebank: {}\ngold:     {}\ninput:    {}\ntruth:    {}\n",
                stats_block(&stats),
                treebank.display(),
                gold_path.display(),
                input_path.display(),
                truth_path.display()
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
