//! `dygad`: generate benchmark sequences, extract features, score sequences
//! with the proposed detector or a baseline, and run the benchmark
//! experiments end to end.
//!
//! Every command is deterministic given its flags: the same invocation
//! writes byte-identical files. Exit codes: 0 on success, 2 for usage and
//! configuration problems, 1 for runtime failures such as unreadable or
//! malformed files.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dygad_core::features::extract_sequence;
use dygad_core::generators::{make_baseline_sequence, make_experiment_sequence};
use dygad_core::{
    auc, baselines, detect, run_experiment, DetectConfig, ExperimentId, SequenceSpec,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Flag combinations or values that cannot be acted on.
    #[error("{0}")]
    Config(String),
    /// I/O failures and malformed input files.
    #[error("{0}")]
    Runtime(String),
}

#[derive(Parser)]
#[command(name = "dygad", version, about = "Anomaly detection in dynamic graph sequences")]
struct Cli {
    /// Optional defaults file with `key = value` lines; flags win over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark sequence plus its labels file.
    Generate(GenerateArgs),
    /// Extract the per-snapshot feature matrix from a sequence.
    Features(FeaturesArgs),
    /// Score a sequence with the proposed detector.
    Detect(DetectArgs),
    /// Score a sequence with one of the comparison detectors.
    Baseline(BaselineArgs),
    /// Run one benchmark experiment across all settings and repeats.
    Experiment(ExperimentArgs),
    /// Compute AUC from a scores file and a labels file.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Benchmark recipe, 1 to 4.
    #[arg(long)]
    experiment: u8,
    /// Anomaly strength; must be one of the recipe's settings.
    #[arg(long = "p-star")]
    p_star: f64,
    /// Stream seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of snapshots; the anomaly lands halfway.
    #[arg(long)]
    length: Option<usize>,
    /// Vertices per snapshot.
    #[arg(long)]
    vertices: Option<usize>,
    /// Generate the base process only, without the planted anomaly.
    #[arg(long)]
    no_anomaly: bool,
    /// Output sequence path (JSON Lines).
    #[arg(long)]
    out: PathBuf,
    /// Labels CSV path; defaults to the sequence path with `.labels.csv`.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Input sequence (JSON Lines).
    #[arg(long)]
    input: PathBuf,
    /// Output feature CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Input sequence (JSON Lines).
    #[arg(long)]
    input: PathBuf,
    /// Output scores CSV.
    #[arg(long)]
    scores: PathBuf,
    /// Optional CSV with the fitted per-feature models and the tail fit.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Classification threshold in [0, 1].
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct BaselineArgs {
    /// Input sequence (JSON Lines).
    #[arg(long)]
    input: PathBuf,
    /// One of: lad, lad_diff, tensorsplat.
    #[arg(long)]
    method: String,
    /// Singular values kept per snapshot by the lad methods.
    #[arg(long = "lad-k")]
    lad_k: Option<usize>,
    /// Context window of the lad methods, in past snapshots.
    #[arg(long = "lad-window")]
    lad_window: Option<usize>,
    /// Output scores CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Benchmark recipe, 1 to 4.
    #[arg(long)]
    experiment: u8,
    /// Sequences per setting.
    #[arg(long)]
    repeats: Option<usize>,
    /// Base seed the per-run streams are derived from.
    #[arg(long)]
    seed: Option<u64>,
    /// Output results CSV, one row per (setting, seed, method).
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV with five-number summaries per (setting, method).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Scores CSV; any file with a `score` column works.
    #[arg(long)]
    scores: PathBuf,
    /// Labels CSV with a 0/1 `label` column.
    #[arg(long)]
    labels: PathBuf,
}

/// Defaults read from `--config`. Only keys that map onto flags are
/// accepted, so typos fail loudly instead of being ignored.
#[derive(Default)]
struct FileDefaults {
    threshold: Option<f64>,
    repeats: Option<usize>,
    seed: Option<u64>,
    length: Option<usize>,
    vertices: Option<usize>,
}

fn load_defaults(path: Option<&Path>) -> Result<FileDefaults, CliError> {
    let Some(path) = path else {
        return Ok(FileDefaults::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let mut defaults = FileDefaults::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}: line {}: expected `key = value`",
                path.display(),
                i + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |what: &str| {
            CliError::Config(format!(
                "{}: line {}: `{value}` is not a valid {what}",
                path.display(),
                i + 1
            ))
        };
        match key {
            "threshold" => defaults.threshold = Some(value.parse().map_err(|_| parse_err("number"))?),
            "repeats" => defaults.repeats = Some(value.parse().map_err(|_| parse_err("count"))?),
            "seed" => defaults.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
            "length" => defaults.length = Some(value.parse().map_err(|_| parse_err("length"))?),
            "vertices" => defaults.vertices = Some(value.parse().map_err(|_| parse_err("count"))?),
            other => {
                return Err(CliError::Config(format!(
                    "{}: line {}: unknown key `{other}`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(defaults)
}

/// Caps the worker pool when `DYGAD_THREADS` is set.
fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("DYGAD_THREADS") {
        Ok(value) => {
            let n: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::Config(format!(
                    "DYGAD_THREADS must be a positive integer, found `{value}`"
                ))
            })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Config(format!("DYGAD_THREADS: {e}"))),
    }
}

fn parse_experiment(index: u8) -> Result<ExperimentId, CliError> {
    ExperimentId::from_index(index)
        .ok_or_else(|| CliError::Config(format!("experiment must be 1 to 4, found {index}")))
}

fn generate(args: GenerateArgs, defaults: &FileDefaults) -> Result<(), CliError> {
    let experiment = parse_experiment(args.experiment)?;
    let seed = args.seed.or(defaults.seed).ok_or_else(|| {
        CliError::Config("generate needs --seed (or `seed` in the config file)".into())
    })?;
    let mut spec = SequenceSpec::new(experiment, args.p_star, seed);
    if let Some(t_len) = args.length.or(defaults.length) {
        spec.t_len = t_len;
        spec.anomaly_time = (t_len / 2).max(1);
    }
    if let Some(n) = args.vertices.or(defaults.vertices) {
        spec.n = n;
    }
    let sequence = if args.no_anomaly {
        make_baseline_sequence(&spec)
    } else {
        make_experiment_sequence(&spec)
    }
    .map_err(|e| CliError::Config(e.to_string()))?;

    io::write_sequence(&args.out, &sequence.graphs)?;
    let labels_path = args
        .labels
        .unwrap_or_else(|| args.out.with_extension("labels.csv"));
    io::write_labels(&labels_path, &sequence.labels)
}

fn features(args: FeaturesArgs) -> Result<(), CliError> {
    let graphs = io::read_sequence(&args.input)?;
    io::write_features(&args.out, &extract_sequence(&graphs))
}

fn run_detect(args: DetectArgs, defaults: &FileDefaults) -> Result<(), CliError> {
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.95);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(CliError::Config(format!(
            "threshold must be in [0, 1], found {threshold}"
        )));
    }
    let graphs = io::read_sequence(&args.input)?;
    let config = DetectConfig {
        classification_threshold: threshold,
    };
    let detection = detect(&graphs, &config).map_err(|e| CliError::Config(e.to_string()))?;
    io::write_scores(
        &args.scores,
        &detection.v,
        &detection.scores,
        &detection.flagged,
    )?;
    if let Some(path) = &args.diagnostics {
        io::write_diagnostics(path, &detection.diagnostics)?;
    }
    Ok(())
}

fn baseline(args: BaselineArgs) -> Result<(), CliError> {
    let graphs = io::read_sequence(&args.input)?;
    let mut lad_config = baselines::LadConfig::default();
    if let Some(k) = args.lad_k {
        if k == 0 {
            return Err(CliError::Config("lad-k must be at least 1".into()));
        }
        lad_config.k = k;
    }
    if let Some(window) = args.lad_window {
        if window < 2 {
            return Err(CliError::Config("lad-window must be at least 2".into()));
        }
        lad_config.window = window;
    }
    let scores = match args.method.as_str() {
        "lad" => baselines::lad_scores(&graphs, &lad_config).z,
        "lad_diff" => baselines::lad_scores(&graphs, &lad_config).z_diff,
        "tensorsplat" => baselines::tensorsplat_scores(&graphs),
        other => {
            return Err(CliError::Config(format!(
                "unknown method `{other}`; use lad, lad_diff or tensorsplat"
            )))
        }
    };
    let flagged = vec![false; scores.len()];
    io::write_scores(&args.out, &scores, &scores, &flagged)
}

fn experiment(args: ExperimentArgs, defaults: &FileDefaults) -> Result<(), CliError> {
    let id = parse_experiment(args.experiment)?;
    let repeats = args.repeats.or(defaults.repeats).unwrap_or(10);
    let base_seed = args.seed.or(defaults.seed).unwrap_or(0);
    let result = run_experiment(id, repeats, base_seed);
    io::write_results(&args.out, id, &result.records)?;
    if let Some(path) = &args.summary {
        io::write_summary(path, id, &result.summaries)?;
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let scores = io::read_scores(&args.scores)?;
    let labels = io::read_labels(&args.labels)?;
    let value = auc(&scores, &labels).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{value}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    let defaults = load_defaults(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(args) => generate(args, &defaults),
        Command::Features(args) => features(args),
        Command::Detect(args) => run_detect(args, &defaults),
        Command::Baseline(args) => baseline(args),
        Command::Experiment(args) => experiment(args, &defaults),
        Command::Eval(args) => eval(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}
