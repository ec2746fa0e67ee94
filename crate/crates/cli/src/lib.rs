//! Command-line front end: `aqa <subcommand> [flags]`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use aqa_core::dataset::{
    generate_dataset, read_questions, render_dataset, verify_dataset, DatasetConfig, Split,
};
use aqa_core::eval::{baseline_majority, baseline_random, read_predictions, score};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for failed checks and runtime errors.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for bad flags, subcommands or configuration.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the log filter (`warn` when unset).
pub const LOG_ENV: &str = "CLEAR_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "aqa",
    version,
    about = "Acoustic question answering dataset generator and evaluator"
)]
struct Cli {
    /// Log filter; overrides CLEAR_LOG.
    #[arg(long, global = true)]
    log_level: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compose scenes, generate questions and render audio and spectrograms.
    Generate(GenerateArgs),
    /// Compose scenes and generate questions only.
    Questions(GenerateArgs),
    /// Render audio and spectrograms for an existing dataset.
    Render(RenderArgs),
    /// Re-check a dataset with the brute-force oracle.
    Verify(VerifyArgs),
    /// Score a predictions file against gold questions.
    Evaluate(EvaluateArgs),
    /// Random and majority baselines on gold questions.
    Baselines(BaselineArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// JSON or TOML file with dataset settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenes: Option<usize>,
    #[arg(long)]
    questions_per_scene: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores); output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    no_audio: bool,
    #[arg(long)]
    no_spectrograms: bool,
    #[arg(long)]
    bank_manifest: Option<PathBuf>,
    /// Train, validation and test fractions, e.g. 0.7,0.15,0.15.
    #[arg(long, value_parser = parse_split)]
    split: Option<[f64; 3]>,
    #[arg(long)]
    cap_fraction: Option<f64>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Dataset directory.
    dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    no_audio: bool,
    #[arg(long)]
    no_spectrograms: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Dataset directory.
    dir: PathBuf,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Gold questions (JSON lines).
    #[arg(long)]
    gold: PathBuf,
    /// Predictions (JSON lines of {question_id, answer}).
    #[arg(long)]
    pred: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Gold questions to score (JSON lines).
    #[arg(long)]
    gold: PathBuf,
    /// Training questions for the majority baseline; defaults to
    /// questions_train.jsonl next to the gold file.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

fn parse_split(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected three fractions, got {}", p.len()))
}

/// Errors that map to the usage exit status.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn read_config_file(path: &Path) -> Result<DatasetConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"))
    {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| UsageError(format!("{}: {e}", path.display())).into())
}

impl GenerateArgs {
    /// File values, then flag overrides.
    fn effective_config(&self) -> Result<DatasetConfig> {
        let mut c = match &self.config {
            Some(p) => read_config_file(p)?,
            None => DatasetConfig::default(),
        };
        if let Some(v) = self.scenes {
            c.n_scenes = v;
        }
        if let Some(v) = self.questions_per_scene {
            c.questions_per_scene = v;
        }
        if let Some(v) = self.seed {
            c.master_seed = v;
        }
        if let Some(v) = &self.out {
            c.output_dir = v.clone();
        }
        if let Some(v) = self.workers {
            c.workers = v;
        }
        if self.no_audio {
            c.render_audio = false;
        }
        if self.no_spectrograms {
            c.render_spectrograms = false;
        }
        if let Some(v) = &self.bank_manifest {
            c.bank_manifest = Some(v.clone());
        }
        if let Some(v) = self.split {
            c.split_fractions = v;
        }
        if let Some(v) = self.cap_fraction {
            c.cap_fraction = v;
        }
        c.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(c)
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn cmd_generate(args: &GenerateArgs, symbolic_only: bool) -> Result<i32> {
    let mut config = args.effective_config()?;
    if symbolic_only {
        config.render_audio = false;
        config.render_spectrograms = false;
    }
    let manifest = generate_dataset(&config)?;
    for w in &manifest.warnings {
        log::warn!("{w}");
    }
    println!("effective config:");
    print_json(&manifest.config);
    for (split, c) in &manifest.counts {
        println!(
            "{:<6} {:>6} scenes {:>8} questions",
            split.as_str(),
            c.scenes,
            c.questions
        );
    }
    println!("dataset written to {}", config.output_dir.display());
    Ok(EXIT_OK)
}

fn cmd_render(args: &RenderArgs) -> Result<i32> {
    if args.no_audio && args.no_spectrograms {
        bail!(UsageError(
            "nothing to render with both --no-audio and --no-spectrograms".into()
        ));
    }
    let manifest = render_dataset(
        &args.dir,
        !args.no_audio,
        !args.no_spectrograms,
        args.workers,
    )?;
    println!(
        "rendered {} scenes; {} files in the manifest",
        manifest.splits.values().map(Vec::len).sum::<usize>(),
        manifest.digests.len()
    );
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let report = verify_dataset(&args.dir)?;
    if args.json {
        print_json(&report);
    } else {
        for v in &report.violations {
            let id = v
                .question_id
                .map_or_else(String::new, |q| format!(" question {q}"));
            println!("violation {:?}{id}: {}", v.kind, v.detail);
        }
        for w in &report.warnings {
            println!("warning: {w}");
        }
        println!(
            "{} scenes, {} questions, {} violations, {} warnings",
            report.n_scenes,
            report.n_questions,
            report.violations.len(),
            report.warnings.len()
        );
    }
    Ok(if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<i32> {
    let gold = read_questions(&args.gold)?;
    let predictions = read_predictions(&args.pred)?;
    let report = score(&predictions, &gold);
    print!("{}", report.to_table());
    print_json(&report);
    if let Some(path) = &args.report {
        let bytes = serde_json::to_vec_pretty(&report).expect("serializable");
        fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BaselineSummary {
    random_mean_accuracy: f64,
    random_trial_accuracies: Vec<f64>,
    majority_answer: String,
    majority_accuracy: f64,
    per_type_majority_accuracy: f64,
}

fn cmd_baselines(args: &BaselineArgs) -> Result<i32> {
    let gold = read_questions(&args.gold)?;
    let train_path = match &args.train {
        Some(p) => p.clone(),
        None => args.gold.with_file_name(Split::Train.questions_file()),
    };
    let train = read_questions(&train_path)?;
    let random =
        baseline_random(&gold, args.seed, args.trials).map_err(|e| UsageError(e.to_string()))?;
    let majority = baseline_majority(&train, &gold)?;
    println!(
        "random   {:>7.2}%  ({} trials)",
        100.0 * random.mean_accuracy,
        args.trials
    );
    println!(
        "majority {:>7.2}%  (always '{}')",
        100.0 * majority.report.overall_accuracy,
        majority.answer
    );
    println!(
        "majority per type {:>7.2}%",
        100.0 * majority.per_type_report.overall_accuracy
    );
    print_json(&BaselineSummary {
        random_mean_accuracy: random.mean_accuracy,
        random_trial_accuracies: random.trial_accuracies,
        majority_answer: majority.answer.to_string(),
        majority_accuracy: majority.report.overall_accuracy,
        per_type_majority_accuracy: majority.per_type_report.overall_accuracy,
    });
    Ok(EXIT_OK)
}

fn init_logging(level: Option<&str>) {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let mut builder = env_logger::Builder::from_env(env);
    if let Some(l) = level {
        builder.parse_filters(l);
    }
    // A second call (tests run `run` repeatedly) keeps the first logger.
    let _ = builder.try_init();
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.log_level.as_deref());
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, false),
        Command::Questions(a) => cmd_generate(a, true),
        Command::Render(a) => cmd_render(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Baselines(a) => cmd_baselines(a),
    };
    match result {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}
