//! Command-line front end: ingest, generate, train, eval and report.

mod commands;
mod error;
mod files;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gclda::Mode;

use commands::{eval, generate, ingest, report, train};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "gclda", version, about = "Temporal topic model with covariate-driven topic shifts")]
struct Cli {
    /// Worker threads for parallel stages; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Gclda,
    Lda,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Gclda => Mode::Gclda,
            ModeArg::Lda => Mode::Lda,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a corpus artifact from JSONL documents and a covariate CSV.
    Ingest {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        covariates: PathBuf,
        #[arg(long, default_value_t = 2000)]
        vocab_size: usize,
        /// month or day
        #[arg(long, default_value = "month")]
        period: String,
        /// File of `label,timestamp` period boundaries; overrides --period.
        #[arg(long)]
        boundaries: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        stem: bool,
        #[arg(long)]
        no_standardize: bool,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Draw a synthetic corpus and its ground truth from a JSON spec.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a train/test split with this test fraction.
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Run the sampler, writing checkpoints, diagnostics and retained samples.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "gclda")]
        mode: ModeArg,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
        /// Checkpoint and exit once this many sweeps have run.
        #[arg(long)]
        stop_after: Option<usize>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Held-out perplexity of a test corpus under trained samples.
    Eval {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Left-to-right particles per document.
        #[arg(long)]
        particles: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Topic, correlation and period tables from trained samples.
    Report {
        #[arg(long)]
        samples: PathBuf,
        /// Words listed per topic.
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Ingest {
            docs,
            covariates,
            vocab_size,
            period,
            boundaries,
            stopwords,
            stem,
            no_standardize,
            output_dir,
        } => ingest::run(&ingest::IngestArgs {
            docs,
            covariates,
            vocab_size,
            period,
            boundaries,
            stopwords,
            stem,
            no_standardize,
            output_dir,
        }),
        Command::Generate {
            spec,
            seed,
            holdout,
            output_dir,
        } => generate::run(&generate::GenerateArgs {
            spec,
            seed,
            holdout,
            output_dir,
        }),
        Command::Train {
            corpus,
            config,
            seed,
            mode,
            resume,
            stop_after,
            output_dir,
        } => train::run(&train::TrainArgs {
            corpus,
            config,
            seed,
            mode: mode.into(),
            resume,
            stop_after,
            output_dir,
        }),
        Command::Eval {
            samples,
            test,
            particles,
            seed,
            output_dir,
        } => eval::run(&eval::EvalArgs {
            samples,
            test,
            particles,
            seed,
            output_dir,
        }),
        Command::Report { samples, top, output_dir } => report::run(&report::ReportArgs { samples, top, output_dir }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
