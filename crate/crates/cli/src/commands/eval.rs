use std::path::PathBuf;

use gclda::evaluation::{perplexity, point_estimates};

use super::{load_corpus, load_samples};
use crate::error::{CliError, CliResult};
use crate::files;

pub struct EvalArgs {
    pub samples: PathBuf,
    pub test: PathBuf,
    pub particles: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
}

pub const PERIOD_COLUMNS: [&str; 7] = ["period", "label", "documents", "tokens", "log_likelihood", "perplexity", "std_error"];
pub const DOCUMENT_COLUMNS: [&str; 4] = ["period", "id", "tokens", "log_likelihood"];

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let model = load_samples(&args.samples)?;
    let (test, _) = load_corpus(&args.test)?;
    let test = test.corpus;
    if model.vocabulary != test.vocabulary.terms() {
        return Err(CliError::Usage("test corpus vocabulary differs from the trained model's".into()));
    }
    if model.period_labels != test.period_labels {
        return Err(CliError::Usage("test corpus periods differ from the trained model's".into()));
    }
    let particles = args.particles.unwrap_or(model.config.particles);
    let seed = args.seed.unwrap_or(model.config.seed);
    let summary = point_estimates(&model.samples, &test, &model.config)?;
    let report = perplexity(&test, &summary, particles, seed, &model.mode.to_string())?;
    for w in &report.warnings {
        log::warn!("{w}");
    }

    let dir = &args.output_dir;
    files::create_dir(dir)?;
    files::write_json(&dir.join("eval.json"), &report)?;
    files::write_csv(
        &dir.join("eval_periods.csv"),
        &PERIOD_COLUMNS,
        report.periods.iter().enumerate().map(|(t, p)| {
            (t, &p.label, p.documents, p.tokens, p.log_likelihood, p.perplexity, p.std_error)
        }),
    )?;
    files::write_csv(
        &dir.join("eval_documents.csv"),
        &DOCUMENT_COLUMNS,
        report.documents.iter().map(|d| (d.period, &d.id, d.tokens, d.log_likelihood)),
    )?;
    log::info!(
        "{} perplexity {:.4} over {} tokens",
        report.model,
        report.overall_perplexity,
        report.total_tokens
    );
    Ok(())
}
