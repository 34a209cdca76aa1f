use std::path::{Path, PathBuf};

use gclda::container::{CorpusArtifact, Kind};
use gclda::corpus::{self, parse_timestamp, CovariateTable, IngestOptions, PeriodScheme, TokenizeOptions};

use super::write_artifact;
use crate::error::{CliError, CliResult};
use crate::files;

pub struct IngestArgs {
    pub docs: PathBuf,
    pub covariates: PathBuf,
    pub vocab_size: usize,
    pub period: String,
    pub boundaries: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub stem: bool,
    pub no_standardize: bool,
    pub output_dir: PathBuf,
}

/// Reads `label,timestamp` lines; a header line is not expected.
fn parse_boundaries(path: &Path) -> CliResult<Vec<(String, chrono::NaiveDateTime)>> {
    let text = files::read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| {
            CliError::Core(gclda::Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: m,
            })
        };
        let (label, ts) = line
            .split_once(',')
            .ok_or_else(|| err("expected label,timestamp".into()))?;
        out.push((label.trim().to_string(), parse_timestamp(ts).map_err(|e| err(e.to_string()))?));
    }
    Ok(out)
}

pub fn run(args: &IngestArgs) -> CliResult<()> {
    let scheme = match (args.period.as_str(), &args.boundaries) {
        (_, Some(path)) => PeriodScheme::Boundaries(parse_boundaries(path)?),
        ("month", None) => PeriodScheme::Month,
        ("day", None) => PeriodScheme::Day,
        (other, None) => return Err(CliError::Usage(format!("unknown period scheme {other:?}; use month or day"))),
    };
    let mut tokenize = TokenizeOptions::default();
    if let Some(path) = &args.stopwords {
        tokenize = tokenize.with_stopword_text(&files::read_text(path)?);
    }
    tokenize.stem = args.stem;
    let options = IngestOptions {
        tokenize,
        vocab_size: args.vocab_size,
        scheme,
        standardize: !args.no_standardize,
    };

    let docs = corpus::parse_documents(&files::read_text(&args.docs)?, &args.docs)?;
    let table = CovariateTable::parse(&files::read_text(&args.covariates)?, &args.covariates)?;
    let (corpus, report) = corpus::ingest(&docs, &table, &options)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }

    files::create_dir(&args.output_dir)?;
    let artifact = CorpusArtifact {
        corpus,
        synthetic: false,
        truth: None,
    };
    write_artifact(&args.output_dir.join("corpus.gclda"), Kind::Corpus, &artifact)?;
    files::write_json(&args.output_dir.join("ingest_report.json"), &report)?;
    log::info!(
        "ingested {} of {} documents into {} periods, vocabulary {}",
        report.documents_retained,
        report.documents_read,
        report.period_labels.len(),
        report.vocabulary_size
    );
    Ok(())
}
