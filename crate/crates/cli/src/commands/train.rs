use std::path::{Path, PathBuf};

use gclda::container::{self, Kind, SamplesArtifact};
use gclda::sampler::{Chain, Checkpoint, SamplerDiagnostics};
use gclda::{Corpus, Mode, ModelConfig};

use super::{load_corpus, write_artifact};
use crate::error::{CliError, CliResult};
use crate::files;
use crate::manifest::{self, InputDigest, RunManifest};

pub const CHECKPOINT: &str = "checkpoint.gclda";
pub const SAMPLES: &str = "samples.gclda";
pub const DIAGNOSTICS: &str = "diagnostics.jsonl";

pub struct TrainArgs {
    pub corpus: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Mode,
    pub resume: bool,
    /// Stop (with a checkpoint) once this many sweeps have completed.
    pub stop_after: Option<usize>,
    pub output_dir: PathBuf,
}

pub fn run(args: &TrainArgs) -> CliResult<()> {
    let dir = &args.output_dir;
    let (artifact, corpus_bytes) = load_corpus(&args.corpus)?;
    let corpus = &artifact.corpus;
    let config_text = args.config.as_deref().map(files::read_text).transpose()?;

    let (mut manifest, mut chain) = if args.resume {
        resume(args, corpus, &corpus_bytes, config_text.as_deref())?
    } else {
        let mut config = match &config_text {
            Some(text) => ModelConfig::parse(text)?,
            None => ModelConfig::default(),
        };
        if let Some(seed) = args.seed {
            config.seed = seed;
        }
        files::create_dir(dir)?;
        let mut inputs = vec![InputDigest {
            role: "corpus".into(),
            path: args.corpus.display().to_string(),
            sha256: files::sha256_hex(&corpus_bytes),
        }];
        if let (Some(path), Some(text)) = (&args.config, &config_text) {
            inputs.push(InputDigest {
                role: "config".into(),
                path: path.display().to_string(),
                sha256: files::sha256_hex(text.as_bytes()),
            });
        }
        let now = manifest::now_unix();
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            mode: args.mode,
            seed: config.seed,
            config: config.to_text(),
            inputs,
            artifacts: vec![CHECKPOINT.into(), DIAGNOSTICS.into()],
            iterations_completed: 0,
            started_unix: now,
            updated_unix: now,
            finished: false,
        };
        (manifest, Chain::seeded(corpus, &config, args.mode)?)
    };

    let every = chain.checkpoint().config.checkpoint_every;
    let total = chain.checkpoint().config.iterations;
    while !chain.is_finished() {
        let record = chain.step()?;
        let it = record.iteration;
        if it % 100 == 0 || it == total {
            log::info!("sweep {it}/{total}: log joint {:.3}", record.log_joint);
        }
        if args.stop_after == Some(it) {
            log::info!("stopping after sweep {it}");
            return save_progress(dir, &chain, &mut manifest);
        }
        if every > 0 && it % every == 0 && it < total {
            save_progress(dir, &chain, &mut manifest)?;
        }
    }

    save_progress(dir, &chain, &mut manifest)?;
    let cp = chain.checkpoint();
    let samples = SamplesArtifact {
        mode: cp.mode,
        config: cp.config.clone(),
        vocabulary: corpus.vocabulary.terms().to_vec(),
        period_labels: corpus.period_labels.clone(),
        covariate_count: corpus.num_covariates(),
        samples: cp.samples.clone(),
        diagnostics: cp.diagnostics.clone(),
    };
    write_artifact(&dir.join(SAMPLES), Kind::Samples, &samples)?;
    manifest.finished = true;
    if !manifest.artifacts.iter().any(|a| a == SAMPLES) {
        manifest.artifacts.push(SAMPLES.into());
    }
    manifest.save(dir)?;
    log::info!("retained {} samples", samples.samples.len());
    Ok(())
}

fn resume<'a>(
    args: &TrainArgs,
    corpus: &'a Corpus,
    corpus_bytes: &[u8],
    config_text: Option<&str>,
) -> CliResult<(RunManifest, Chain<'a>)> {
    let dir = &args.output_dir;
    let manifest = RunManifest::load(dir)?;
    manifest.verify("corpus", &args.corpus, corpus_bytes)?;
    if let (Some(path), Some(text)) = (&args.config, config_text) {
        manifest.verify("config", path, text.as_bytes())?;
    }
    if args.seed.is_some_and(|s| s != manifest.seed) {
        return Err(CliError::Usage(format!("run was started with seed {}", manifest.seed)));
    }
    if args.mode != manifest.mode {
        return Err(CliError::Usage(format!("run was started in {} mode", manifest.mode)));
    }
    let checkpoint: Checkpoint = container::read(&dir.join(CHECKPOINT), Kind::Checkpoint)?;
    if checkpoint.mode != manifest.mode || checkpoint.config.to_text() != manifest.config {
        return Err(CliError::Usage("checkpoint does not belong to this run's manifest".into()));
    }
    log::info!("resuming at sweep {}", checkpoint.iteration);
    Ok((manifest, Chain::resume(corpus, checkpoint)?))
}

fn save_progress(dir: &Path, chain: &Chain<'_>, manifest: &mut RunManifest) -> CliResult<()> {
    let cp = chain.checkpoint();
    write_artifact(&dir.join(CHECKPOINT), Kind::Checkpoint, cp)?;
    write_diagnostics(&dir.join(DIAGNOSTICS), &cp.diagnostics)?;
    manifest.iterations_completed = cp.iteration;
    manifest.updated_unix = manifest::now_unix();
    manifest.save(dir)
}

/// One JSON object per sweep.
fn write_diagnostics(path: &Path, diagnostics: &SamplerDiagnostics) -> CliResult<()> {
    let mut out = Vec::new();
    for r in &diagnostics.records {
        serde_json::to_writer(&mut out, r).map_err(gclda::Error::from)?;
        out.push(b'\n');
    }
    files::write_atomic(path, &out)
}
