use std::path::PathBuf;

use gclda::container::{CorpusArtifact, Kind};
use gclda::generator::{generate, held_out_split, GeneratorSpec};
use gclda::rng;

use super::write_artifact;
use crate::error::{CliError, CliResult};
use crate::files;

pub struct GenerateArgs {
    pub spec: PathBuf,
    pub seed: Option<u64>,
    pub holdout: Option<f64>,
    pub output_dir: PathBuf,
}

pub fn run(args: &GenerateArgs) -> CliResult<()> {
    let text = files::read_text(&args.spec)?;
    let mut spec: GeneratorSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.spec.display())))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let (corpus, truth) = generate(&spec)?;
    files::create_dir(&args.output_dir)?;
    let dir = &args.output_dir;

    if let Some(fraction) = args.holdout {
        let split = held_out_split(&corpus, fraction, &mut rng::substream(spec.seed, rng::SPLIT, 0))?;
        for w in &split.warnings {
            log::warn!("{w}");
        }
        for (name, part) in [("train.gclda", split.train), ("test.gclda", split.test)] {
            let artifact = CorpusArtifact {
                corpus: part,
                synthetic: true,
                truth: None,
            };
            write_artifact(&dir.join(name), Kind::Corpus, &artifact)?;
        }
    }
    files::write_json(&dir.join("truth.json"), &truth)?;
    let artifact = CorpusArtifact {
        corpus,
        synthetic: true,
        truth: Some(truth),
    };
    write_artifact(&dir.join("corpus.gclda"), Kind::Corpus, &artifact)?;
    log::info!(
        "generated {} documents, {} tokens over {} periods",
        artifact.corpus.num_documents(),
        artifact.corpus.num_tokens(),
        artifact.corpus.num_periods()
    );
    Ok(())
}
