pub mod eval;
pub mod generate;
pub mod ingest;
pub mod report;
pub mod train;

use std::path::Path;

use gclda::container::{self, CorpusArtifact, Kind, SamplesArtifact};

use crate::error::CliResult;
use crate::files;

pub fn load_corpus(path: &Path) -> CliResult<(CorpusArtifact, Vec<u8>)> {
    let bytes = files::read(path)?;
    let artifact: CorpusArtifact = container::decode(Kind::Corpus, &bytes)?;
    artifact.corpus.validate()?;
    Ok((artifact, bytes))
}

pub fn load_samples(path: &Path) -> CliResult<SamplesArtifact> {
    Ok(container::decode(Kind::Samples, &files::read(path)?)?)
}

pub fn write_artifact<T: serde::Serialize>(path: &Path, kind: Kind, payload: &T) -> CliResult<()> {
    files::write_atomic(path, &container::encode(kind, payload)?)
}
