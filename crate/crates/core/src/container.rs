//! Versioned on-disk container for corpora, checkpoints and sample sets.
//!
//! Layout: the 6 magic bytes `GCLDA\0`, one kind byte, one format version
//! byte, then a UTF-8 JSON payload. Floats are written in shortest
//! round-trip form, so decoding restores every value bit for bit.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, ModelConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::generator::GroundTruth;
use crate::sampler::{Sample, SamplerDiagnostics};

pub const MAGIC: &[u8; 6] = b"GCLDA\0";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Corpus = 1,
    Checkpoint = 2,
    Samples = 3,
}

impl Kind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Kind::Corpus),
            2 => Some(Kind::Checkpoint),
            3 => Some(Kind::Samples),
            _ => None,
        }
    }
}

pub fn encode<T: Serialize>(kind: Kind, payload: &T) -> Result<Vec<u8>> {
    let mut bytes = Vec::with_capacity(1024);
    bytes.extend_from_slice(MAGIC);
    bytes.push(kind as u8);
    bytes.push(FORMAT_VERSION);
    serde_json::to_writer(&mut bytes, payload)?;
    Ok(bytes)
}

pub fn decode<T: DeserializeOwned>(kind: Kind, bytes: &[u8]) -> Result<T> {
    let header = MAGIC.len() + 2;
    if bytes.len() < header || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Artifact("not a gclda artifact".into()));
    }
    let found = bytes[MAGIC.len()];
    if Kind::from_byte(found) != Some(kind) {
        return Err(Error::Artifact(format!("expected a {kind:?} artifact, found kind byte {found}")));
    }
    let version = bytes[MAGIC.len() + 1];
    if version != FORMAT_VERSION {
        return Err(Error::Artifact(format!(
            "unsupported format version {version} (this build reads {FORMAT_VERSION})"
        )));
    }
    Ok(serde_json::from_slice(&bytes[header..])?)
}

/// Writes through a temporary file and a rename, so an interrupted write
/// never leaves a truncated artifact behind.
pub fn write<T: Serialize>(path: &Path, kind: Kind, payload: &T) -> Result<()> {
    let bytes = encode(kind, payload)?;
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read<T: DeserializeOwned>(path: &Path, kind: Kind) -> Result<T> {
    let bytes = fs::read(path)?;
    decode(kind, &bytes).map_err(|e| Error::Artifact(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusArtifact {
    pub corpus: Corpus,
    /// Set for generated corpora.
    pub synthetic: bool,
    pub truth: Option<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesArtifact {
    pub mode: Mode,
    pub config: ModelConfig,
    pub vocabulary: Vec<String>,
    pub period_labels: Vec<String>,
    pub covariate_count: usize,
    pub samples: Vec<Sample>,
    pub diagnostics: SamplerDiagnostics,
}
