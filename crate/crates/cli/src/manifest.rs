use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use gclda::Mode;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::files;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Record of a training run. Together with the listed inputs it pins down
/// every artifact of the run. The timestamps are the only fields that vary
/// between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub mode: Mode,
    pub seed: u64,
    /// Full configuration in `key = value` form.
    pub config: String,
    pub inputs: Vec<InputDigest>,
    pub artifacts: Vec<String>,
    pub iterations_completed: usize,
    pub started_unix: u64,
    pub updated_unix: u64,
    pub finished: bool,
}

pub const FILE: &str = "manifest.json";

pub fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(FILE);
        let text = files::read_text(&path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, dir: &Path) -> CliResult<()> {
        files::write_json(&dir.join(FILE), self)
    }

    /// Checks that `bytes` hash to the digest recorded for `role`.
    pub fn verify(&self, role: &str, path: &Path, bytes: &[u8]) -> CliResult<()> {
        let found = files::sha256_hex(bytes);
        match self.inputs.iter().find(|d| d.role == role) {
            Some(d) if d.sha256 == found => Ok(()),
            Some(d) => Err(CliError::DigestMismatch {
                role: role.into(),
                path: path.display().to_string(),
                expected: d.sha256.clone(),
                found,
            }),
            None => Err(CliError::Usage(format!("manifest records no {role} input"))),
        }
    }
}
