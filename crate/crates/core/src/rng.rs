//! Named random substreams derived from a single root seed.
//!
//! Every consumer of randomness (initialization, sweeps, evaluation of a
//! given document, data splitting) draws from its own ChaCha stream keyed by
//! `(root seed, name, index)`, so the order in which components run, or the
//! number of worker threads, never changes the numbers they see.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type ChainRng = ChaCha8Rng;

pub const INIT: &str = "init";
pub const SWEEP: &str = "sweep";
pub const EVAL: &str = "eval";
pub const SPLIT: &str = "split";
pub const GENERATE: &str = "generate";

/// Derives the RNG for substream `name`, instance `index`.
pub fn substream(seed: u64, name: &str, index: u64) -> ChainRng {
    let mut hasher = Sha256::new();
    hasher.update(b"gclda-substream");
    hasher.update(seed.to_le_bytes());
    hasher.update((name.len() as u64).to_le_bytes());
    hasher.update(name.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(digest)
}
