//! Group-correlated temporal topic model (GCLDA).
//!
//! Documents arrive in `T` time periods. Each period has a baseline topic
//! distribution `π_t` that follows a Laplace random walk, and the realized
//! distribution `π̃_t = π_t + η·y_t` is shifted by an observed covariate
//! series `y_t` through a zero-column-sum loading matrix `η`. Posterior
//! inference uses collapsed Gibbs for topic assignments, Metropolis moves for
//! `α_t`, `π̃_t` and `η`, and a conjugate Gamma draw for `λ`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod container;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod generator;
pub mod model;
pub mod rng;
pub mod sampler;

pub use config::{Mode, ModelConfig};
pub use corpus::{Corpus, Document, Vocabulary};
pub use error::{Error, Result};
pub use model::{ChainState, CountMatrices, PosteriorSummary};
