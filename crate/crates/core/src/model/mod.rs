//! Latent state, sufficient statistics and the unnormalized log posterior.

mod counts;
mod joint;

use serde::{Deserialize, Serialize};

pub use counts::{recompute_counts, CountMatrices};
pub use joint::{
    alpha_delta, eta_transfer_delta, gibbs_topic_weights, lambda_posterior, log_joint,
    pi_transfer_delta, walk_distance, PeriodStats,
};

use crate::config::ModelConfig;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Full latent state of one chain. `θ` and `φ` are integrated out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    /// Topic of every token, one vector per document in corpus order.
    pub z: Vec<Vec<u32>>,
    /// Per-period concentration `α_t`.
    pub alpha: Vec<f64>,
    /// Realized per-period topic weights `π̃_t` (rows on the simplex).
    pub pi_tilde: Vec<Vec<f64>>,
    /// `K × p` covariate loadings with zero column sums.
    pub eta: Vec<Vec<f64>>,
    /// Rate of the Laplace walk.
    pub lambda: f64,
    pub counts: CountMatrices,
}

impl ChainState {
    pub fn topics(&self) -> usize {
        self.counts.topics()
    }

    /// Covariate shift `(η·y_t)_k` for one period and topic.
    #[inline]
    pub fn shift(&self, corpus: &Corpus, t: usize, k: usize) -> f64 {
        self.eta[k]
            .iter()
            .zip(&corpus.covariates[t])
            .map(|(e, y)| e * y)
            .sum()
    }

    /// Baseline weight `π_tk = π̃_tk − η_k·y_t`.
    #[inline]
    pub fn pi(&self, corpus: &Corpus, t: usize, k: usize) -> f64 {
        self.pi_tilde[t][k] - self.shift(corpus, t, k)
    }

    /// The `T × K` matrix of baseline weights.
    pub fn implied_pi(&self, corpus: &Corpus) -> Vec<Vec<f64>> {
        (0..self.pi_tilde.len())
            .map(|t| (0..self.topics()).map(|k| self.pi(corpus, t, k)).collect())
            .collect()
    }

    /// Checks every structural and support invariant of the state.
    pub fn check_invariants(&self, corpus: &Corpus, config: &ModelConfig) -> Result<()> {
        let k = config.topics;
        let t = corpus.num_periods();
        let p = corpus.num_covariates();
        let fail = |m: String| Err(Error::invariant(m));
        if self.alpha.len() != t || self.pi_tilde.len() != t {
            return fail(format!("state has {} periods, corpus has {t}", self.alpha.len()));
        }
        if self.eta.len() != k || self.eta.iter().any(|r| r.len() != p) {
            return fail(format!("eta must be {k} x {p}"));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return fail(format!("alpha {a} is not positive"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return fail(format!("lambda {} is not positive", self.lambda));
        }
        for j in 0..p {
            let s: f64 = self.eta.iter().map(|r| r[j]).sum();
            if s.abs() > 1e-10 {
                return fail(format!("eta column {j} sums to {s}"));
            }
        }
        for (ti, row) in self.pi_tilde.iter().enumerate() {
            if row.len() != k {
                return fail(format!("pi_tilde row {ti} has {} entries", row.len()));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return fail(format!("pi_tilde row {ti} does not sum to 1"));
            }
            for kk in 0..k {
                if row[kk] < config.epsilon_min || self.pi(corpus, ti, kk) < config.epsilon_min {
                    return fail(format!("period {ti} topic {kk} below the positivity floor"));
                }
            }
        }
        if recompute_counts(corpus, &self.z, k)? != self.counts {
            return fail("counts disagree with assignments".into());
        }
        Ok(())
    }
}

/// Posterior point estimates assembled from retained samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// `K × V`, rows sum to one.
    pub phi_hat: Vec<Vec<f64>>,
    /// Mean of `π_t` over periods and samples.
    pub pi_bar: Vec<f64>,
    /// `T × K` mean baseline weights per period.
    pub pi_series: Vec<Vec<f64>>,
    /// `T × K` mean of `α_t·π̃_t`, the document-level prior used in evaluation.
    pub prior_weights: Vec<Vec<f64>>,
    pub eta_hat: Vec<Vec<f64>>,
    /// `ρ_kj = η̂_kj / π̄_k`; `None` where `π̄_k` is numerically zero.
    pub rho: Vec<Vec<Option<f64>>>,
    pub alpha_hat: Vec<f64>,
    pub lambda_hat: f64,
    /// Word indices of each topic in decreasing `φ̂` order.
    pub top_words: Vec<Vec<u32>>,
    pub samples: usize,
}
