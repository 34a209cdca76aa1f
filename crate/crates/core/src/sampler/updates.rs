//! Individual transition kernels of the Metropolis-within-Gibbs scan.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::metropolis::accept;
use crate::config::ModelConfig;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{
    alpha_delta, eta_transfer_delta, gibbs_topic_weights, lambda_posterior, pi_transfer_delta,
    ChainState, PeriodStats,
};

/// Draws an index with probability proportional to `weights`.
#[inline]
pub fn sample_topic<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k;
        }
        u -= w;
    }
    // rounding left u marginally above the last cumulative weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Collapsed Gibbs update of one token: removes it from the counts, draws a
/// topic from its full conditional and adds it back.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn gibbs_update_z<R: Rng + ?Sized>(
    state: &mut ChainState,
    doc: usize,
    pos: usize,
    word: u32,
    doc_prior: &[f64],
    beta: f64,
    vocab_size: usize,
    weights: &mut [f64],
    rng: &mut R,
) -> Result<u32> {
    let old = state.z[doc][pos];
    state.counts.decrement(doc, word, old as usize)?;
    gibbs_topic_weights(&state.counts, doc, word, doc_prior, beta, vocab_size, weights);
    let k = sample_topic(weights, rng);
    state.counts.increment(doc, word, k);
    state.z[doc][pos] = k as u32;
    Ok(k as u32)
}

/// One pass of collapsed Gibbs over every token of the corpus.
pub fn sweep_topics<R: Rng + ?Sized>(
    state: &mut ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    rng: &mut R,
) -> Result<()> {
    let k = config.topics;
    let v = corpus.vocab_size();
    let mut weights = vec![0.0; k];
    let mut prior = vec![0.0; k];
    let mut d = 0;
    for (t, docs) in corpus.periods.iter().enumerate() {
        for (p, w) in prior.iter_mut().zip(&state.pi_tilde[t]) {
            *p = state.alpha[t] * w;
        }
        for doc in docs {
            for (pos, &word) in doc.tokens.iter().enumerate() {
                gibbs_update_z(state, d, pos, word, &prior, config.beta, v, &mut weights, rng)?;
            }
            d += 1;
        }
    }
    Ok(())
}

#[inline]
fn symmetric_uniform<R: Rng + ?Sized>(half_width: f64, rng: &mut R) -> f64 {
    (2.0 * rng.gen::<f64>() - 1.0) * half_width
}

#[inline]
fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (a, b)
}

/// Random-walk Metropolis update of `α_t` with a uniform step of half-width
/// `step`. Returns whether the move was accepted.
pub fn update_alpha<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &PeriodStats,
    config: &ModelConfig,
    t: usize,
    step: f64,
    rng: &mut R,
) -> Result<bool> {
    let proposal = state.alpha[t] + symmetric_uniform(step, rng);
    let log_ratio = alpha_delta(stats, state, config, t, proposal);
    let accepted = accept(log_ratio, rng)?;
    if accepted {
        state.alpha[t] = proposal;
    }
    Ok(accepted)
}

/// `K` sum-preserving pairwise transfers on row `π̃_t`. Returns the number of
/// accepted moves.
pub fn update_pi_tilde<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &PeriodStats,
    corpus: &Corpus,
    config: &ModelConfig,
    t: usize,
    step: f64,
    rng: &mut R,
) -> Result<usize> {
    let k = config.topics;
    let mut accepted = 0;
    for _ in 0..k {
        let (a, b) = distinct_pair(k, rng);
        let delta = symmetric_uniform(step, rng);
        let log_ratio = pi_transfer_delta(stats, state, corpus, config, t, a, b, delta);
        if accept(log_ratio, rng)? {
            state.pi_tilde[t][a] += delta;
            state.pi_tilde[t][b] -= delta;
            accepted += 1;
        }
    }
    Ok(accepted)
}

/// `K` zero-sum pairwise transfers within each column of `η`. Returns
/// `(accepted, proposed)`.
pub fn update_eta<R: Rng + ?Sized>(
    state: &mut ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    step: f64,
    rng: &mut R,
) -> Result<(usize, usize)> {
    let k = config.topics;
    let mut accepted = 0;
    let mut proposed = 0;
    for j in 0..corpus.num_covariates() {
        for _ in 0..k {
            let (a, b) = distinct_pair(k, rng);
            let delta = symmetric_uniform(step, rng);
            let log_ratio = eta_transfer_delta(state, corpus, config, j, a, b, delta);
            proposed += 1;
            if accept(log_ratio, rng)? {
                state.eta[a][j] += delta;
                state.eta[b][j] -= delta;
                accepted += 1;
            }
        }
    }
    Ok((accepted, proposed))
}

/// Exact draw of `λ` from its conjugate Gamma conditional.
pub fn update_lambda<R: Rng + ?Sized>(
    state: &mut ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    rng: &mut R,
) -> Result<f64> {
    let (shape, rate) = lambda_posterior(state, corpus, config);
    let gamma = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::invariant(format!("lambda conditional Gamma({shape}, {rate}): {e}")))?;
    // guard against a zero draw from extreme shapes
    state.lambda = gamma.sample(rng).max(f64::MIN_POSITIVE);
    Ok(state.lambda)
}
