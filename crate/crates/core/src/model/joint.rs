//! The unnormalized log posterior with `θ` and `φ` collapsed, and the local
//! differences of it that each sampler block needs.
//!
//! Every `*_delta` function returns `log p(new) − log p(old)` for a single
//! proposed move, touching only the factors the move changes. The sum of all
//! factors is [`log_joint`], which the tests use as the reference.

use std::f64::consts::LN_2;

use super::{ln_gamma, ChainState, CountMatrices};
use crate::config::ModelConfig;
use crate::corpus::Corpus;

/// Run-length summary of the document-topic counts of one period.
///
/// The collapsed document factor of a period only depends on how many
/// documents have each length and each per-topic count, so evaluating it for
/// a new `α_t` or `π̃_t` costs one `ln Γ` per distinct count rather than per
/// document.
#[derive(Debug, Clone)]
pub struct PeriodStats {
    docs: usize,
    lengths: Vec<(u32, u32)>,
    topic_counts: Vec<Vec<(u32, u32)>>,
}

fn run_lengths(mut values: Vec<u32>) -> Vec<(u32, u32)> {
    values.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((last, m)) if *last == v => *m += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

impl PeriodStats {
    /// Summarizes documents `docs` (a range of global document indices).
    pub fn build(counts: &CountMatrices, docs: std::ops::Range<usize>) -> Self {
        let k = counts.topics();
        let mut lengths = Vec::with_capacity(docs.len());
        let mut per_topic: Vec<Vec<u32>> = vec![Vec::new(); k];
        for d in docs.clone() {
            let row = &counts.doc_topic[d];
            lengths.push(row.iter().sum());
            for (kk, &c) in row.iter().enumerate() {
                if c > 0 {
                    per_topic[kk].push(c);
                }
            }
        }
        Self {
            docs: docs.len(),
            lengths: run_lengths(lengths),
            topic_counts: per_topic.into_iter().map(run_lengths).collect(),
        }
    }

    pub fn for_period(corpus: &Corpus, counts: &CountMatrices, t: usize) -> Self {
        let offsets = corpus.period_offsets();
        Self::build(counts, offsets[t]..offsets[t + 1])
    }

    /// `N_t ln Γ(α) − Σ_i ln Γ(J_i + α)`.
    pub fn concentration_term(&self, alpha: f64) -> f64 {
        let mut s = self.docs as f64 * ln_gamma(alpha);
        for &(len, m) in &self.lengths {
            s -= m as f64 * ln_gamma(len as f64 + alpha);
        }
        s
    }

    /// `Σ_i [ln Γ(C_ik + a) − ln Γ(a)]` for prior mass `a = α π̃_k`.
    pub fn topic_term(&self, k: usize, a: f64) -> f64 {
        let lg_a = ln_gamma(a);
        self.topic_counts[k]
            .iter()
            .map(|&(c, m)| m as f64 * (ln_gamma(c as f64 + a) - lg_a))
            .sum()
    }

    /// Collapsed Dirichlet-multinomial log likelihood of the period's
    /// assignments under `Dir(α·row)`.
    pub fn log_likelihood(&self, alpha: f64, row: &[f64]) -> f64 {
        self.concentration_term(alpha)
            + row
                .iter()
                .enumerate()
                .map(|(k, &w)| self.topic_term(k, alpha * w))
                .sum::<f64>()
    }
}

/// Total L1 variation `S = Σ_{t≥2} ‖π_t − π_{t−1}‖₁` of the baseline weights.
pub fn walk_distance(state: &ChainState, corpus: &Corpus) -> f64 {
    let pi = state.implied_pi(corpus);
    pi.windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).abs()).sum::<f64>())
        .sum()
}

/// Shape and rate of the conjugate Gamma conditional of `λ`.
pub fn lambda_posterior(state: &ChainState, corpus: &Corpus, config: &ModelConfig) -> (f64, f64) {
    let t = corpus.num_periods();
    if t < 2 {
        return (config.lambda_prior.shape, config.lambda_prior.rate);
    }
    let steps = ((t - 1) * config.topics) as f64;
    (
        steps + config.lambda_prior.shape,
        walk_distance(state, corpus) + config.lambda_prior.rate,
    )
}

fn ln_dirichlet(x: &[f64], gamma: f64, base: &[f64]) -> f64 {
    let mut s = ln_gamma(gamma);
    for (&xi, &b) in x.iter().zip(base) {
        let a = gamma * b;
        s += (a - 1.0) * xi.ln() - ln_gamma(a);
    }
    s
}

fn in_support(state: &ChainState, corpus: &Corpus, config: &ModelConfig) -> bool {
    let k = config.topics;
    let t = corpus.num_periods();
    let p = corpus.num_covariates();
    if state.alpha.len() != t || state.pi_tilde.len() != t || state.eta.len() != k {
        return false;
    }
    if !(state.lambda > 0.0) || state.alpha.iter().any(|a| !(*a > 0.0)) {
        return false;
    }
    if (0..p).any(|j| state.eta.iter().map(|r| r[j]).sum::<f64>().abs() > 1e-10) {
        return false;
    }
    state.pi_tilde.iter().enumerate().all(|(ti, row)| {
        row.len() == k
            && (row.iter().sum::<f64>() - 1.0).abs() <= 1e-9
            && (0..k).all(|kk| {
                row[kk] >= config.epsilon_min && state.pi(corpus, ti, kk) >= config.epsilon_min
            })
    })
}

/// Log of the unnormalized posterior of `(Z, α, π̃, η, λ)`, or `−∞` outside
/// the support.
pub fn log_joint(state: &ChainState, corpus: &Corpus, config: &ModelConfig) -> f64 {
    if !in_support(state, corpus, config) {
        return f64::NEG_INFINITY;
    }
    let k = config.topics;
    let v = corpus.vocab_size() as f64;
    let counts = &state.counts;
    let offsets = corpus.period_offsets();
    let mut total = 0.0;

    for t in 0..corpus.num_periods() {
        let stats = PeriodStats::build(counts, offsets[t]..offsets[t + 1]);
        total += stats.log_likelihood(state.alpha[t], &state.pi_tilde[t]);
        total += config.alpha_prior.ln_pdf(state.alpha[t]);
    }

    let vb = v * config.beta;
    let lg_beta = ln_gamma(config.beta);
    for kk in 0..k {
        total += ln_gamma(vb) - ln_gamma(counts.topic_total[kk] as f64 + vb);
    }
    for row in &counts.word_topic {
        for &c in row.iter().filter(|&&c| c > 0) {
            total += ln_gamma(c as f64 + config.beta) - lg_beta;
        }
    }

    let t = corpus.num_periods();
    if t > 0 {
        let pi1: Vec<f64> = (0..k).map(|kk| state.pi(corpus, 0, kk)).collect();
        total += ln_dirichlet(&pi1, config.gamma, &config.pi0());
    }
    if t > 1 {
        let steps = ((t - 1) * k) as f64;
        total += steps * (state.lambda.ln() - LN_2) - state.lambda * walk_distance(state, corpus);
    }
    total += config.lambda_prior.ln_pdf(state.lambda);
    total -= config.eta_penalty * state.eta.iter().flatten().map(|e| e.abs()).sum::<f64>();
    total
}

/// Unnormalized full conditional of one token's topic, written into `out`.
/// The token must already be removed from `counts`. `doc_prior[k]` is
/// `α_t π̃_tk`.
#[inline]
pub fn gibbs_topic_weights(
    counts: &CountMatrices,
    doc: usize,
    word: u32,
    doc_prior: &[f64],
    beta: f64,
    vocab_size: usize,
    out: &mut [f64],
) {
    let vb = vocab_size as f64 * beta;
    let dt = &counts.doc_topic[doc];
    let wt = &counts.word_topic[word as usize];
    for k in 0..out.len() {
        out[k] = (dt[k] as f64 + doc_prior[k]) * (wt[k] as f64 + beta)
            / (counts.topic_total[k] as f64 + vb);
    }
}

/// Change in the log posterior when `α_t` moves to `new_alpha`.
pub fn alpha_delta(
    stats: &PeriodStats,
    state: &ChainState,
    config: &ModelConfig,
    t: usize,
    new_alpha: f64,
) -> f64 {
    if !(new_alpha > 0.0) {
        return f64::NEG_INFINITY;
    }
    let old = state.alpha[t];
    let row = &state.pi_tilde[t];
    stats.log_likelihood(new_alpha, row) - stats.log_likelihood(old, row)
        + config.alpha_prior.ln_pdf(new_alpha)
        - config.alpha_prior.ln_pdf(old)
}

/// Sum over `coord` of the walk terms touching period `t`,
/// `−λ(|π_{t+1,c} − π_{t,c}| + |π_{t,c} − π_{t−1,c}|)`, with `π_{t,c}` replaced by `value`.
fn walk_terms_at(
    state: &ChainState,
    corpus: &Corpus,
    t: usize,
    coord: usize,
    value: f64,
) -> f64 {
    let mut s = 0.0;
    if t > 0 {
        s += (value - state.pi(corpus, t - 1, coord)).abs();
    }
    if t + 1 < corpus.num_periods() {
        s += (state.pi(corpus, t + 1, coord) - value).abs();
    }
    -state.lambda * s
}

/// Change in the log posterior for the mass transfer `π̃_tk += delta`,
/// `π̃_tk2 −= delta`. Out-of-support moves give `−∞`.
#[allow(clippy::too_many_arguments)]
pub fn pi_transfer_delta(
    stats: &PeriodStats,
    state: &ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    t: usize,
    k: usize,
    k2: usize,
    delta: f64,
) -> f64 {
    debug_assert_ne!(k, k2);
    let eps = config.epsilon_min;
    let row = &state.pi_tilde[t];
    let (old_a, old_b) = (row[k], row[k2]);
    let (new_a, new_b) = (old_a + delta, old_b - delta);
    let (pi_a, pi_b) = (state.pi(corpus, t, k), state.pi(corpus, t, k2));
    let (new_pi_a, new_pi_b) = (pi_a + delta, pi_b - delta);
    if new_a < eps || new_b < eps || new_pi_a < eps || new_pi_b < eps {
        return f64::NEG_INFINITY;
    }
    let alpha = state.alpha[t];
    let mut d = stats.topic_term(k, alpha * new_a) - stats.topic_term(k, alpha * old_a)
        + stats.topic_term(k2, alpha * new_b)
        - stats.topic_term(k2, alpha * old_b);
    d += walk_terms_at(state, corpus, t, k, new_pi_a) - walk_terms_at(state, corpus, t, k, pi_a);
    d += walk_terms_at(state, corpus, t, k2, new_pi_b) - walk_terms_at(state, corpus, t, k2, pi_b);
    if t == 0 {
        let pi0 = config.pi0();
        d += (config.gamma * pi0[k] - 1.0) * (new_pi_a.ln() - pi_a.ln());
        d += (config.gamma * pi0[k2] - 1.0) * (new_pi_b.ln() - pi_b.ln());
    }
    d
}

/// Change in the log posterior when `η_kj += delta`, `η_k2j −= delta`.
///
/// `π̃` is held fixed, so every implied `π_t` shifts in coordinates `k` and
/// `k2`; the affected factors are the walk, the first-period Dirichlet prior
/// and the penalty on `η`.
pub fn eta_transfer_delta(
    state: &ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    j: usize,
    k: usize,
    k2: usize,
    delta: f64,
) -> f64 {
    debug_assert_ne!(k, k2);
    let eps = config.epsilon_min;
    let periods = corpus.num_periods();
    let mut d = 0.0;
    for (coord, sign) in [(k, -1.0), (k2, 1.0)] {
        let mut prev_old = 0.0;
        let mut prev_new = 0.0;
        let mut walk_old = 0.0;
        let mut walk_new = 0.0;
        for t in 0..periods {
            let old = state.pi(corpus, t, coord);
            let new = old + sign * delta * corpus.covariates[t][j];
            if new < eps {
                return f64::NEG_INFINITY;
            }
            if t > 0 {
                walk_old += (old - prev_old).abs();
                walk_new += (new - prev_new).abs();
            } else {
                let a = config.gamma * config.pi0()[coord];
                d += (a - 1.0) * (new.ln() - old.ln());
            }
            prev_old = old;
            prev_new = new;
        }
        d -= state.lambda * (walk_new - walk_old);
    }
    let (ea, eb) = (state.eta[k][j], state.eta[k2][j]);
    d -= config.eta_penalty
        * ((ea + delta).abs() + (eb - delta).abs() - ea.abs() - eb.abs());
    d
}
