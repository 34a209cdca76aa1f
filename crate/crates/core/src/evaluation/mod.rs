//! Posterior point estimates, topic-covariate correlation scores and
//! held-out perplexity.

mod left_to_right;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use left_to_right::left_to_right_loglik;

use crate::config::ModelConfig;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::PosteriorSummary;
use crate::rng;
use crate::sampler::Sample;

/// `π̄_k` below this leaves `ρ_k` undefined.
pub const MIN_PREVALENCE: f64 = 1e-8;

/// Averages retained samples into point estimates.
pub fn point_estimates(samples: &[Sample], corpus: &Corpus, config: &ModelConfig) -> Result<PosteriorSummary> {
    let first = samples
        .first()
        .ok_or_else(|| Error::input("no retained samples to summarize"))?;
    let k = first.topic_total.len();
    let v = corpus.vocab_size();
    let periods = first.alpha.len();
    let p = first.eta.first().map_or(0, Vec::len);
    let n = samples.len() as f64;
    let vb = v as f64 * config.beta;

    let mut phi_hat = vec![vec![0.0; v]; k];
    let mut pi_series = vec![vec![0.0; k]; periods];
    let mut prior_weights = vec![vec![0.0; k]; periods];
    let mut eta_hat = vec![vec![0.0; p]; k];
    let mut alpha_hat = vec![0.0; periods];
    let mut lambda_hat = 0.0;
    for s in samples {
        if s.word_topic.len() != v || s.alpha.len() != periods {
            return Err(Error::input("sample dimensions do not match the corpus"));
        }
        for (kk, row) in phi_hat.iter_mut().enumerate() {
            let denom = s.topic_total[kk] as f64 + vb;
            for (w, x) in row.iter_mut().enumerate() {
                *x += (s.word_topic[w][kk] as f64 + config.beta) / denom / n;
            }
        }
        for t in 0..periods {
            alpha_hat[t] += s.alpha[t] / n;
            for kk in 0..k {
                pi_series[t][kk] += s.pi[t][kk] / n;
                prior_weights[t][kk] += s.alpha[t] * s.pi_tilde[t][kk] / n;
            }
        }
        for (acc, row) in eta_hat.iter_mut().zip(&s.eta) {
            for (a, e) in acc.iter_mut().zip(row) {
                *a += e / n;
            }
        }
        lambda_hat += s.lambda / n;
    }
    let pi_bar: Vec<f64> = (0..k)
        .map(|kk| pi_series.iter().map(|r| r[kk]).sum::<f64>() / periods.max(1) as f64)
        .collect();
    let top_words = phi_hat.iter().map(|row| rank_descending(row)).collect();
    let mut summary = PosteriorSummary {
        phi_hat,
        pi_bar,
        pi_series,
        prior_weights,
        eta_hat,
        rho: Vec::new(),
        alpha_hat,
        lambda_hat,
        top_words,
        samples: samples.len(),
    };
    summary.rho = correlation_scores(&summary);
    Ok(summary)
}

/// Indices sorted by decreasing value, ties by increasing index.
pub fn rank_descending(values: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    idx.sort_by(|&a, &b| values[b as usize].total_cmp(&values[a as usize]).then(a.cmp(&b)));
    idx
}

/// `ρ_kj = η̂_kj / π̄_k`, the relative change of topic `k`'s weight per unit
/// of covariate `j`.
pub fn correlation_scores(summary: &PosteriorSummary) -> Vec<Vec<Option<f64>>> {
    summary
        .eta_hat
        .iter()
        .zip(&summary.pi_bar)
        .map(|(row, &pi)| {
            row.iter()
                .map(|&e| (pi >= MIN_PREVALENCE).then(|| e / pi))
                .collect()
        })
        .collect()
}

/// Topics ordered by decreasing mean prevalence `π̄`.
pub fn prevalence_order(summary: &PosteriorSummary) -> Vec<usize> {
    rank_descending(&summary.pi_bar)
        .into_iter()
        .map(|k| k as usize)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodPerplexity {
    pub label: String,
    pub documents: usize,
    pub tokens: usize,
    pub log_likelihood: f64,
    /// `None` for periods without test documents.
    pub perplexity: Option<f64>,
    /// Delta-method standard error; needs at least two documents.
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScore {
    pub period: usize,
    pub id: String,
    pub tokens: usize,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub particles: usize,
    pub periods: Vec<PeriodPerplexity>,
    pub overall_perplexity: f64,
    pub overall_std_error: Option<f64>,
    pub total_tokens: usize,
    pub total_log_likelihood: f64,
    pub documents: Vec<DocumentScore>,
    pub warnings: Vec<String>,
}

/// `exp(−Σ l_i / Σ n_i)` and its delta-method standard error treating
/// documents as independent draws.
pub fn pooled_perplexity(scores: &[(f64, usize)]) -> Option<(f64, Option<f64>)> {
    let tokens: usize = scores.iter().map(|s| s.1).sum();
    if tokens == 0 {
        return None;
    }
    let ll: f64 = scores.iter().map(|s| s.0).sum();
    let rate = ll / tokens as f64;
    let perp = (-rate).exp();
    let m = scores.len();
    let se = (m >= 2).then(|| {
        let resid: f64 = scores.iter().map(|&(l, n)| (l - rate * n as f64).powi(2)).sum();
        let var_rate = m as f64 / (m as f64 - 1.0) * resid / (tokens as f64).powi(2);
        perp * var_rate.sqrt()
    });
    Some((perp, se))
}

/// Held-out perplexity of `test` using the `φ̂` and per-period document prior
/// of `summary`. Documents are scored in parallel, each with its own random
/// stream derived from `seed`.
pub fn perplexity(
    test: &Corpus,
    summary: &PosteriorSummary,
    particles: usize,
    seed: u64,
    model: &str,
) -> Result<EvalReport> {
    if particles == 0 {
        return Err(Error::config("particles must be at least 1"));
    }
    if summary.prior_weights.len() != test.num_periods() {
        return Err(Error::input(format!(
            "summary covers {} periods, test corpus has {}",
            summary.prior_weights.len(),
            test.num_periods()
        )));
    }
    if summary.phi_hat.first().map_or(0, Vec::len) != test.vocab_size() {
        return Err(Error::input("test corpus vocabulary differs from the model's"));
    }
    let docs: Vec<(usize, &crate::corpus::Document)> = test.documents().collect();
    let documents: Vec<DocumentScore> = docs
        .par_iter()
        .enumerate()
        .map(|(i, (t, doc))| {
            let mut rng = rng::substream(seed, rng::EVAL, i as u64);
            let lp = left_to_right_loglik(&doc.tokens, &summary.prior_weights[*t], &summary.phi_hat, particles, &mut rng);
            DocumentScore {
                period: *t,
                id: doc.id.clone(),
                tokens: doc.len(),
                log_likelihood: lp.iter().sum(),
            }
        })
        .collect();

    let mut warnings = Vec::new();
    let periods = (0..test.num_periods())
        .map(|t| {
            let scores: Vec<(f64, usize)> = documents
                .iter()
                .filter(|d| d.period == t)
                .map(|d| (d.log_likelihood, d.tokens))
                .collect();
            let pooled = pooled_perplexity(&scores);
            if pooled.is_none() {
                let w = format!("period {} has no test documents", test.period_labels[t]);
                log::warn!("{w}");
                warnings.push(w);
            }
            PeriodPerplexity {
                label: test.period_labels[t].clone(),
                documents: scores.len(),
                tokens: scores.iter().map(|s| s.1).sum(),
                log_likelihood: scores.iter().map(|s| s.0).sum(),
                perplexity: pooled.map(|p| p.0),
                std_error: pooled.and_then(|p| p.1),
            }
        })
        .collect();
    let all: Vec<(f64, usize)> = documents.iter().map(|d| (d.log_likelihood, d.tokens)).collect();
    let (overall_perplexity, overall_std_error) =
        pooled_perplexity(&all).ok_or_else(|| Error::input("test corpus has no tokens"))?;
    Ok(EvalReport {
        model: model.to_string(),
        particles,
        periods,
        overall_perplexity,
        overall_std_error,
        total_tokens: all.iter().map(|s| s.1).sum(),
        total_log_likelihood: all.iter().map(|s| s.0).sum(),
        documents,
        warnings,
    })
}
