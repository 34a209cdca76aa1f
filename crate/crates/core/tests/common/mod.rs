#![allow(dead_code)]

use gclda::model::{recompute_counts, ChainState};
use gclda::Corpus;
use statrs::function::gamma::ln_gamma;

/// Two-sided Kolmogorov-Smirnov statistic of `draws` against `cdf`.
pub fn ks_statistic(draws: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = draws.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the Kolmogorov distribution with the small-sample
/// correction of Stephens.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Standard error of the mean of an autocorrelated series from `batches`
/// non-overlapping batch means.
pub fn batch_means_se(x: &[f64], batches: usize) -> f64 {
    let size = x.len() / batches;
    let means: Vec<f64> = x.chunks_exact(size).take(batches).map(mean).collect();
    (variance(&means) / batches as f64).sqrt()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Every assignment of `n` tokens to `k` topics, in mixed-radix order with
/// the first token as the least significant digit.
pub fn all_assignments(n: usize, k: usize) -> Vec<Vec<u32>> {
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = (code % k) as u32;
                    code /= k;
                    d
                })
                .collect()
        })
        .collect()
}

pub fn assignment_index(z: &[u32], k: usize) -> usize {
    z.iter().rev().fold(0, |acc, &d| acc * k + d as usize)
}

/// Exact collapsed posterior over flattened assignments for a symmetric
/// document prior `a` per topic and topic-word smoothing `beta`, written out
/// from the Dirichlet-multinomial marginals.
pub fn lda_posterior(docs: &[Vec<u32>], k: usize, v: usize, a: f64, beta: f64) -> Vec<f64> {
    let n: usize = docs.iter().map(Vec::len).sum();
    let logs: Vec<f64> = all_assignments(n, k)
        .iter()
        .map(|z| {
            let mut wt = vec![vec![0.0; k]; v];
            let mut pos = 0;
            let mut lp = 0.0;
            for doc in docs {
                let mut dt = vec![0.0; k];
                for &w in doc {
                    let zz = z[pos] as usize;
                    dt[zz] += 1.0;
                    wt[w as usize][zz] += 1.0;
                    pos += 1;
                }
                lp += dt.iter().map(|c| ln_gamma(c + a) - ln_gamma(a)).sum::<f64>();
            }
            for kk in 0..k {
                let nk: f64 = wt.iter().map(|r| r[kk]).sum();
                lp += ln_gamma(v as f64 * beta) - ln_gamma(nk + v as f64 * beta);
                lp += wt.iter().map(|r| ln_gamma(r[kk] + beta) - ln_gamma(beta)).sum::<f64>();
            }
            lp
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Assignments of all documents flattened in corpus order.
pub fn flatten(z: &[Vec<u32>]) -> Vec<u32> {
    z.iter().flatten().copied().collect()
}

/// Rebuilds the count matrices for `state` from its assignments.
pub fn recount(state: &mut ChainState, corpus: &Corpus) {
    state.counts = recompute_counts(corpus, &state.z, state.topics()).unwrap();
}
