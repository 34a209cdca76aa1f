//! Forward simulation of corpora from the generative process, and
//! period-stratified train/test splits.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{standardize_covariates, Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::model::{recompute_counts, ChainState};
use crate::rng::{self, ChainRng};

/// Covariate series used by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariateSource {
    /// Used verbatim, `T` rows of length `p`.
    Given(Vec<Vec<f64>>),
    /// IID standard normal draws, standardized.
    Gaussian,
    /// `sin(2π (j+1) t / T)` per column, standardized.
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub topics: usize,
    pub vocab_size: usize,
    pub periods: usize,
    pub covariates: usize,
    pub docs_per_period: usize,
    /// Inclusive range of document lengths; equal bounds give a fixed length.
    pub tokens_per_doc: (usize, usize),
    pub beta: f64,
    pub gamma: f64,
    #[serde(default)]
    pub pi0: Option<Vec<f64>>,
    /// Fixed topic-word distributions; drawn from `Dir(β)` when absent.
    #[serde(default)]
    pub phi: Option<Vec<Vec<f64>>>,
    /// Fixed first-period weights; drawn from `Dir(γπ₀)` when absent.
    #[serde(default)]
    pub pi1: Option<Vec<f64>>,
    /// Rate of the Laplace increments. Infinity gives a constant walk.
    pub lambda: f64,
    pub eta: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub covariate_source: CovariateSource,
    /// Bypasses the per-document Dirichlet draw with a fixed `θ`.
    #[serde(default)]
    pub fixed_theta: Option<Vec<f64>>,
    pub epsilon_min: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    /// A spec with uniform `π₀`, sine covariates, zero `η` and unit `α`.
    pub fn basic(topics: usize, vocab_size: usize, periods: usize, covariates: usize) -> Self {
        Self {
            topics,
            vocab_size,
            periods,
            covariates,
            docs_per_period: 20,
            tokens_per_doc: (50, 50),
            beta: 0.1,
            gamma: 1.0,
            pi0: None,
            phi: None,
            pi1: None,
            lambda: 100.0,
            eta: vec![vec![0.0; covariates]; topics],
            alpha: vec![1.0; periods],
            covariate_source: CovariateSource::Sine,
            fixed_theta: None,
            epsilon_min: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.topics;
        let bad = |m: String| Err(Error::config(m));
        if k < 2 || self.vocab_size == 0 || self.periods == 0 {
            return bad("generator needs K >= 2, V >= 1 and T >= 1".into());
        }
        if self.tokens_per_doc.0 == 0 || self.tokens_per_doc.0 > self.tokens_per_doc.1 {
            return bad("tokens_per_doc must be a non-empty range of positive lengths".into());
        }
        if !(self.beta > 0.0 && self.gamma > 0.0 && self.lambda > 0.0) {
            return bad("beta, gamma and lambda must be positive".into());
        }
        if !(self.epsilon_min > 0.0 && self.epsilon_min < 1.0 / k as f64) {
            return bad("epsilon_min must lie in (0, 1/K)".into());
        }
        if self.alpha.len() != self.periods || self.alpha.iter().any(|a| !(*a > 0.0)) {
            return bad(format!("alpha needs {} positive entries", self.periods));
        }
        if self.eta.len() != k || self.eta.iter().any(|r| r.len() != self.covariates) {
            return bad(format!("eta must be {k} x {}", self.covariates));
        }
        for j in 0..self.covariates {
            if self.eta.iter().map(|r| r[j]).sum::<f64>().abs() > 1e-10 {
                return bad(format!("eta column {j} must sum to zero"));
            }
        }
        let on_simplex = |v: &[f64], n: usize| {
            v.len() == n && v.iter().all(|x| *x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() < 1e-9
        };
        if let Some(phi) = &self.phi {
            if phi.len() != k || !phi.iter().all(|r| on_simplex(r, self.vocab_size)) {
                return bad("phi rows must be distributions over the vocabulary".into());
            }
        }
        for (name, v) in [("pi0", &self.pi0), ("pi1", &self.pi1), ("fixed_theta", &self.fixed_theta)] {
            if let Some(v) = v {
                if !on_simplex(v, k) {
                    return bad(format!("{name} must lie on the {k}-simplex"));
                }
            }
        }
        if let CovariateSource::Given(y) = &self.covariate_source {
            if y.len() != self.periods || y.iter().any(|r| r.len() != self.covariates) {
                return bad(format!("given covariates must be {} x {}", self.periods, self.covariates));
            }
        }
        Ok(())
    }
}

/// All latent quantities behind a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub phi: Vec<Vec<f64>>,
    /// Walk positions before projection onto the feasible set.
    pub pi_raw: Vec<Vec<f64>>,
    /// Baseline weights after projection; these drive the documents.
    pub pi: Vec<Vec<f64>>,
    /// Whether the floor had to be enforced in each period.
    pub projected: Vec<bool>,
    pub pi_tilde: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub theta: Vec<Vec<f64>>,
    pub z: Vec<Vec<u32>>,
}

impl GroundTruth {
    /// The true latent state as a chain state over `corpus`, for scoring with
    /// `log_joint`.
    pub fn to_state(&self, corpus: &Corpus) -> Result<ChainState> {
        let counts = recompute_counts(corpus, &self.z, self.phi.len())?;
        Ok(ChainState {
            z: self.z.clone(),
            alpha: self.alpha.clone(),
            pi_tilde: self.pi_tilde.clone(),
            eta: self.eta.clone(),
            lambda: self.lambda,
            counts,
        })
    }
}

fn dirichlet<R: Rng + ?Sized>(shape: &[f64], rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = shape
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.iter_mut().for_each(|x| *x /= total);
    } else {
        // all gamma draws underflowed: put the mass on one coordinate
        let pick = categorical(shape, rng);
        draws = vec![0.0; shape.len()];
        draws[pick] = 1.0;
    }
    draws
}

fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    crate::sampler::sample_topic(weights, rng)
}

fn laplace<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    if rate.is_infinite() {
        return 0.0;
    }
    let u: f64 = rng.gen::<f64>() - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).ln() / rate
}

/// Moves `x` onto `{x_k ≥ lower_k, Σ x = 1}`: clamps to the bounds, then
/// removes surplus from the slack above the bounds, or spreads a deficit in
/// proportion to `x`. Returns whether any bound was active.
fn project(x: &mut [f64], lower: &[f64]) -> Result<bool> {
    let floor: f64 = lower.iter().sum();
    if floor > 1.0 {
        return Err(Error::config(
            "covariate shift leaves no feasible topic weights above the floor",
        ));
    }
    let mut clamped = false;
    for (v, &lb) in x.iter_mut().zip(lower) {
        if *v < lb {
            *v = lb;
            clamped = true;
        }
    }
    let sum: f64 = x.iter().sum();
    if sum > 1.0 {
        let slack: f64 = x.iter().zip(lower).map(|(v, lb)| v - lb).sum();
        let scale = (sum - 1.0) / slack;
        for (v, &lb) in x.iter_mut().zip(lower) {
            *v -= (*v - lb) * scale;
        }
    } else if sum < 1.0 {
        x.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(clamped)
}

pub fn generate(spec: &GeneratorSpec) -> Result<(Corpus, GroundTruth)> {
    spec.validate()?;
    let mut rng = rng::substream(spec.seed, rng::GENERATE, 0);
    let k = spec.topics;
    let v = spec.vocab_size;
    let periods = spec.periods;

    let y: Vec<Vec<f64>> = match &spec.covariate_source {
        CovariateSource::Given(y) => y.clone(),
        source => {
            let raw: Vec<Vec<f64>> = (0..periods)
                .map(|t| {
                    (0..spec.covariates)
                        .map(|j| match source {
                            CovariateSource::Sine => {
                                (std::f64::consts::TAU * (j + 1) as f64 * t as f64 / periods as f64).sin()
                            }
                            _ => rng.sample(StandardNormal),
                        })
                        .collect()
                })
                .collect();
            if periods >= 2 && spec.covariates > 0 {
                standardize_covariates(&raw)?
            } else {
                raw
            }
        }
    };

    let phi = match &spec.phi {
        Some(phi) => phi.clone(),
        None => (0..k).map(|_| dirichlet(&vec![spec.beta; v], &mut rng)).collect(),
    };
    let pi0 = spec.pi0.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
    let first = match &spec.pi1 {
        Some(p) => p.clone(),
        None => dirichlet(&pi0.iter().map(|b| spec.gamma * b).collect::<Vec<_>>(), &mut rng),
    };

    let shift = |t: usize, kk: usize| -> f64 {
        spec.eta[kk].iter().zip(&y[t]).map(|(e, yy)| e * yy).sum()
    };
    let mut pi_raw = Vec::with_capacity(periods);
    let mut pi: Vec<Vec<f64>> = Vec::with_capacity(periods);
    let mut projected = Vec::with_capacity(periods);
    let mut pi_tilde = Vec::with_capacity(periods);
    for t in 0..periods {
        let raw: Vec<f64> = if t == 0 {
            first.clone()
        } else {
            pi[t - 1].iter().map(|p| p + laplace(spec.lambda, &mut rng)).collect()
        };
        let lower: Vec<f64> = (0..k)
            .map(|kk| spec.epsilon_min * (1.0 + 1e-9) + (-shift(t, kk)).max(0.0))
            .collect();
        let mut row = raw.clone();
        projected.push(project(&mut row, &lower)?);
        pi_tilde.push((0..k).map(|kk| row[kk] + shift(t, kk)).collect::<Vec<f64>>());
        pi_raw.push(raw);
        pi.push(row);
    }

    let mut docs = Vec::with_capacity(periods);
    let mut theta = Vec::new();
    let mut z = Vec::new();
    for t in 0..periods {
        let prior: Vec<f64> = pi_tilde[t].iter().map(|w| spec.alpha[t] * w).collect();
        let mut period_docs = Vec::with_capacity(spec.docs_per_period);
        for i in 0..spec.docs_per_period {
            let len = rng.gen_range(spec.tokens_per_doc.0..=spec.tokens_per_doc.1);
            let th = match &spec.fixed_theta {
                Some(th) => th.clone(),
                None => dirichlet(&prior, &mut rng),
            };
            let mut tokens = Vec::with_capacity(len);
            let mut zs = Vec::with_capacity(len);
            for _ in 0..len {
                let topic = categorical(&th, &mut rng);
                tokens.push(categorical(&phi[topic], &mut rng) as u32);
                zs.push(topic as u32);
            }
            period_docs.push(Document {
                id: format!("t{t:03}-d{i:05}"),
                tokens,
            });
            theta.push(th);
            z.push(zs);
        }
        docs.push(period_docs);
    }

    let corpus = Corpus {
        vocabulary: Vocabulary::synthetic(v),
        period_labels: (0..periods).map(|t| format!("t{t:03}")).collect(),
        periods: docs,
        covariates: y,
        coverage: 1.0,
    };
    corpus.validate()?;
    let truth = GroundTruth {
        phi,
        pi_raw,
        pi,
        projected,
        pi_tilde,
        eta: spec.eta.clone(),
        alpha: spec.alpha.clone(),
        lambda: spec.lambda,
        theta,
        z,
    };
    Ok((corpus, truth))
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Corpus,
    pub test: Corpus,
    pub warnings: Vec<String>,
}

/// Sends each document to the test half independently with probability
/// `fraction`, keeping at least one training document in every period that
/// has one. Both halves keep all `T` periods, the vocabulary and covariates.
pub fn held_out_split(corpus: &Corpus, fraction: f64, rng: &mut ChainRng) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::config(format!("held-out fraction {fraction} must lie in (0, 1)")));
    }
    let mut warnings = Vec::new();
    let mut train_periods = Vec::with_capacity(corpus.num_periods());
    let mut test_periods = Vec::with_capacity(corpus.num_periods());
    for (docs, label) in corpus.periods.iter().zip(&corpus.period_labels) {
        let mut to_test: Vec<bool> = docs.iter().map(|_| rng.gen::<f64>() < fraction).collect();
        if docs.len() == 1 {
            if to_test[0] {
                warnings.push(format!("period {label} has a single document; kept for training"));
            }
            to_test[0] = false;
        } else if !docs.is_empty() && to_test.iter().all(|&b| b) {
            to_test[0] = false;
        }
        let (test, train): (Vec<_>, Vec<_>) = docs.iter().zip(&to_test).partition(|(_, &b)| b);
        train_periods.push(train.into_iter().map(|(d, _)| d.clone()).collect());
        test_periods.push(test.into_iter().map(|(d, _)| d.clone()).collect());
    }
    let with_periods = |periods: Vec<Vec<Document>>| Corpus {
        vocabulary: corpus.vocabulary.clone(),
        period_labels: corpus.period_labels.clone(),
        periods,
        covariates: corpus.covariates.clone(),
        coverage: corpus.coverage,
    };
    let test = with_periods(test_periods);
    if test.is_empty() {
        return Err(Error::input("held-out split produced an empty test set"));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Split {
        train: with_periods(train_periods),
        test,
        warnings,
    })
}
