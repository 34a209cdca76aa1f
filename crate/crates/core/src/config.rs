//! Model hyperparameters and sampler settings, with a flat `key = value`
//! text format.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Temporal model with endogenous walk and exogenous covariate shift.
    Gclda,
    /// Collapsed Gibbs LDA with a symmetric document prior.
    Lda,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gclda" => Ok(Mode::Gclda),
            "lda" => Ok(Mode::Lda),
            other => Err(Error::config(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gclda => "gclda",
            Mode::Lda => "lda",
        })
    }
}

/// Shape/rate parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() - crate::model::ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub topics: usize,
    pub beta: f64,
    pub gamma: f64,
    /// Base weights of the Dirichlet prior on the first period; `None` means uniform.
    pub pi0: Option<Vec<f64>>,
    pub alpha_prior: GammaPrior,
    pub lambda_prior: GammaPrior,
    /// Rate `c` of the penalty `exp(-c Σ|η_kj|)`.
    pub eta_penalty: f64,
    /// Per-topic Dirichlet parameter of the LDA baseline; `None` means `50 / K`.
    pub lda_alpha: Option<f64>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub step_alpha: f64,
    pub step_pi: f64,
    pub step_eta: f64,
    /// Adapt step sizes towards 25-45% acceptance during burn-in.
    pub tune_steps: bool,
    pub epsilon_min: f64,
    /// Sweeps between checkpoints written by the CLI; 0 disables them.
    pub checkpoint_every: usize,
    pub particles: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            topics: 50,
            beta: 0.01,
            gamma: 1.0,
            pi0: None,
            alpha_prior: GammaPrior { shape: 1.0, rate: 1.0 },
            lambda_prior: GammaPrior { shape: 1.0, rate: 1.0 },
            eta_penalty: 0.01,
            lda_alpha: None,
            iterations: 5000,
            burn_in: 1000,
            thin: 10,
            seed: 0,
            step_alpha: 0.1,
            step_pi: 0.01,
            step_eta: 0.01,
            tune_steps: true,
            epsilon_min: 1e-6,
            checkpoint_every: 500,
            particles: 20,
        }
    }
}

impl ModelConfig {
    pub fn with_topics(topics: usize) -> Self {
        Self {
            topics,
            ..Self::default()
        }
    }

    pub fn pi0(&self) -> Vec<f64> {
        self.pi0
            .clone()
            .unwrap_or_else(|| vec![1.0 / self.topics as f64; self.topics])
    }

    pub fn lda_alpha(&self) -> f64 {
        self.lda_alpha.unwrap_or(50.0 / self.topics as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.topics;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if k < 2 {
            return Err(Error::config("topics must be at least 2"));
        }
        positive("beta", self.beta)?;
        positive("gamma", self.gamma)?;
        positive("alpha_shape", self.alpha_prior.shape)?;
        positive("alpha_rate", self.alpha_prior.rate)?;
        positive("lambda_shape", self.lambda_prior.shape)?;
        positive("lambda_rate", self.lambda_prior.rate)?;
        positive("eta_penalty", self.eta_penalty)?;
        positive("lda_alpha", self.lda_alpha())?;
        positive("step_alpha", self.step_alpha)?;
        positive("step_pi", self.step_pi)?;
        positive("step_eta", self.step_eta)?;
        if let Some(pi0) = &self.pi0 {
            if pi0.len() != k {
                return Err(Error::config(format!("pi0 has {} entries, expected {k}", pi0.len())));
            }
            if pi0.iter().any(|&w| !(w > 0.0)) || (pi0.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::config("pi0 entries must be positive and sum to 1"));
            }
        }
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(Error::config("burn_in must be smaller than iterations"));
        }
        if self.thin == 0 {
            return Err(Error::config("thin must be at least 1"));
        }
        if !(self.epsilon_min > 0.0 && self.epsilon_min < 1.0 / k as f64) {
            return Err(Error::config("epsilon_min must lie in (0, 1/topics)"));
        }
        if self.particles == 0 {
            return Err(Error::config("particles must be at least 1"));
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// unknown and repeated keys are errors. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim();
            if entries.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
                return Err(Error::config(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        let mut c = Self::default();
        for (key, (line, value)) in &entries {
            let bad = |e: &dyn fmt::Display| Error::config(format!("line {line}: {key}: {e}"));
            macro_rules! num {
                () => {
                    value.parse().map_err(|e| bad(&e))?
                };
            }
            match key.as_str() {
                "topics" => c.topics = num!(),
                "beta" => c.beta = num!(),
                "gamma" => c.gamma = num!(),
                "pi0" => {
                    c.pi0 = if value == "uniform" {
                        None
                    } else {
                        Some(
                            value
                                .split(',')
                                .map(|v| v.trim().parse::<f64>())
                                .collect::<std::result::Result<_, _>>()
                                .map_err(|e| bad(&e))?,
                        )
                    }
                }
                "alpha_shape" => c.alpha_prior.shape = num!(),
                "alpha_rate" => c.alpha_prior.rate = num!(),
                "lambda_shape" => c.lambda_prior.shape = num!(),
                "lambda_rate" => c.lambda_prior.rate = num!(),
                "eta_penalty" => c.eta_penalty = num!(),
                "lda_alpha" => c.lda_alpha = if value == "auto" { None } else { Some(num!()) },
                "iterations" => c.iterations = num!(),
                "burn_in" => c.burn_in = num!(),
                "thin" => c.thin = num!(),
                "seed" => c.seed = num!(),
                "step_alpha" => c.step_alpha = num!(),
                "step_pi" => c.step_pi = num!(),
                "step_eta" => c.step_eta = num!(),
                "tune_steps" => c.tune_steps = num!(),
                "epsilon_min" => c.epsilon_min = num!(),
                "checkpoint_every" => c.checkpoint_every = num!(),
                "particles" => c.particles = num!(),
                _ => return Err(Error::config(format!("line {line}: unknown key {key}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Serializes to the `key = value` format accepted by [`ModelConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pi0 = match &self.pi0 {
            None => "uniform".to_string(),
            Some(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
        };
        let lda_alpha = self.lda_alpha.map_or("auto".to_string(), |a| format!("{a:?}"));
        let _ = writeln!(s, "topics = {}", self.topics);
        let _ = writeln!(s, "beta = {:?}", self.beta);
        let _ = writeln!(s, "gamma = {:?}", self.gamma);
        let _ = writeln!(s, "pi0 = {pi0}");
        let _ = writeln!(s, "alpha_shape = {:?}", self.alpha_prior.shape);
        let _ = writeln!(s, "alpha_rate = {:?}", self.alpha_prior.rate);
        let _ = writeln!(s, "lambda_shape = {:?}", self.lambda_prior.shape);
        let _ = writeln!(s, "lambda_rate = {:?}", self.lambda_prior.rate);
        let _ = writeln!(s, "eta_penalty = {:?}", self.eta_penalty);
        let _ = writeln!(s, "lda_alpha = {lda_alpha}");
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "burn_in = {}", self.burn_in);
        let _ = writeln!(s, "thin = {}", self.thin);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "step_alpha = {:?}", self.step_alpha);
        let _ = writeln!(s, "step_pi = {:?}", self.step_pi);
        let _ = writeln!(s, "step_eta = {:?}", self.step_eta);
        let _ = writeln!(s, "tune_steps = {}", self.tune_steps);
        let _ = writeln!(s, "epsilon_min = {:?}", self.epsilon_min);
        let _ = writeln!(s, "checkpoint_every = {}", self.checkpoint_every);
        let _ = writeln!(s, "particles = {}", self.particles);
        s
    }
}
