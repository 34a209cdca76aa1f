//! Metropolis-within-Gibbs chain for the temporal model and the collapsed
//! Gibbs LDA baseline.
//!
//! One sweep updates every topic assignment, then `α_t` and `π̃_t` for each
//! period in order, then `η`, then `λ`. In LDA mode only the assignments move;
//! the document prior is fixed at `Dir(a, ..., a)` with `a = lda_alpha`.

mod metropolis;
mod updates;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use metropolis::{accept, metropolis_step};
pub use updates::{
    gibbs_update_z, sample_topic, sweep_topics, update_alpha, update_eta, update_lambda,
    update_pi_tilde,
};

use crate::config::{Mode, ModelConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{log_joint, recompute_counts, ChainState, PeriodStats};
use crate::rng::{self, ChainRng};

const TUNE_WINDOW: usize = 50;
const TARGET_ACCEPT: (f64, f64) = (0.25, 0.45);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub alpha: f64,
    pub pi: f64,
    pub eta: f64,
}

impl StepSizes {
    pub fn from_config(config: &ModelConfig) -> Self {
        Self {
            alpha: config.step_alpha,
            pi: config.step_pi,
            eta: config.step_eta,
        }
    }
}

/// Accepted / proposed counts per Metropolis block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AcceptCounts {
    pub alpha: (u64, u64),
    pub pi: (u64, u64),
    pub eta: (u64, u64),
}

impl AcceptCounts {
    fn add(&mut self, other: &AcceptCounts) {
        for (a, b) in [
            (&mut self.alpha, other.alpha),
            (&mut self.pi, other.pi),
            (&mut self.eta, other.eta),
        ] {
            a.0 += b.0;
            a.1 += b.1;
        }
    }

    pub fn rates(&self) -> [Option<f64>; 3] {
        [self.alpha, self.pi, self.eta].map(|(a, p)| (p > 0).then(|| a as f64 / p as f64))
    }
}

/// One line of the diagnostics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub iteration: usize,
    pub log_joint: f64,
    pub accept_alpha: Option<f64>,
    pub accept_pi: Option<f64>,
    pub accept_eta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerDiagnostics {
    pub records: Vec<SweepRecord>,
    pub totals: AcceptCounts,
    /// Seconds per sweep. Not persisted, so artifacts stay reproducible.
    #[serde(skip)]
    pub sweep_seconds: Vec<f64>,
}

impl SamplerDiagnostics {
    pub fn acceptance_rates(&self) -> [Option<f64>; 3] {
        self.totals.rates()
    }
}

/// Retained draw without the per-token assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub iteration: usize,
    pub alpha: Vec<f64>,
    pub pi_tilde: Vec<Vec<f64>>,
    pub pi: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
    pub lambda: f64,
    pub word_topic: Vec<Vec<u32>>,
    pub topic_total: Vec<u64>,
    pub log_joint: f64,
}

impl Sample {
    pub fn from_state(state: &ChainState, corpus: &Corpus, iteration: usize, log_joint: f64) -> Self {
        Self {
            iteration,
            alpha: state.alpha.clone(),
            pi_tilde: state.pi_tilde.clone(),
            pi: state.implied_pi(corpus),
            eta: state.eta.clone(),
            lambda: state.lambda,
            word_topic: state.counts.word_topic.clone(),
            topic_total: state.counts.topic_total.clone(),
            log_joint,
        }
    }
}

/// Draws the starting state: uniform assignments, `α_t` and `λ` from their
/// priors, `π̃_t = π₀` and `η = 0`. In LDA mode `α_t π̃_t` is fixed at the
/// symmetric baseline prior instead.
pub fn initialize_state<R: Rng + ?Sized>(
    corpus: &Corpus,
    config: &ModelConfig,
    mode: Mode,
    rng: &mut R,
) -> Result<ChainState> {
    config.validate()?;
    corpus.validate()?;
    let k = config.topics;
    let periods = corpus.num_periods();
    let z: Vec<Vec<u32>> = corpus
        .documents()
        .map(|(_, d)| d.tokens.iter().map(|_| rng.gen_range(0..k as u32)).collect())
        .collect();
    let counts = recompute_counts(corpus, &z, k)?;
    let eta = vec![vec![0.0; corpus.num_covariates()]; k];
    let state = match mode {
        Mode::Gclda => {
            let pi0 = config.pi0();
            if pi0.iter().any(|&w| w < config.epsilon_min) {
                return Err(Error::config("pi0 has entries below epsilon_min"));
            }
            let alpha_prior = gamma_dist(config.alpha_prior.shape, config.alpha_prior.rate)?;
            let alpha = (0..periods)
                .map(|_| alpha_prior.sample(rng).max(f64::MIN_POSITIVE))
                .collect();
            let lambda = gamma_dist(config.lambda_prior.shape, config.lambda_prior.rate)?
                .sample(rng)
                .max(f64::MIN_POSITIVE);
            ChainState {
                z,
                alpha,
                pi_tilde: vec![pi0; periods],
                eta,
                lambda,
                counts,
            }
        }
        Mode::Lda => ChainState {
            z,
            alpha: vec![config.lda_alpha() * k as f64; periods],
            pi_tilde: vec![vec![1.0 / k as f64; k]; periods],
            eta,
            lambda: 1.0,
            counts,
        },
    };
    Ok(state)
}

fn gamma_dist(shape: f64, rate: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0 / rate).map_err(|e| Error::config(format!("Gamma({shape}, {rate}): {e}")))
}

/// Runs one full scan and returns the Metropolis acceptance counts.
pub fn sweep<R: Rng + ?Sized>(
    state: &mut ChainState,
    corpus: &Corpus,
    config: &ModelConfig,
    mode: Mode,
    steps: &StepSizes,
    rng: &mut R,
) -> Result<AcceptCounts> {
    sweep_topics(state, corpus, config, rng)?;
    let mut counts = AcceptCounts::default();
    if mode == Mode::Lda {
        return Ok(counts);
    }
    let offsets = corpus.period_offsets();
    let k = config.topics as u64;
    for t in 0..corpus.num_periods() {
        let stats = PeriodStats::build(&state.counts, offsets[t]..offsets[t + 1]);
        counts.alpha.0 += update_alpha(state, &stats, config, t, steps.alpha, rng)? as u64;
        counts.alpha.1 += 1;
        counts.pi.0 += update_pi_tilde(state, &stats, corpus, config, t, steps.pi, rng)? as u64;
        counts.pi.1 += k;
    }
    let (acc, prop) = update_eta(state, corpus, config, steps.eta, rng)?;
    counts.eta = (acc as u64, prop as u64);
    update_lambda(state, corpus, config, rng)?;
    Ok(counts)
}

/// Everything needed to continue a chain exactly where it stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub mode: Mode,
    pub config: ModelConfig,
    /// Completed sweeps.
    pub iteration: usize,
    pub state: ChainState,
    pub rng: ChainRng,
    pub steps: StepSizes,
    pub tune_window: AcceptCounts,
    pub diagnostics: SamplerDiagnostics,
    pub samples: Vec<Sample>,
}

pub struct Chain<'a> {
    corpus: &'a Corpus,
    checkpoint: Checkpoint,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub samples: Vec<Sample>,
    pub diagnostics: SamplerDiagnostics,
    pub final_state: ChainState,
}

impl<'a> Chain<'a> {
    /// Starts a chain, drawing the initial state from `init_rng`; all sweeps
    /// draw from `sweep_rng`.
    pub fn new<R: Rng + ?Sized>(
        corpus: &'a Corpus,
        config: &ModelConfig,
        mode: Mode,
        init_rng: &mut R,
        sweep_rng: ChainRng,
    ) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::input("cannot train on a corpus without documents"));
        }
        let state = initialize_state(corpus, config, mode, init_rng)?;
        Ok(Self {
            corpus,
            checkpoint: Checkpoint {
                mode,
                config: config.clone(),
                iteration: 0,
                state,
                rng: sweep_rng,
                steps: StepSizes::from_config(config),
                tune_window: AcceptCounts::default(),
                diagnostics: SamplerDiagnostics::default(),
                samples: Vec::new(),
            },
        })
    }

    /// Chain seeded from `config.seed` through the named substreams.
    pub fn seeded(corpus: &'a Corpus, config: &ModelConfig, mode: Mode) -> Result<Self> {
        let mut init = rng::substream(config.seed, rng::INIT, 0);
        Self::new(corpus, config, mode, &mut init, rng::substream(config.seed, rng::SWEEP, 0))
    }

    pub fn resume(corpus: &'a Corpus, checkpoint: Checkpoint) -> Result<Self> {
        checkpoint.config.validate()?;
        checkpoint.state.check_invariants(corpus, &checkpoint.config)?;
        Ok(Self { corpus, checkpoint })
    }

    pub fn state(&self) -> &ChainState {
        &self.checkpoint.state
    }

    pub fn iteration(&self) -> usize {
        self.checkpoint.iteration
    }

    pub fn is_finished(&self) -> bool {
        self.checkpoint.iteration >= self.checkpoint.config.iterations
    }

    pub fn checkpoint(&self) -> &Checkpoint {
        &self.checkpoint
    }

    pub fn steps(&self) -> StepSizes {
        self.checkpoint.steps
    }

    /// Advances one sweep, records diagnostics and retains the state if due.
    /// Returns the diagnostics record of the sweep.
    pub fn step(&mut self) -> Result<&SweepRecord> {
        let start = Instant::now();
        let cp = &mut self.checkpoint;
        let counts = sweep(&mut cp.state, self.corpus, &cp.config, cp.mode, &cp.steps, &mut cp.rng)?;
        cp.iteration += 1;
        let it = cp.iteration;
        let lj = log_joint(&cp.state, self.corpus, &cp.config);
        if !lj.is_finite() {
            return Err(Error::invariant(format!("state left the support at sweep {it}")));
        }

        cp.diagnostics.totals.add(&counts);
        if cp.config.tune_steps && cp.mode == Mode::Gclda && it <= cp.config.burn_in {
            cp.tune_window.add(&counts);
            if it.is_multiple_of(TUNE_WINDOW) {
                tune(&mut cp.steps, &cp.tune_window);
                cp.tune_window = AcceptCounts::default();
            }
        }
        let [accept_alpha, accept_pi, accept_eta] = counts.rates();
        cp.diagnostics.records.push(SweepRecord {
            iteration: it,
            log_joint: lj,
            accept_alpha,
            accept_pi,
            accept_eta,
        });
        if it > cp.config.burn_in && (it - cp.config.burn_in).is_multiple_of(cp.config.thin) {
            cp.samples.push(Sample::from_state(&cp.state, self.corpus, it, lj));
        }
        cp.diagnostics.sweep_seconds.push(start.elapsed().as_secs_f64());
        Ok(cp.diagnostics.records.last().expect("just pushed"))
    }

    /// Runs until `config.iterations` sweeps have completed.
    pub fn run(mut self) -> Result<ChainOutput> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> ChainOutput {
        ChainOutput {
            samples: self.checkpoint.samples,
            diagnostics: self.checkpoint.diagnostics,
            final_state: self.checkpoint.state,
        }
    }
}

fn tune(steps: &mut StepSizes, window: &AcceptCounts) {
    for (step, (acc, prop), cap) in [
        (&mut steps.alpha, window.alpha, f64::INFINITY),
        (&mut steps.pi, window.pi, 0.5),
        (&mut steps.eta, window.eta, f64::INFINITY),
    ] {
        if prop == 0 {
            continue;
        }
        let rate = acc as f64 / prop as f64;
        if rate < TARGET_ACCEPT.0 {
            *step *= 0.7;
        } else if rate > TARGET_ACCEPT.1 {
            *step = (*step * 1.4).min(cap);
        }
    }
}

/// Runs a full chain, using `rng` for initialization and every sweep.
pub fn run_chain(corpus: &Corpus, config: &ModelConfig, mode: Mode, rng: &mut ChainRng) -> Result<ChainOutput> {
    let sweep_rng = ChainRng::from_rng(&mut *rng).map_err(|e| Error::invariant(e.to_string()))?;
    Chain::new(corpus, config, mode, rng, sweep_rng)?.run()
}

/// Independent chains, one per seed, run in parallel. Results are in seed
/// order and do not depend on the thread count.
pub fn run_chains(corpus: &Corpus, config: &ModelConfig, mode: Mode, seeds: &[u64]) -> Result<Vec<ChainOutput>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let config = ModelConfig { seed, ..config.clone() };
            Chain::seeded(corpus, &config, mode)?.run()
        })
        .collect()
}

