mod common;

use common::*;
use gclda::container::{self, Kind};
use gclda::model::{alpha_delta, lambda_posterior, log_joint, recompute_counts, PeriodStats};
use gclda::sampler::{
    gibbs_update_z, initialize_state, sweep, update_alpha, update_eta, update_lambda,
    update_pi_tilde, Chain, Checkpoint, StepSizes,
};
use gclda::{ChainState, Corpus, Mode, ModelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Gamma};

fn empty(periods: usize, covariates: Vec<Vec<f64>>) -> Corpus {
    Corpus::from_tokens(4, vec![vec![]; periods], covariates)
}

fn state_for(corpus: &Corpus, z: Vec<Vec<u32>>, k: usize, alpha: f64, pi: Vec<f64>) -> ChainState {
    let periods = corpus.num_periods();
    ChainState {
        counts: recompute_counts(corpus, &z, k).unwrap(),
        z,
        alpha: vec![alpha; periods],
        pi_tilde: vec![pi; periods],
        eta: vec![vec![0.0; corpus.num_covariates()]; k],
        lambda: 1.0,
    }
}

#[test]
fn gibbs_frequencies_match_conditional() {
    // With the first token removed the counts are doc [2, 0], word 0 [3, 1]
    // and totals [10, 5].
    let docs = vec![
        vec![0, 0, 1],
        vec![0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    ];
    let z = vec![vec![0, 0, 0], vec![0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1]];
    let corpus = Corpus::from_tokens(2, vec![docs], vec![vec![]]);
    let mut state = state_for(&corpus, z, 2, 1.0, vec![0.5, 0.5]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut weights = [0.0; 2];
    let n = 1_000_000;
    let mut hits = 0usize;
    for _ in 0..n {
        let k = gibbs_update_z(&mut state, 0, 0, 0, &[0.5, 0.5], 0.01, 2, &mut weights, &mut rng).unwrap();
        hits += (k == 0) as usize;
    }
    let p = 0.8818716208013895;
    let freq = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((freq - p).abs() < 3.0 * se, "{freq} vs {p}");
    assert_eq!(recompute_counts(&corpus, &state.z, 2).unwrap(), state.counts);
}

#[test]
fn uniform_conditional_without_counts() {
    let corpus = Corpus::from_tokens(3, vec![vec![vec![2]]], vec![vec![]]);
    let mut state = state_for(&corpus, vec![vec![0]], 3, 1.5, vec![1.0 / 3.0; 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut weights = [0.0; 3];
    let mut freq = [0.0; 3];
    let n = 300_000;
    for _ in 0..n {
        let k = gibbs_update_z(&mut state, 0, 0, 2, &[0.5; 3], 0.1, 3, &mut weights, &mut rng).unwrap();
        freq[k as usize] += 1.0 / n as f64;
    }
    assert!((weights[0] - weights[1]).abs() < 1e-15 && (weights[1] - weights[2]).abs() < 1e-15);
    let se = (2.0 / 9.0 / n as f64).sqrt();
    assert!(freq.iter().all(|f| (f - 1.0 / 3.0).abs() < 4.0 * se), "{freq:?}");
}

#[test]
fn alpha_on_empty_period_samples_prior() {
    let corpus = empty(1, vec![vec![]]);
    let config = ModelConfig::with_topics(2);
    let mut state = state_for(&corpus, vec![], 2, 1.0, vec![0.5, 0.5]);
    let stats = PeriodStats::for_period(&corpus, &state.counts, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..20 {
            update_alpha(&mut state, &stats, &config, 0, 3.0, &mut rng).unwrap();
        }
        draws.push(state.alpha[0]);
    }
    let prior = Gamma::new(1.0, 1.0).unwrap();
    let p = ks_pvalue(ks_statistic(&draws, |x| prior.cdf(x)), n);
    assert!(p > 0.001, "KS p = {p}");
}

#[test]
fn alpha_rejects_non_positive_proposals() {
    let corpus = Corpus::from_tokens(2, vec![vec![vec![0, 1]]], vec![vec![]]);
    let config = ModelConfig::with_topics(2);
    let mut state = state_for(&corpus, vec![vec![0, 1]], 2, 0.1, vec![0.5, 0.5]);
    let stats = PeriodStats::for_period(&corpus, &state.counts, 0);
    assert_eq!(alpha_delta(&stats, &state, &config, 0, -0.3), f64::NEG_INFINITY);
    assert_eq!(alpha_delta(&stats, &state, &config, 0, 0.0), f64::NEG_INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        update_alpha(&mut state, &stats, &config, 0, 5.0, &mut rng).unwrap();
        assert!(state.alpha[0] > 0.0);
    }
}

#[test]
fn alpha_target_prefers_small_concentration_for_pure_document() {
    let corpus = Corpus::from_tokens(3, vec![vec![vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0]]], vec![vec![]]);
    let mut config = ModelConfig::with_topics(2);
    config.alpha_prior.rate = 0.01;
    let mut state = state_for(&corpus, vec![vec![1; 10]], 2, 0.1, vec![0.5, 0.5]);
    let stats = PeriodStats::for_period(&corpus, &state.counts, 0);
    let small = log_joint(&state, &corpus, &config);
    let local = alpha_delta(&stats, &state, &config, 0, 100.0);
    state.alpha[0] = 100.0;
    let large = log_joint(&state, &corpus, &config);
    assert!(large < small);
    assert!((local - (large - small)).abs() < 1e-9);
}

#[test]
fn pi_transfers_preserve_row_sums() {
    let docs = vec![vec![vec![0, 1, 2, 3], vec![1, 1]], vec![vec![2, 3, 3]], vec![vec![0]]];
    let corpus = Corpus::from_tokens(4, docs, vec![vec![0.4], vec![-1.0], vec![0.6]]);
    let mut config = ModelConfig::with_topics(3);
    config.step_pi = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut state = initialize_state(&corpus, &config, Mode::Gclda, &mut rng).unwrap();
    let mut accepted = 0;
    for _ in 0..2000 {
        for t in 0..3 {
            let before: f64 = state.pi_tilde[t].iter().sum();
            let stats = PeriodStats::for_period(&corpus, &state.counts, t);
            accepted += update_pi_tilde(&mut state, &stats, &corpus, &config, t, 0.2, &mut rng).unwrap();
            let after: f64 = state.pi_tilde[t].iter().sum();
            assert!((after - before).abs() < 1e-12);
            assert!(state.pi_tilde[t].iter().all(|&w| w >= config.epsilon_min));
        }
    }
    assert!(accepted > 0);
    // η is still zero, so the baseline equals the realized weights.
    assert_eq!(state.implied_pi(&corpus), state.pi_tilde);
}

#[test]
fn pi_prior_moments_without_documents() {
    let corpus = empty(1, vec![vec![]]);
    let mut config = ModelConfig::with_topics(2);
    config.epsilon_min = 1e-12;
    let mut state = state_for(&corpus, vec![], 2, 1.0, vec![0.5, 0.5]);
    let stats = PeriodStats::for_period(&corpus, &state.counts, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut x = Vec::new();
    for _ in 0..200_000 {
        for _ in 0..5 {
            update_pi_tilde(&mut state, &stats, &corpus, &config, 0, 0.5, &mut rng).unwrap();
        }
        x.push(state.pi_tilde[0][0]);
    }
    // Dir(1/2, 1/2): mean 1/2, variance 1/8.
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    assert!((mean(&x) - 0.5).abs() < 3.0 * batch_means_se(&x, 50));
    assert!((mean(&sq) - 0.375).abs() < 3.0 * batch_means_se(&sq, 50));
}

#[test]
fn eta_columns_stay_zero_sum() {
    let docs = vec![vec![vec![0, 1]], vec![vec![2, 3]], vec![vec![1, 3]], vec![vec![0]]];
    let y = vec![vec![0.3, -1.0], vec![1.2, 0.1], vec![-0.7, 0.5], vec![-0.8, 0.4]];
    let corpus = Corpus::from_tokens(4, docs, y);
    let config = ModelConfig::with_topics(4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = initialize_state(&corpus, &config, Mode::Gclda, &mut rng).unwrap();
    let mut accepted = 0;
    for _ in 0..5000 {
        accepted += update_eta(&mut state, &corpus, &config, 0.05, &mut rng).unwrap().0;
        for j in 0..2 {
            let s: f64 = state.eta.iter().map(|r| r[j]).sum();
            assert!(s.abs() < 1e-10);
        }
    }
    assert!(accepted > 100);
    state.check_invariants(&corpus, &config).unwrap();
}

#[test]
fn eta_with_zero_covariates_samples_penalty_prior() {
    // y ≡ 0, K = 2, p = 1: η = (e, −e) and the target is exp(−2c|e|).
    let corpus = empty(3, vec![vec![0.0]; 3]);
    let mut config = ModelConfig::with_topics(2);
    config.eta_penalty = 1.0;
    let mut state = state_for(&corpus, vec![], 2, 1.0, vec![0.5, 0.5]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 50_000;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..10 {
            update_eta(&mut state, &corpus, &config, 2.0, &mut rng).unwrap();
        }
        draws.push(state.eta[0][0].abs());
    }
    // CDF of |e| by trapezoidal integration of the unnormalized density.
    let c = config.eta_penalty;
    let h = 1e-4;
    let grid: Vec<f64> = (0..=200_000).map(|i| i as f64 * h).collect();
    let dens: Vec<f64> = grid.iter().map(|e| (-c * (e.abs() + (-e).abs())).exp()).collect();
    let mut cum = vec![0.0; grid.len()];
    for i in 1..grid.len() {
        cum[i] = cum[i - 1] + 0.5 * h * (dens[i] + dens[i - 1]);
    }
    let norm = *cum.last().unwrap();
    let cdf = |x: f64| {
        let i = ((x / h) as usize).min(grid.len() - 2);
        let frac = (x - grid[i]) / h;
        (cum[i] + frac * (cum[i + 1] - cum[i])) / norm
    };
    let p = ks_pvalue(ks_statistic(&draws, cdf), n);
    assert!(p > 0.001, "KS p = {p}");
}

#[test]
fn lambda_draws_have_conjugate_moments() {
    let corpus = empty(3, vec![vec![]; 3]);
    let config = ModelConfig::with_topics(2);
    let mut state = state_for(&corpus, vec![], 2, 1.0, vec![0.5, 0.5]);
    state.pi_tilde = vec![vec![0.5, 0.5], vec![0.6, 0.4], vec![0.45, 0.55]];
    assert_eq!(lambda_posterior(&state, &corpus, &config), (5.0, 1.5));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| update_lambda(&mut state, &corpus, &config, &mut rng).unwrap())
        .collect();
    let se = (variance(&draws) / draws.len() as f64).sqrt();
    assert!((mean(&draws) - 5.0 / 1.5).abs() < 3.0 * se);

    let single = empty(1, vec![vec![]]);
    let one = state_for(&single, vec![], 2, 1.0, vec![0.5, 0.5]);
    assert_eq!(lambda_posterior(&one, &single, &config), (1.0, 1.0));
}

fn small_corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let docs = (0..4)
        .map(|_| {
            (0..5)
                .map(|_| (0..rng.gen_range(3..15)).map(|_| rng.gen_range(0..12)).collect())
                .collect()
        })
        .collect();
    let y = vec![vec![-1.2], vec![-0.3], vec![0.4], vec![1.1]];
    Corpus::from_tokens(12, docs, y)
}

#[test]
fn initial_state_is_valid() {
    let corpus = small_corpus();
    let config = ModelConfig::with_topics(4);
    for mode in [Mode::Gclda, Mode::Lda] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let state = initialize_state(&corpus, &config, mode, &mut rng).unwrap();
        assert!(state.eta.iter().flatten().all(|&e| e == 0.0));
        assert!(log_joint(&state, &corpus, &config).is_finite());
        assert_eq!(state.counts, recompute_counts(&corpus, &state.z, 4).unwrap());
        state.check_invariants(&corpus, &config).unwrap();
    }
    let mut bad = config.clone();
    bad.burn_in = bad.iterations;
    assert!(initialize_state(&corpus, &bad, Mode::Gclda, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}

#[test]
fn same_seed_gives_identical_samples() {
    let corpus = small_corpus();
    let mut config = ModelConfig::with_topics(3);
    config.iterations = 200;
    config.burn_in = 100;
    config.thin = 5;
    for mode in [Mode::Gclda, Mode::Lda] {
        let a = Chain::seeded(&corpus, &config, mode).unwrap().run().unwrap();
        let b = Chain::seeded(&corpus, &config, mode).unwrap().run().unwrap();
        assert_eq!(a.samples.len(), 20);
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.diagnostics.records, b.diagnostics.records);
    }
    let mut other = config.clone();
    other.seed = 1;
    let a = Chain::seeded(&corpus, &config, Mode::Gclda).unwrap().run().unwrap();
    let c = Chain::seeded(&corpus, &other, Mode::Gclda).unwrap().run().unwrap();
    assert_ne!(a.samples, c.samples);
}

#[test]
fn resume_from_checkpoint_is_bit_exact() {
    let corpus = small_corpus();
    let mut config = ModelConfig::with_topics(3);
    config.iterations = 300;
    config.burn_in = 120;
    config.thin = 7;
    let full = Chain::seeded(&corpus, &config, Mode::Gclda).unwrap().run().unwrap();

    let mut first = Chain::seeded(&corpus, &config, Mode::Gclda).unwrap();
    for _ in 0..75 {
        first.step().unwrap();
    }
    let bytes = container::encode(Kind::Checkpoint, first.checkpoint()).unwrap();
    drop(first);
    let restored: Checkpoint = container::decode(Kind::Checkpoint, &bytes).unwrap();
    let resumed = Chain::resume(&corpus, restored).unwrap().run().unwrap();
    assert_eq!(full.samples, resumed.samples);
    assert_eq!(full.final_state, resumed.final_state);
    assert_eq!(full.diagnostics.records, resumed.diagnostics.records);
    assert_eq!(full.diagnostics.totals, resumed.diagnostics.totals);
}

#[test]
fn retained_states_satisfy_invariants() {
    let corpus = small_corpus();
    let mut config = ModelConfig::with_topics(3);
    config.iterations = 400;
    config.burn_in = 200;
    let mut chain = Chain::seeded(&corpus, &config, Mode::Gclda).unwrap();
    while !chain.is_finished() {
        chain.step().unwrap();
        chain.state().check_invariants(&corpus, &config).unwrap();
    }
    let out = chain.finish();
    assert_eq!(out.samples.len(), 20);
    let [a, p, e] = out.diagnostics.acceptance_rates();
    for rate in [a, p, e] {
        let r = rate.unwrap();
        assert!((0.0..=1.0).contains(&r));
    }
}

#[test]
fn single_period_model_reduces_to_lda() {
    // With T = 1, no covariates, α pinned at K·a by a sharp prior and π̃
    // pinned at uniform by a large γ, the assignments follow the LDA
    // posterior with symmetric prior a.
    let docs = vec![vec![0u32, 0, 1], vec![1u32, 1, 0]];
    let corpus = Corpus::from_tokens(2, vec![docs.clone()], vec![vec![]]);
    let a = 0.5;
    let exact = lda_posterior(&docs, 2, 2, a, 0.1);

    let mut lda = ModelConfig::with_topics(2);
    lda.lda_alpha = Some(a);
    lda.beta = 0.1;
    let mut gclda = lda.clone();
    gclda.alpha_prior.shape = 1e6;
    gclda.alpha_prior.rate = 1e6 / (2.0 * a);
    gclda.gamma = 1e6;
    gclda.step_alpha = 2e-3;
    gclda.step_pi = 1e-3;

    for (mode, config) in [(Mode::Lda, &lda), (Mode::Gclda, &gclda)] {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut state = initialize_state(&corpus, config, mode, &mut rng).unwrap();
        let steps = StepSizes::from_config(config);
        let n = 200_000;
        let mut freq = vec![0.0; exact.len()];
        for _ in 0..1000 {
            sweep(&mut state, &corpus, config, mode, &steps, &mut rng).unwrap();
        }
        for _ in 0..n {
            sweep(&mut state, &corpus, config, mode, &steps, &mut rng).unwrap();
            freq[assignment_index(&flatten(&state.z), 2)] += 1.0 / n as f64;
        }
        let tv = total_variation(&freq, &exact);
        assert!(tv < 0.02, "{mode}: TV {tv}");
    }
}

/// Data moves for the successive-conditional simulator: each token's word is
/// redrawn from its collapsed predictive given the other tokens and all
/// assignments.
fn resample_words(corpus: &mut Corpus, state: &mut ChainState, beta: f64, rng: &mut ChaCha8Rng) {
    let v = corpus.vocab_size();
    let mut d = 0;
    for t in 0..corpus.num_periods() {
        for i in 0..corpus.periods[t].len() {
            for pos in 0..corpus.periods[t][i].tokens.len() {
                let k = state.z[d][pos] as usize;
                let old = corpus.periods[t][i].tokens[pos];
                state.counts.word_topic[old as usize][k] -= 1;
                let weights: Vec<f64> = (0..v).map(|w| state.counts.word_topic[w][k] as f64 + beta).collect();
                let new = gclda::sampler::sample_topic(&weights, rng) as u32;
                state.counts.word_topic[new as usize][k] += 1;
                corpus.periods[t][i].tokens[pos] = new;
            }
            d += 1;
        }
    }
}

/// Forward draw of assignments and words from the collapsed model given the
/// document priors: Pólya urns for topics per document and words per topic.
fn forward_data(corpus: &mut Corpus, state: &mut ChainState, beta: f64, rng: &mut ChaCha8Rng) {
    let k = state.topics();
    let v = corpus.vocab_size();
    let mut word_topic = vec![vec![0.0; k]; v];
    let mut d = 0;
    for t in 0..corpus.num_periods() {
        let prior: Vec<f64> = state.pi_tilde[t].iter().map(|p| p * state.alpha[t]).collect();
        for i in 0..corpus.periods[t].len() {
            let mut dt = vec![0.0; k];
            for pos in 0..corpus.periods[t][i].tokens.len() {
                let w: Vec<f64> = (0..k).map(|kk| dt[kk] + prior[kk]).collect();
                let zz = gclda::sampler::sample_topic(&w, rng);
                dt[zz] += 1.0;
                let ww: Vec<f64> = (0..v).map(|x| word_topic[x][zz] + beta).collect();
                let word = gclda::sampler::sample_topic(&ww, rng);
                word_topic[word][zz] += 1.0;
                state.z[d][pos] = zz as u32;
                corpus.periods[t][i].tokens[pos] = word as u32;
            }
            d += 1;
        }
    }
    state.counts = recompute_counts(corpus, &state.z, k).unwrap();
}

fn geweke_stats(state: &ChainState, corpus: &Corpus) -> Vec<f64> {
    let tokens0: usize = corpus.periods[0].iter().map(|d| d.len()).sum();
    let share0 = state.counts.doc_topic[..corpus.periods[0].len()]
        .iter()
        .map(|r| r[0] as f64)
        .sum::<f64>()
        / tokens0 as f64;
    let same_word_topic = state.counts.word_topic.iter().map(|r| r.iter().filter(|&&c| c > 0).count() as f64).sum();
    vec![
        state.alpha[0],
        state.alpha[3],
        state.lambda / 100.0,
        state.pi_tilde[0][0],
        state.pi_tilde[3][1],
        state.eta[0][0],
        share0,
        same_word_topic,
    ]
}

#[test]
fn geweke_successive_conditional_matches_forward() {
    let k = 3;
    let y = vec![vec![-1.2], vec![-0.4], vec![0.4], vec![1.2]];
    let docs = vec![vec![vec![0u32; 6]; 3]; 4];
    let mut corpus = Corpus::from_tokens(10, docs, y);
    let mut config = ModelConfig::with_topics(k);
    config.beta = 0.5;
    config.gamma = 3.0;
    config.alpha_prior.shape = 2.0;
    config.alpha_prior.rate = 1.0;
    config.lambda_prior.shape = 20.0;
    config.lambda_prior.rate = 0.2;
    config.eta_penalty = 20.0;
    config.step_alpha = 1.5;
    config.step_pi = 0.1;
    config.step_eta = 0.05;
    let steps = StepSizes::from_config(&config);
    let n = 40_000;
    let thin = 5;

    // Forward: parameters from a prior-only chain, then data given parameters.
    let prior_corpus = Corpus::from_tokens(10, vec![vec![]; 4], corpus.covariates.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut prior_state = initialize_state(&prior_corpus, &config, Mode::Gclda, &mut rng).unwrap();
    let mut data_state = initialize_state(&corpus, &config, Mode::Gclda, &mut rng).unwrap();
    let mut forward: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..thin {
            sweep(&mut prior_state, &prior_corpus, &config, Mode::Gclda, &steps, &mut rng).unwrap();
        }
        data_state.alpha = prior_state.alpha.clone();
        data_state.pi_tilde = prior_state.pi_tilde.clone();
        data_state.eta = prior_state.eta.clone();
        data_state.lambda = prior_state.lambda;
        forward_data(&mut corpus, &mut data_state, config.beta, &mut rng);
        forward.push(geweke_stats(&data_state, &corpus));
    }

    // Successive conditional: posterior sweeps alternating with data moves.
    let mut state = data_state.clone();
    let mut successive: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..thin {
            sweep(&mut state, &corpus, &config, Mode::Gclda, &steps, &mut rng).unwrap();
            resample_words(&mut corpus, &mut state, config.beta, &mut rng);
        }
        successive.push(geweke_stats(&state, &corpus));
    }
    assert_eq!(state.counts, recompute_counts(&corpus, &state.z, k).unwrap());

    for j in 0..forward[0].len() {
        let f: Vec<f64> = forward.iter().map(|s| s[j]).collect();
        let s: Vec<f64> = successive.iter().map(|s| s[j]).collect();
        let se = (batch_means_se(&f, 40).powi(2) + batch_means_se(&s, 40).powi(2)).sqrt();
        let z = (mean(&f) - mean(&s)).abs() / se;
        assert!(z < 4.0, "statistic {j}: forward {} vs successive {} ({z:.2} s.e.)", mean(&f), mean(&s));
    }
}
