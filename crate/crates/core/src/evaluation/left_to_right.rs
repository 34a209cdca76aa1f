use rand::Rng;

use crate::sampler::sample_topic;

/// Sequential particle estimate of `log p(x_n | x_<n)` for each position of a
/// document, under a Dirichlet-multinomial document prior with concentration
/// vector `prior` and fixed topic-word distributions `phi` (`K × V`).
///
/// Each particle keeps topic assignments for the positions seen so far. At
/// position `n` every particle first resamples its earlier assignments in
/// order, then contributes the predictive probability of `x_n`, then draws an
/// assignment for `x_n`. The per-position estimate averages the particles'
/// predictive probabilities.
pub fn left_to_right_loglik<R: Rng + ?Sized>(
    tokens: &[u32],
    prior: &[f64],
    phi: &[Vec<f64>],
    particles: usize,
    rng: &mut R,
) -> Vec<f64> {
    assert!(particles >= 1, "at least one particle is required");
    let k = prior.len();
    let prior_total: f64 = prior.iter().sum();
    let n = tokens.len();
    let mut assignments = vec![vec![0usize; n]; particles];
    let mut counts = vec![vec![0.0f64; k]; particles];
    let mut weights = vec![0.0; k];
    let mut out = Vec::with_capacity(n);

    for pos in 0..n {
        let mut total = 0.0;
        for r in 0..particles {
            let z = &mut assignments[r];
            let c = &mut counts[r];
            for prev in 0..pos {
                c[z[prev]] -= 1.0;
                let w = tokens[prev] as usize;
                for kk in 0..k {
                    weights[kk] = phi[kk][w] * (c[kk] + prior[kk]);
                }
                z[prev] = sample_topic(&weights, rng);
                c[z[prev]] += 1.0;
            }
            let w = tokens[pos] as usize;
            let mut predictive = 0.0;
            for kk in 0..k {
                weights[kk] = phi[kk][w] * (c[kk] + prior[kk]);
                predictive += weights[kk];
            }
            total += predictive / (pos as f64 + prior_total);
            z[pos] = sample_topic(&weights, rng);
            c[z[pos]] += 1.0;
        }
        out.push((total / particles as f64).ln());
    }
    out
}
