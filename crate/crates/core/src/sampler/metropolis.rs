use rand::Rng;

use crate::error::{Error, Result};

/// Metropolis accept/reject on a precomputed `log p(new) − log p(old)`.
///
/// A `−∞` ratio (proposal outside the support) is rejected without drawing.
#[inline]
pub fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> Result<bool> {
    if log_ratio.is_nan() {
        return Err(Error::invariant("log acceptance ratio is NaN"));
    }
    if log_ratio >= 0.0 {
        return Ok(true);
    }
    if log_ratio == f64::NEG_INFINITY {
        return Ok(false);
    }
    Ok(rng.gen::<f64>().ln() < log_ratio)
}

/// One Metropolis transition with a symmetric proposal.
///
/// Returns the next value and whether the proposal was accepted. Fails if the
/// target is NaN anywhere it is evaluated or `−∞` at the current value.
pub fn metropolis_step<T, R, F, Q>(current: T, log_target: F, propose: Q, rng: &mut R) -> Result<(T, bool)>
where
    R: Rng + ?Sized,
    F: Fn(&T) -> f64,
    Q: FnOnce(&T, &mut R) -> T,
{
    let here = log_target(&current);
    if here.is_nan() {
        return Err(Error::invariant("log target is NaN at the current value"));
    }
    if here == f64::NEG_INFINITY {
        return Err(Error::invariant("chain is outside the support of the target"));
    }
    let proposal = propose(&current, rng);
    let there = log_target(&proposal);
    if there.is_nan() {
        return Err(Error::invariant("log target is NaN at the proposal"));
    }
    if accept(there - here, rng)? {
        Ok((proposal, true))
    } else {
        Ok((current, false))
    }
}
