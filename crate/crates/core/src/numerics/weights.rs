//! Log-domain transition weights, categorical selection and holding-time
//! sampling.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::NumericError;

/// A probability (or unnormalized weight) on the log scale. `-inf` encodes a
/// zero weight; `+inf` and NaN are never produced by this module.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(pub f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn probability(self) -> f64 {
        self.0.exp()
    }
}

/// `min(0, (log_pi_y - log_pi_x) / temp)`: the log of the annealed Metropolis
/// acceptance probability for a move from `x` to `y`.
pub fn log_acceptance(log_pi_x: f64, log_pi_y: f64, temp: f64) -> Result<LogWeight, NumericError> {
    if log_pi_x == f64::NEG_INFINITY {
        return Err(NumericError::InvalidCurrentState);
    }
    if log_pi_x.is_nan() || log_pi_x == f64::INFINITY {
        return Err(NumericError::NonFinite(log_pi_x));
    }
    if log_pi_y.is_nan() || log_pi_y == f64::INFINITY {
        return Err(NumericError::NonFinite(log_pi_y));
    }
    if log_pi_y == f64::NEG_INFINITY {
        return Ok(LogWeight::ZERO);
    }
    Ok(LogWeight(((log_pi_y - log_pi_x) / temp).min(0.0)))
}

/// `min(0, (log_pi_y - log_pi_x) / temp + log_q_ratio)`, where `log_q_ratio`
/// is `log Q(y, x) - log Q(x, y)`. Reduces to [`log_acceptance`] for
/// symmetric proposals.
pub fn log_hastings_acceptance(
    log_pi_x: f64,
    log_pi_y: f64,
    temp: f64,
    log_q_ratio: f64,
) -> Result<LogWeight, NumericError> {
    let plain = log_acceptance(log_pi_x, log_pi_y, temp)?;
    if log_q_ratio == 0.0 || plain.is_zero() {
        return Ok(plain);
    }
    if !log_q_ratio.is_finite() {
        return Err(NumericError::NonFinite(log_q_ratio));
    }
    Ok(LogWeight(((log_pi_y - log_pi_x) / temp + log_q_ratio).min(0.0)))
}

/// Log of the sum of `exp(w)`; `-inf` for an empty or all-zero list.
pub fn log_sum_exp(log_weights: &[LogWeight]) -> f64 {
    let max = log_weights
        .iter()
        .map(|w| w.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let total: f64 = log_weights.iter().map(|w| (w.0 - max).exp()).sum();
    max + total.ln()
}

/// Maps a uniform draw `u` in `[0, 1)` to an index with probability
/// proportional to `exp(w_i)`. Weights are shifted by their maximum before
/// exponentiation.
pub fn pick_with_uniform(log_weights: &[LogWeight], u: f64) -> Result<usize, NumericError> {
    let mut max = f64::NEG_INFINITY;
    for w in log_weights {
        if w.0.is_nan() || w.0 == f64::INFINITY {
            return Err(NumericError::NonFinite(w.0));
        }
        max = max.max(w.0);
    }
    if max == f64::NEG_INFINITY {
        return Err(NumericError::EmptySupport);
    }
    let total: f64 = log_weights.iter().map(|w| (w.0 - max).exp()).sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in log_weights.iter().enumerate() {
        if w.0 == f64::NEG_INFINITY {
            continue;
        }
        acc += (w.0 - max).exp();
        last_positive = i;
        if target < acc {
            return Ok(i);
        }
    }
    // rounding left `target` at or just past the accumulated total
    Ok(last_positive)
}

pub fn categorical_pick<R: Rng + ?Sized>(
    log_weights: &[LogWeight],
    rng: &mut R,
) -> Result<usize, NumericError> {
    let u: f64 = rng.random();
    pick_with_uniform(log_weights, u)
}

/// Holding time of a rejection-free chain: `1 + G` with
/// `P(G = g) = (1 - p)^g p`.
pub fn sample_multiplicity<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64, NumericError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(NumericError::Domain(p));
    }
    if p == 1.0 {
        return Ok(1);
    }
    let geom = Geometric::new(p).map_err(|_| NumericError::Domain(p))?;
    Ok(1 + geom.sample(rng))
}
