//! Which neighbors actually matter at a state.

use crate::chain::neighbor_log_weights;
use crate::error::NumericError;
use crate::model::FiniteNeighborhood;
use crate::numerics::LogWeight;

/// Default cut-off: a neighbor is important when its transition weight is
/// within a factor `e^-10` of the largest one.
pub const IMPORTANT_THRESHOLD_LOG: f64 = -10.0;

/// Indices of neighbors whose `log q(Y)` exceeds `threshold_log` plus the
/// maximum `log q` over all neighbors, with `q` as in the rejection-free
/// step at temperature `temp`.
pub fn important_neighbors<M: FiniteNeighborhood>(
    model: &M,
    state: &M::State,
    temp: f64,
    threshold_log: f64,
) -> Result<Vec<usize>, NumericError> {
    let weights = transition_log_weights(model, state, temp)?;
    let max = weights.iter().map(|w| w.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(Vec::new());
    }
    Ok(weights
        .iter()
        .enumerate()
        .filter(|(_, w)| w.0 > threshold_log + max)
        .map(|(i, _)| i)
        .collect())
}

/// `log q(Y)` for every neighbor of `state`, in neighbor order.
pub fn transition_log_weights<M: FiniteNeighborhood>(
    model: &M,
    state: &M::State,
    temp: f64,
) -> Result<Vec<LogWeight>, NumericError> {
    let cache = model.build_cache(state);
    let log_pi = model.log_target(state);
    let candidates: Vec<usize> = (0..model.neighbor_count(state)).collect();
    let mut out = Vec::new();
    neighbor_log_weights(model, state, &cache, log_pi, temp, &candidates, &mut out)?;
    Ok(out)
}
