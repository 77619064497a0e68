//! Building blocks shared by the samplers and optimizers.

use crate::error::{NumericError, RunError};
use crate::model::{FiniteNeighborhood, ProblemModel};
use crate::numerics::{log_hastings_acceptance, LogWeight};

/// Fills `out` with `log q(Y_i) = log Q(x, Y_i) + log min{1, ...}` for each
/// candidate neighbor index, in the order given.
pub(crate) fn neighbor_log_weights<M: FiniteNeighborhood>(
    model: &M,
    state: &M::State,
    cache: &M::Cache,
    log_pi_x: f64,
    temp: f64,
    candidates: &[usize],
    out: &mut Vec<LogWeight>,
) -> Result<(), NumericError> {
    out.clear();
    for &i in candidates {
        let log_pi_y = model.candidate_log_target(state, cache, &i);
        let accept = log_hastings_acceptance(log_pi_x, log_pi_y, temp, model.log_proposal_ratio(state, &i))?;
        out.push(if accept.is_zero() {
            accept
        } else {
            LogWeight(model.proposal_log_weight(state, i) + accept.0)
        });
    }
    Ok(())
}

/// Acceptance weights for explicitly drawn moves; the proposal factor is a
/// common constant and is left out.
pub(crate) fn move_log_weights<M: ProblemModel>(
    model: &M,
    state: &M::State,
    cache: &M::Cache,
    log_pi_x: f64,
    temp: f64,
    moves: &[M::Move],
    out: &mut Vec<LogWeight>,
) -> Result<(), NumericError> {
    out.clear();
    for mv in moves {
        let log_pi_y = model.candidate_log_target(state, cache, mv);
        out.push(log_hastings_acceptance(log_pi_x, log_pi_y, temp, model.log_proposal_ratio(state, mv))?);
    }
    Ok(())
}

pub(crate) fn checked_initial<M: ProblemModel>(model: &M) -> Result<(M::State, f64), RunError> {
    let state = model.initial_state();
    let log_pi = model.log_target(&state);
    if log_pi == f64::NEG_INFINITY || log_pi.is_nan() {
        return Err(RunError::InfeasibleInitialState);
    }
    Ok((state, log_pi))
}
