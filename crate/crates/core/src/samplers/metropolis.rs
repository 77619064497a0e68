use rand::Rng;

use crate::chain::checked_initial;
use crate::error::RunError;
use crate::model::ProblemModel;
use crate::numerics::{log_hastings_acceptance, purpose, CoolingSchedule, RngStream};
use crate::samplers::ChainTrace;

/// Metropolis-Hastings with temperature `T(k)`: propose from `Q`, accept with
/// probability `min{1, (π(Y)/π(X))^{1/T} Q(Y,X)/Q(X,Y)}`. At constant
/// `T = 1` this samples `π`; under a cooling schedule it is simulated
/// annealing.
///
/// Returns `steps + 1` states starting from the model's initial state.
pub fn run_metropolis<M: ProblemModel>(
    model: &M,
    steps: usize,
    schedule: &CoolingSchedule,
    rng: &RngStream,
) -> Result<ChainTrace<M::State>, RunError> {
    if steps > schedule.total_steps() {
        return Err(RunError::Config(format!(
            "{steps} steps exceed a schedule of {}",
            schedule.total_steps()
        )));
    }
    let mut proposal_rng = rng.fork(purpose::PROPOSAL);
    let mut accept_rng = rng.fork(purpose::ACCEPTANCE);
    let (mut state, mut log_pi) = checked_initial(model)?;
    let mut cache = model.build_cache(&state);
    let mut trace = ChainTrace {
        states: Vec::with_capacity(steps + 1),
        log_targets: Vec::with_capacity(steps + 1),
    };
    trace.states.push(state.clone());
    trace.log_targets.push(log_pi);
    for k in 0..steps {
        let temp = schedule.temperature_at(k)?;
        let mv = model.propose(&state, &cache, &mut proposal_rng);
        let log_pi_y = model.candidate_log_target(&state, &cache, &mv);
        let w = log_hastings_acceptance(log_pi, log_pi_y, temp, model.log_proposal_ratio(&state, &mv))?;
        let accept = w.0 == 0.0 || (!w.is_zero() && accept_rng.random::<f64>().ln() < w.0);
        if accept {
            model.apply(&mut state, &mut cache, &mv);
            log_pi = log_pi_y;
        }
        trace.states.push(state.clone());
        trace.log_targets.push(log_pi);
    }
    Ok(trace)
}
