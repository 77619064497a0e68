use rand::Rng;

use crate::chain::checked_initial;
use crate::error::RunError;
use crate::model::ProblemModel;
use crate::numerics::{log_hastings_acceptance, purpose, RngStream};
use crate::optimizers::{OptRunConfig, OptTrace, Recorder};

/// Simulated annealing: `config.iterations` propose/accept-or-reject steps,
/// step `k` (from 1) running at temperature `T(k - 1)`.
pub fn run_sa<M: ProblemModel>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    config.validate()?;
    let mut proposal_rng = rng.fork(purpose::PROPOSAL);
    let mut accept_rng = rng.fork(purpose::ACCEPTANCE);
    let (mut state, mut log_pi) = checked_initial(model)?;
    let mut cache = model.build_cache(&state);
    let mut rec = Recorder::new(model, config, &state, log_pi);
    if rec.target_reached() {
        return Ok(rec.finish(state, 0));
    }
    let mut steps_run = 0;
    for k in 1..=config.iterations {
        let temp = config.schedule.temperature_at(k - 1)?;
        let mv = model.propose(&state, &cache, &mut proposal_rng);
        let log_pi_y = model.candidate_log_target(&state, &cache, &mv);
        let w = log_hastings_acceptance(log_pi, log_pi_y, temp, model.log_proposal_ratio(&state, &mv))?;
        let accept = w.0 == 0.0 || (!w.is_zero() && accept_rng.random::<f64>().ln() < w.0);
        if accept {
            model.apply(&mut state, &mut cache, &mv);
            log_pi = log_pi_y;
        }
        steps_run = k;
        if rec.visit(k, &state, log_pi, 1) {
            break;
        }
    }
    Ok(rec.finish(state, steps_run))
}
