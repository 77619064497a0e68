use crate::chain::{checked_initial, neighbor_log_weights};
use crate::error::RunError;
use crate::model::FiniteNeighborhood;
use crate::numerics::{categorical_pick, log_sum_exp, purpose, sample_multiplicity, RngStream};
use crate::samplers::JumpChainRecord;

/// Rejection-free sampling at `T = 1`.
///
/// At each jump state `J`, computes `q(Y) = Q(J, Y) min{1, π(Y)Q(Y,J) /
/// (π(J)Q(J,Y))}` for every neighbor, records the escape probability
/// `p = Σ q(Y)` and a holding time `1 + Geom(p)`, then jumps to `Y` with
/// probability `q(Y)/p`. Records `jumps` jump states.
pub fn run_rejection_free_sampling<M: FiniteNeighborhood>(
    model: &M,
    jumps: usize,
    rng: &RngStream,
) -> Result<JumpChainRecord<M::State>, RunError> {
    let mut pick_rng = rng.fork(purpose::ACCEPTANCE);
    let mut hold_rng = rng.fork(purpose::MULTIPLICITY);
    let (mut state, mut log_pi) = checked_initial(model)?;
    let mut cache = model.build_cache(&state);
    let mut record = JumpChainRecord {
        jump_states: Vec::with_capacity(jumps),
        log_targets: Vec::with_capacity(jumps),
        multiplicities: Vec::with_capacity(jumps),
        escape_probs: Some(Vec::with_capacity(jumps)),
    };
    let mut candidates = Vec::new();
    let mut weights = Vec::new();
    for k in 0..jumps {
        let n = model.neighbor_count(&state);
        candidates.clear();
        candidates.extend(0..n);
        neighbor_log_weights(model, &state, &cache, log_pi, 1.0, &candidates, &mut weights)?;
        let p = log_sum_exp(&weights).exp().min(1.0);
        if p <= 0.0 {
            return Err(RunError::AbsorbingState { step: k });
        }
        let m = sample_multiplicity(p, &mut hold_rng)?;
        record.jump_states.push(state.clone());
        record.log_targets.push(log_pi);
        record.multiplicities.push(m);
        record.escape_probs.as_mut().unwrap().push(p);
        if k + 1 == jumps {
            break;
        }
        let i = categorical_pick(&weights, &mut pick_rng)?;
        log_pi = model.candidate_log_target(&state, &cache, &i);
        model.apply(&mut state, &mut cache, &i);
    }
    Ok(record)
}
