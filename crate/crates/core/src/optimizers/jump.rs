use std::collections::VecDeque;

use crate::chain::{checked_initial, move_log_weights, neighbor_log_weights};
use crate::error::RunError;
use crate::model::{FiniteNeighborhood, SampledNeighborhood};
use crate::numerics::{categorical_pick, purpose, LogWeight, RngStream};
use crate::optimizers::{
    Algorithm, OptRunConfig, OptTrace, Recorder, SubsetDrawer, SubsetSize, SUBSET_RETRIES,
};

/// Where a jump step takes its candidate neighbors from.
enum Candidates<S> {
    Full,
    Partial(SubsetDrawer),
    /// The previous `L` jump states, most recent first.
    Tabu { length: usize, window: VecDeque<S> },
}

/// Rejection-free optimization: every step weighs all neighbors by
/// `q(Y) = Q(J, Y) min{1, (π(Y)/π(J))^{1/T}}` and jumps to one of them in
/// proportion. Nothing is ever rejected and no holding time is sampled.
pub fn run_rf<M: FiniteNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    expect_algorithm(config, Algorithm::Rf)?;
    run_jump(model, config, rng, Candidates::Full)
}

/// Partial neighbor search: as [`run_rf`], but each step only weighs the
/// neighbors in a partial set drawn by the configured strategy. A partial
/// set with no feasible member is redrawn up to [`SUBSET_RETRIES`] times.
pub fn run_pns<M: FiniteNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    expect_algorithm(config, Algorithm::Pns)?;
    let strategy = config.pns.as_ref().expect("validated");
    run_jump(model, config, rng, Candidates::Partial(strategy.drawer()))
}

/// L-step simplified tabu rejection-free: as [`run_rf`], but the last `L`
/// jump states before the current one are excluded from the candidates.
/// `L = 0` is plain rejection-free.
pub fn run_tabu_rf<M: FiniteNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    expect_algorithm(config, Algorithm::TabuRf)?;
    let length = config.tabu_length.expect("validated");
    run_jump(
        model,
        config,
        rng,
        Candidates::Tabu {
            length,
            window: VecDeque::with_capacity(length + 1),
        },
    )
}

fn expect_algorithm(config: &OptRunConfig, algorithm: Algorithm) -> Result<(), RunError> {
    config.validate()?;
    if config.algorithm != algorithm {
        return Err(RunError::Config(format!(
            "configuration is for {}, not {algorithm}",
            config.algorithm
        )));
    }
    Ok(())
}

fn all_zero(weights: &[LogWeight]) -> bool {
    weights.iter().all(|w| w.is_zero())
}

fn run_jump<M: FiniteNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
    mut source: Candidates<M::State>,
) -> Result<OptTrace<M::State>, RunError> {
    let mut subset_rng = rng.fork(purpose::SUBSET);
    let mut pick_rng = rng.fork(purpose::ACCEPTANCE);
    let (mut state, mut log_pi) = checked_initial(model)?;
    let mut cache = model.build_cache(&state);
    let mut rec = Recorder::new(model, config, &state, log_pi);
    if rec.target_reached() {
        return Ok(rec.finish(state, 0));
    }
    let mut candidates: Vec<usize> = Vec::new();
    let mut weights = Vec::new();
    let mut steps_run = 0;
    for k in 1..=config.iterations {
        let temp = config.schedule.temperature_at(k - 1)?;
        let n = model.neighbor_count(&state);
        candidates.clear();
        let mut evaluated;
        match &mut source {
            Candidates::Full => {
                candidates.extend(0..n);
                neighbor_log_weights(model, &state, &cache, log_pi, temp, &candidates, &mut weights)?;
                evaluated = candidates.len();
            }
            Candidates::Partial(drawer) => {
                candidates.extend_from_slice(drawer.next(n, &mut subset_rng)?);
                neighbor_log_weights(model, &state, &cache, log_pi, temp, &candidates, &mut weights)?;
                evaluated = candidates.len();
                let mut retries = 0;
                while all_zero(&weights) {
                    if retries == SUBSET_RETRIES {
                        return Err(RunError::AbsorbingState { step: k });
                    }
                    retries += 1;
                    candidates.clear();
                    candidates.extend_from_slice(drawer.redraw(n, &mut subset_rng)?);
                    neighbor_log_weights(model, &state, &cache, log_pi, temp, &candidates, &mut weights)?;
                    evaluated += candidates.len();
                }
            }
            Candidates::Tabu { window, .. } => {
                let mut excluded = vec![false; n];
                for t in window.iter() {
                    if let Some(i) = model.neighbor_index_of(&state, t) {
                        excluded[i] = true;
                    }
                }
                candidates.extend((0..n).filter(|&i| !excluded[i]));
                neighbor_log_weights(model, &state, &cache, log_pi, temp, &candidates, &mut weights)?;
                evaluated = candidates.len();
            }
        }
        if all_zero(&weights) {
            return Err(RunError::AbsorbingState { step: k });
        }
        let pick = candidates[categorical_pick(&weights, &mut pick_rng)?];
        let log_pi_y = model.candidate_log_target(&state, &cache, &pick);
        if let Candidates::Tabu { length, window } = &mut source {
            if *length > 0 {
                window.push_front(state.clone());
                window.truncate(*length);
            }
        }
        model.apply(&mut state, &mut cache, &pick);
        log_pi = log_pi_y;
        steps_run = k;
        if rec.visit(k, &state, log_pi, evaluated) {
            break;
        }
    }
    Ok(rec.finish(state, steps_run))
}

/// PNS over a sampled neighborhood: each step draws a fixed number of
/// candidate moves, weighs them by the annealed acceptance probability and
/// jumps to one in proportion. Infeasible candidates carry zero weight; a
/// draw with no feasible candidate is repeated up to [`SUBSET_RETRIES`]
/// times.
pub fn run_pns_sampled<M: SampledNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    expect_algorithm(config, Algorithm::Pns)?;
    let count = match config.pns.as_ref().expect("validated").size {
        SubsetSize::Count(c) if c > 0 => c,
        other => {
            return Err(RunError::Config(format!(
                "sampled neighborhoods need a fixed candidate count, got {other:?}"
            )))
        }
    };
    let mut subset_rng = rng.fork(purpose::SUBSET);
    let mut pick_rng = rng.fork(purpose::ACCEPTANCE);
    let (mut state, mut log_pi) = checked_initial(model)?;
    let mut cache = model.build_cache(&state);
    let mut rec = Recorder::new(model, config, &state, log_pi);
    if rec.target_reached() {
        return Ok(rec.finish(state, 0));
    }
    let mut weights = Vec::with_capacity(count);
    let mut steps_run = 0;
    for k in 1..=config.iterations {
        let temp = config.schedule.temperature_at(k - 1)?;
        let mut evaluated = 0;
        let mut retries = 0;
        let moves = loop {
            let moves = model.draw_candidates(&state, &cache, count, &mut subset_rng);
            move_log_weights(model, &state, &cache, log_pi, temp, &moves, &mut weights)?;
            evaluated += moves.len();
            if !all_zero(&weights) {
                break moves;
            }
            if retries == SUBSET_RETRIES {
                return Err(RunError::AbsorbingState { step: k });
            }
            retries += 1;
        };
        let mv = &moves[categorical_pick(&weights, &mut pick_rng)?];
        let log_pi_y = model.candidate_log_target(&state, &cache, mv);
        model.apply(&mut state, &mut cache, mv);
        log_pi = log_pi_y;
        steps_run = k;
        if rec.visit(k, &state, log_pi, evaluated) {
            break;
        }
    }
    Ok(rec.finish(state, steps_run))
}
