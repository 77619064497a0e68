//! Optimization drivers: simulated annealing, rejection-free, partial
//! neighbor search and L-step simplified tabu rejection-free.
//!
//! Every driver reports how many neighbor evaluations it consumed, so runs
//! can be compared at equal cost: simulated annealing evaluates one
//! candidate per step, rejection-free all `|N|`, PNS `|N_k|`.

mod jump;
mod sa;
mod subsets;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::model::{FiniteNeighborhood, ProblemModel, SampledNeighborhood};
use crate::numerics::{CoolingSchedule, RngStream};

pub use jump::{run_pns, run_pns_sampled, run_rf, run_tabu_rf};
pub use sa::run_sa;
pub use subsets::{draw_partial_neighbors, Partition, PnsMethod, PnsStrategy, SubsetDrawer, SubsetSize};

/// Bounded number of fresh subsets tried when every candidate in a partial
/// set is infeasible.
pub const SUBSET_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sa,
    Rf,
    Pns,
    #[serde(rename = "tabu")]
    TabuRf,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Sa => "sa",
            Algorithm::Rf => "rf",
            Algorithm::Pns => "pns",
            Algorithm::TabuRf => "tabu",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sa" => Ok(Algorithm::Sa),
            "rf" => Ok(Algorithm::Rf),
            "pns" => Ok(Algorithm::Pns),
            "tabu" | "taburf" | "tabu-rf" => Ok(Algorithm::TabuRf),
            _ => Err(format!("unknown algorithm '{s}', expected sa, rf, pns or tabu")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptRunConfig {
    pub algorithm: Algorithm,
    pub schedule: CoolingSchedule,
    pub iterations: usize,
    pub pns: Option<PnsStrategy>,
    pub tabu_length: Option<usize>,
    /// Keep one [`VisitRecord`] per step.
    pub record: bool,
    /// Stop as soon as a visited state reaches this `log π`.
    pub target: Option<f64>,
    /// Fill the cumulative wall-time column of recorded visits. Off by
    /// default so that recorded traces are reproducible byte for byte.
    pub timing: bool,
}

impl OptRunConfig {
    fn base(algorithm: Algorithm, schedule: CoolingSchedule, iterations: usize) -> Self {
        Self {
            algorithm,
            schedule,
            iterations,
            pns: None,
            tabu_length: None,
            record: false,
            target: None,
            timing: false,
        }
    }

    pub fn sa(schedule: CoolingSchedule, iterations: usize) -> Self {
        Self::base(Algorithm::Sa, schedule, iterations)
    }

    pub fn rf(schedule: CoolingSchedule, iterations: usize) -> Self {
        Self::base(Algorithm::Rf, schedule, iterations)
    }

    pub fn pns(schedule: CoolingSchedule, iterations: usize, strategy: PnsStrategy) -> Self {
        Self {
            pns: Some(strategy),
            ..Self::base(Algorithm::Pns, schedule, iterations)
        }
    }

    pub fn tabu(schedule: CoolingSchedule, iterations: usize, tabu_length: usize) -> Self {
        Self {
            tabu_length: Some(tabu_length),
            ..Self::base(Algorithm::TabuRf, schedule, iterations)
        }
    }

    pub fn recording(mut self, record: bool) -> Self {
        self.record = record;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_timing(mut self, timing: bool) -> Self {
        self.timing = timing;
        self
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.iterations > self.schedule.total_steps() {
            return Err(RunError::Config(format!(
                "{} iterations exceed a schedule of {} steps",
                self.iterations,
                self.schedule.total_steps()
            )));
        }
        match self.algorithm {
            Algorithm::Pns if self.pns.is_none() => {
                Err(RunError::Config("PNS needs a subset strategy".into()))
            }
            Algorithm::TabuRf if self.tabu_length.is_none() => {
                Err(RunError::Config("tabu rejection-free needs a tabu length".into()))
            }
            _ => Ok(()),
        }
    }

    /// Neighbor evaluations one step costs over a neighborhood of size `n`.
    pub fn evaluations_per_step(&self, n: usize) -> Result<usize, RunError> {
        match self.algorithm {
            Algorithm::Sa => Ok(1),
            Algorithm::Rf | Algorithm::TabuRf => Ok(n),
            Algorithm::Pns => self
                .pns
                .as_ref()
                .ok_or_else(|| RunError::Config("PNS needs a subset strategy".into()))?
                .evaluations_per_step(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitRecord {
    pub step: usize,
    pub state_id: String,
    pub log_target: f64,
    pub n_candidates: usize,
    pub wall_time_cumulative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptTrace<S> {
    /// Step 0 is the initial state; empty unless recording was requested.
    pub visited: Vec<VisitRecord>,
    pub best_state: S,
    pub best_log_target: f64,
    /// The model's reported objective at `best_state`.
    pub best_objective: f64,
    pub final_state: S,
    /// First step at which `best_log_target` was reached.
    pub steps_to_best: usize,
    pub steps_run: usize,
    pub evaluations: u64,
    pub wall_time: f64,
    pub reached_target: bool,
}

impl<S> OptTrace<S> {
    /// CSV with columns `step,state_id,log_target,n_candidates,wall_time_cumulative`.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        write_visits_csv(&self.visited, writer)
    }
}

/// Writes a visited-state log as CSV; an empty log still gets its header.
pub fn write_visits_csv<W: Write>(visited: &[VisitRecord], writer: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for v in visited {
        out.serialize(v)?;
    }
    if visited.is_empty() {
        out.write_record(["step", "state_id", "log_target", "n_candidates", "wall_time_cumulative"])?;
    }
    out.flush()?;
    Ok(())
}

/// Runs `config.algorithm` over a finite neighborhood.
pub fn run_optimizer<M: FiniteNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    match config.algorithm {
        Algorithm::Sa => run_sa(model, config, rng),
        Algorithm::Rf => run_rf(model, config, rng),
        Algorithm::Pns => run_pns(model, config, rng),
        Algorithm::TabuRf => run_tabu_rf(model, config, rng),
    }
}

/// Runs `config.algorithm` over a sampled (unbounded) neighborhood, where
/// only simulated annealing and PNS are defined.
pub fn run_optimizer_sampled<M: SampledNeighborhood>(
    model: &M,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<OptTrace<M::State>, RunError> {
    match config.algorithm {
        Algorithm::Sa => run_sa(model, config, rng),
        Algorithm::Pns => run_pns_sampled(model, config, rng),
        other => Err(RunError::Config(format!(
            "{other} needs a finite neighborhood; use sa or pns"
        ))),
    }
}

/// Tracks the best state, the step log and the evaluation count of a run.
pub(crate) struct Recorder<'m, M: ProblemModel> {
    model: &'m M,
    record: bool,
    timing: bool,
    target: Option<f64>,
    start: Instant,
    visited: Vec<VisitRecord>,
    best_state: M::State,
    best_log_target: f64,
    steps_to_best: usize,
    evaluations: u64,
}

impl<'m, M: ProblemModel> Recorder<'m, M> {
    pub(crate) fn new(model: &'m M, config: &OptRunConfig, state: &M::State, log_pi: f64) -> Self {
        let mut rec = Self {
            model,
            record: config.record,
            timing: config.timing,
            target: config.target,
            start: Instant::now(),
            visited: Vec::with_capacity(if config.record { config.iterations + 1 } else { 0 }),
            best_state: state.clone(),
            best_log_target: log_pi,
            steps_to_best: 0,
            evaluations: 0,
        };
        rec.push(0, state, log_pi, 0);
        rec
    }

    pub(crate) fn target_reached(&self) -> bool {
        self.target.is_some_and(|t| self.best_log_target >= t)
    }

    fn push(&mut self, step: usize, state: &M::State, log_pi: f64, n_candidates: usize) {
        if self.record {
            self.visited.push(VisitRecord {
                step,
                state_id: self.model.encode_state(state),
                log_target: log_pi,
                n_candidates,
                wall_time_cumulative: self.timing.then(|| self.start.elapsed().as_secs_f64()),
            });
        }
    }

    /// Logs the state occupied after `step`; returns `true` once the target
    /// is reached.
    pub(crate) fn visit(&mut self, step: usize, state: &M::State, log_pi: f64, n_candidates: usize) -> bool {
        self.evaluations += n_candidates as u64;
        if log_pi > self.best_log_target {
            self.best_log_target = log_pi;
            self.best_state = state.clone();
            self.steps_to_best = step;
        }
        self.push(step, state, log_pi, n_candidates);
        self.target_reached()
    }

    pub(crate) fn finish(self, final_state: M::State, steps_run: usize) -> OptTrace<M::State> {
        let reached_target = self.target_reached();
        OptTrace {
            best_objective: self.model.objective(&self.best_state),
            visited: self.visited,
            best_state: self.best_state,
            best_log_target: self.best_log_target,
            final_state,
            steps_to_best: self.steps_to_best,
            steps_run,
            evaluations: self.evaluations,
            wall_time: self.start.elapsed().as_secs_f64(),
            reached_target,
        }
    }
}
