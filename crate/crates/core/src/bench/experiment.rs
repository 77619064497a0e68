//! Seeded multi-algorithm comparisons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::spec::{AlgorithmSpec, ExperimentSpec, InitialState, ProblemSpec};
use crate::bench::stats::{mean, quartiles};
use crate::error::{BenchError, RunError};
use crate::model::random_bits;
use crate::numerics::{derive_seed, purpose, RngStream, ScheduleSpec};
use crate::optimizers::{run_optimizer, run_optimizer_sampled, OptRunConfig, OptTrace, VisitRecord};
use crate::problems::{
    qubo_log_target, Instance, IsingXorModel, KnapsackModel, QuboGains, QuboInstance, QuboModel,
    SimplexQpModel,
};

/// Largest QUBO the exhaustive oracle will enumerate.
pub const MAX_ORACLE_BITS: usize = 24;

/// One `(instance, repetition, schedule, algorithm)` result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    pub schedule: String,
    pub algorithm: String,
    pub instance: usize,
    pub repetition: usize,
    /// The model's objective at the best state found.
    pub best: f64,
    pub steps: usize,
    pub evaluations: u64,
    pub steps_to_best: usize,
    /// Whether `best` reached the known optimum, when one is known.
    pub hit: Option<bool>,
    /// Excluded from CSV output so raw samples are reproducible byte for
    /// byte.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schedule: String,
    pub algorithm: String,
    pub count: usize,
    pub mean: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub mean_wall_time: f64,
    pub mean_evaluations: f64,
    pub hits: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub instance: usize,
    pub repetition: usize,
    pub schedule: String,
    pub algorithm: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub spec: ExperimentSpec,
    /// Ordered by instance, repetition, schedule, algorithm.
    pub samples: Vec<RunSample>,
    /// One row per `(schedule, algorithm)` in spec order.
    pub rows: Vec<SummaryRow>,
    /// Known optimum per instance when the oracle was requested.
    pub optima: Vec<Option<f64>>,
    pub completed: usize,
    pub failures: Vec<RunFailure>,
}

impl RunSummary {
    pub fn row(&self, schedule: &str, algorithm: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.schedule == schedule && r.algorithm == algorithm)
    }

    pub fn samples_for<'a>(&'a self, schedule: &'a str, algorithm: &'a str) -> impl Iterator<Item = &'a RunSample> {
        self.samples
            .iter()
            .filter(move |s| s.schedule == schedule && s.algorithm == algorithm)
    }
}

/// Random stream for generating instance `slot` of an experiment.
pub fn instance_rng(base_seed: u64, slot: u64) -> RngStream {
    RngStream::new(base_seed, derive_seed(purpose::INSTANCE, slot))
}

/// Random stream for repetition `repetition` on instance `slot`. Every
/// algorithm and schedule of that repetition shares it.
pub fn run_rng(base_seed: u64, slot: u64, repetition: usize) -> RngStream {
    RngStream::new(derive_seed(base_seed, slot), repetition as u64)
}

/// Maximum of `x^T Q x` over all `2^n` bit vectors, by Gray-code
/// enumeration with incremental updates. The winner is re-evaluated from
/// scratch.
pub fn brute_force_qubo(inst: &QuboInstance) -> Result<(f64, Vec<bool>), BenchError> {
    let n = inst.n();
    if n > MAX_ORACLE_BITS {
        return Err(BenchError::Config(format!(
            "exhaustive oracle limited to {MAX_ORACLE_BITS} bits, got {n}"
        )));
    }
    let mut x = vec![false; n];
    let mut gains = QuboGains::new(inst, &x);
    let mut best = (gains.value(), 0u64);
    let mut code = 0u64;
    for k in 1..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        gains.flip(inst, &mut x, bit);
        code ^= 1 << bit;
        if gains.value() > best.0 {
            best = (gains.value(), code);
        }
    }
    let bits: Vec<bool> = (0..n).map(|i| best.1 >> i & 1 == 1).collect();
    Ok((qubo_log_target(inst, &bits)?, bits))
}

fn known_optimum(instance: &Instance) -> Result<f64, BenchError> {
    match instance {
        Instance::Qubo(q) => Ok(brute_force_qubo(q)?.0),
        Instance::IsingXor(x) => Ok(x.n() as f64),
        other => Err(BenchError::Config(format!(
            "no optimum oracle for {} instances",
            other.kind()
        ))),
    }
}

fn is_hit(best: f64, optimum: f64) -> bool {
    best >= optimum - 1e-9 * (1.0 + optimum.abs())
}

/// The summary numbers of one optimizer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub best: f64,
    pub best_log_target: f64,
    pub steps: usize,
    pub evaluations: u64,
    pub steps_to_best: usize,
    pub wall_time: f64,
    pub reached_target: bool,
}

impl<S> From<OptTrace<S>> for RunOutcome {
    fn from(t: OptTrace<S>) -> Self {
        Self {
            best: t.best_objective,
            best_log_target: t.best_log_target,
            steps: t.steps_run,
            evaluations: t.evaluations,
            steps_to_best: t.steps_to_best,
            wall_time: t.wall_time,
            reached_target: t.reached_target,
        }
    }
}

/// An outcome together with the visited-state log, which is empty unless
/// the configuration asked for recording.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub outcome: RunOutcome,
    pub visited: Vec<VisitRecord>,
}

impl<S> From<OptTrace<S>> for RunRecord {
    fn from(mut t: OptTrace<S>) -> Self {
        let visited = std::mem::take(&mut t.visited);
        Self {
            outcome: t.into(),
            visited,
        }
    }
}

/// Runs `config` on `instance` with the model matching its kind.
pub fn run_on_instance(
    instance: &Instance,
    initial: InitialState,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<RunOutcome, RunError> {
    run_on_instance_recorded(instance, initial, config, rng).map(|r| r.outcome)
}

/// Like [`run_on_instance`], keeping the visited-state log.
pub fn run_on_instance_recorded(
    instance: &Instance,
    initial: InitialState,
    config: &OptRunConfig,
    rng: &RngStream,
) -> Result<RunRecord, RunError> {
    let random_start = |n: usize| random_bits(n, &mut rng.fork(purpose::INITIAL_STATE));
    let bad_initial = |e: crate::error::ProblemError| RunError::Config(e.to_string());
    Ok(match instance {
        Instance::Qubo(q) => {
            let mut model = QuboModel::new(q);
            if initial == InitialState::Random {
                model = model.with_initial(random_start(q.n())).map_err(bad_initial)?;
            }
            run_optimizer(&model, config, rng)?.into()
        }
        Instance::IsingXor(x) => {
            let mut model = IsingXorModel::new(x);
            if initial == InitialState::Random {
                model = model.with_initial(random_start(x.n())).map_err(bad_initial)?;
            }
            run_optimizer(&model, config, rng)?.into()
        }
        Instance::Knapsack(k) => run_optimizer(&KnapsackModel::new(k), config, rng)?.into(),
        Instance::SimplexQp(s) => run_optimizer_sampled(&SimplexQpModel::new(s), config, rng)?.into(),
    })
}

/// Neighborhood size used for budget accounting.
fn neighborhood_size(instance: &Instance) -> usize {
    instance.n()
}

/// Steps algorithm `alg` gets on `instance` under the spec's budget.
pub fn steps_for(spec: &ExperimentSpec, alg: &AlgorithmSpec, instance: &Instance) -> Result<usize, BenchError> {
    let per_step = alg.evaluations_per_step(neighborhood_size(instance))?;
    Ok(spec.budget_mode.steps_for(spec.budget, per_step))
}

pub(crate) fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, BenchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Config(format!("cannot start {jobs} workers: {e}")))
}

pub fn generate_instances(spec: &ExperimentSpec) -> Result<Vec<Instance>, BenchError> {
    if let ProblemSpec::File { path } = &spec.problem {
        let inst = Instance::load(path)?;
        return Ok(vec![inst; spec.instances]);
    }
    (0..spec.instances)
        .map(|i| spec.problem.generate(&mut instance_rng(spec.base_seed, i as u64)))
        .collect()
}

/// Runs every `(schedule, algorithm)` pair on every `(instance,
/// repetition)`, distributing repetitions over `jobs` workers. Results do
/// not depend on `jobs`. A failed run is logged and reported in the
/// summary; it does not abort the experiment.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<RunSummary, BenchError> {
    spec.validate()?;
    let instances = generate_instances(spec)?;
    let optima: Vec<Option<f64>> = if spec.oracle {
        instances.iter().map(|i| known_optimum(i).map(Some)).collect::<Result<_, _>>()?
    } else {
        vec![None; instances.len()]
    };
    // plan every configuration up front so invalid ones fail before work starts
    let mut plans: Vec<Vec<(String, String, OptRunConfig)>> = Vec::with_capacity(instances.len());
    for inst in &instances {
        let mut plan = Vec::new();
        for sched in &spec.schedules {
            for alg in &spec.algorithms {
                let steps = steps_for(spec, alg, inst)?;
                plan.push((sched.to_string(), alg.to_string(), alg.config(sched, steps)?));
            }
        }
        plans.push(plan);
    }
    let jobs_list: Vec<(usize, usize)> = (0..spec.instances)
        .flat_map(|i| (0..spec.repetitions).map(move |r| (i, r)))
        .collect();
    let pool = thread_pool(jobs)?;
    let results: Vec<Vec<Result<RunSample, RunFailure>>> = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|&(i, r)| {
                let rng = run_rng(spec.base_seed, i as u64, r);
                plans[i]
                    .iter()
                    .map(|(sched, alg, config)| {
                        match run_on_instance(&instances[i], spec.initial, config, &rng) {
                            Ok(out) => Ok(RunSample {
                                schedule: sched.clone(),
                                algorithm: alg.clone(),
                                instance: i,
                                repetition: r,
                                best: out.best,
                                steps: out.steps,
                                evaluations: out.evaluations,
                                steps_to_best: out.steps_to_best,
                                hit: optima[i].map(|opt| is_hit(out.best, opt)),
                                wall_time: out.wall_time,
                            }),
                            Err(e) => Err(RunFailure {
                                instance: i,
                                repetition: r,
                                schedule: sched.clone(),
                                algorithm: alg.clone(),
                                message: e.to_string(),
                            }),
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for res in results.into_iter().flatten() {
        match res {
            Ok(s) => samples.push(s),
            Err(f) => {
                log::warn!(
                    "instance {} repetition {} ({} {}): {}",
                    f.instance,
                    f.repetition,
                    f.schedule,
                    f.algorithm,
                    f.message
                );
                failures.push(f);
            }
        }
    }
    let rows = summarize(&spec.schedules, &spec.algorithms, &samples);
    Ok(RunSummary {
        spec: spec.clone(),
        completed: samples.len(),
        samples,
        rows,
        optima,
        failures,
    })
}

pub fn summarize(schedules: &[ScheduleSpec], algorithms: &[AlgorithmSpec], samples: &[RunSample]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for sched in schedules.iter().map(ToString::to_string) {
        for alg in algorithms.iter().map(ToString::to_string) {
            let picked: Vec<&RunSample> = samples
                .iter()
                .filter(|s| s.schedule == sched && s.algorithm == alg)
                .collect();
            if let Some(row) = summary_row(&sched, &alg, &picked) {
                rows.push(row);
            }
        }
    }
    rows
}

pub(crate) fn summary_row(schedule: &str, algorithm: &str, picked: &[&RunSample]) -> Option<SummaryRow> {
    let best: Vec<f64> = picked.iter().map(|s| s.best).collect();
    let (q25, q50, q75) = quartiles(&best)?;
    let hits = picked
        .iter()
        .map(|s| s.hit)
        .collect::<Option<Vec<bool>>>()
        .map(|h| h.iter().filter(|&&b| b).count());
    Some(SummaryRow {
        schedule: schedule.to_string(),
        algorithm: algorithm.to_string(),
        count: best.len(),
        mean: mean(&best)?,
        q25,
        q50,
        q75,
        mean_wall_time: mean(&picked.iter().map(|s| s.wall_time).collect::<Vec<_>>())?,
        mean_evaluations: mean(&picked.iter().map(|s| s.evaluations as f64).collect::<Vec<_>>())?,
        hits,
    })
}
