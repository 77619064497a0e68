//! Time to reach the planted optimum of 3R3XOR instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::experiment::{instance_rng, run_on_instance, run_rng, thread_pool, RunFailure};
use crate::bench::spec::{InitialState, ProblemSpec, TtsSpec};
use crate::bench::stats::median;
use crate::error::BenchError;
use crate::numerics::derive_seed;
use crate::problems::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsSample {
    pub n: usize,
    pub algorithm: String,
    pub instance: usize,
    pub repetition: usize,
    pub solved: bool,
    /// Steps and neighbor evaluations consumed, up to the solution or the
    /// budget.
    pub steps: usize,
    pub evaluations: u64,
    #[serde(skip)]
    pub wall_time: f64,
}

/// Medians over solved runs; unsolved runs count as timeouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsRow {
    pub n: usize,
    pub algorithm: String,
    pub runs: usize,
    pub solved: usize,
    pub timeouts: usize,
    pub median_steps: Option<f64>,
    pub median_evaluations: Option<f64>,
    pub median_wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TtsSummary {
    pub spec: TtsSpec,
    pub samples: Vec<TtsSample>,
    pub rows: Vec<TtsRow>,
    pub failures: Vec<RunFailure>,
}

impl TtsSummary {
    pub fn row(&self, n: usize, algorithm: &str) -> Option<&TtsRow> {
        self.rows.iter().find(|r| r.n == n && r.algorithm == algorithm)
    }
}

fn slot(n: usize, instance: usize) -> u64 {
    derive_seed(n as u64, instance as u64)
}

/// For each size, generates `instances` 3R3XOR instances and runs every
/// algorithm until the energy reaches `n` or the budget runs out.
pub fn time_to_solution(spec: &TtsSpec, jobs: usize) -> Result<TtsSummary, BenchError> {
    spec.validate()?;
    let mut instances: Vec<(usize, usize, Instance)> = Vec::new();
    for &n in &spec.sizes {
        let problem = ProblemSpec::IsingXor {
            n,
            max_attempts: crate::problems::DEFAULT_MAX_ATTEMPTS,
        };
        for i in 0..spec.instances {
            instances.push((n, i, problem.generate(&mut instance_rng(spec.base_seed, slot(n, i)))?));
        }
    }
    let mut plans = Vec::new();
    for (n, _, inst) in &instances {
        let mut plan = Vec::new();
        for alg in &spec.algorithms {
            let per_step = alg.evaluations_per_step(inst.n())?;
            let steps = spec.budget_mode.steps_for(spec.budget, per_step);
            plan.push((alg.to_string(), alg.config(&spec.schedule, steps)?.with_target(*n as f64)));
        }
        plans.push(plan);
    }
    let jobs_list: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|k| (0..spec.repetitions).map(move |r| (k, r)))
        .collect();
    let pool = thread_pool(jobs)?;
    let results: Vec<Vec<Result<TtsSample, RunFailure>>> = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|&(k, r)| {
                let (n, i, inst) = &instances[k];
                let rng = run_rng(spec.base_seed, slot(*n, *i), r);
                plans[k]
                    .iter()
                    .map(|(alg, config)| {
                        run_on_instance(inst, InitialState::Default, config, &rng)
                            .map(|out| TtsSample {
                                n: *n,
                                algorithm: alg.clone(),
                                instance: *i,
                                repetition: r,
                                solved: out.reached_target,
                                steps: out.steps,
                                evaluations: out.evaluations,
                                wall_time: out.wall_time,
                            })
                            .map_err(|e| RunFailure {
                                instance: *i,
                                repetition: r,
                                schedule: spec.schedule.to_string(),
                                algorithm: alg.clone(),
                                message: format!("n={n}: {e}"),
                            })
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
                log::warn!("instance {} repetition {}: {}", f.instance, f.repetition, f.message);
                failures.push(f);
            }
        }
    }
    let mut rows = Vec::new();
    for &n in &spec.sizes {
        for alg in spec.algorithms.iter().map(ToString::to_string) {
            let picked: Vec<&TtsSample> = samples.iter().filter(|s| s.n == n && s.algorithm == alg).collect();
            let solved: Vec<&&TtsSample> = picked.iter().filter(|s| s.solved).collect();
            let med = |f: &dyn Fn(&TtsSample) -> f64| median(&solved.iter().map(|s| f(s)).collect::<Vec<_>>());
            rows.push(TtsRow {
                n,
                algorithm: alg,
                runs: picked.len(),
                solved: solved.len(),
                timeouts: picked.len() - solved.len(),
                median_steps: med(&|s| s.steps as f64),
                median_evaluations: med(&|s| s.evaluations as f64),
                median_wall_time: med(&|s| s.wall_time),
            });
        }
    }
    Ok(TtsSummary {
        spec: spec.clone(),
        samples,
        rows,
        failures,
    })
}
