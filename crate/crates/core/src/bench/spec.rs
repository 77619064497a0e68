//! Experiment descriptions, serializable to and from JSON.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, ProblemError, RunError};
use crate::numerics::{CoolingSchedule, RngStream, ScheduleSpec};
use crate::optimizers::{Algorithm, OptRunConfig, PnsMethod, PnsStrategy};
use crate::problems::{
    generate_3r3xor, Instance, KnapsackInstance, QuboInstance, SimplexQpInstance,
    DEFAULT_MAX_ATTEMPTS, DEFAULT_STEP_SIGMA,
};

/// Where each experiment instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemSpec {
    Qubo {
        n: usize,
        #[serde(default = "default_true")]
        with_diagonal: bool,
    },
    Knapsack {
        n: usize,
        capacity: f64,
    },
    #[serde(rename = "ising3xor")]
    IsingXor {
        n: usize,
        #[serde(default = "default_attempts")]
        max_attempts: usize,
    },
    #[serde(rename = "simplexqp")]
    SimplexQp {
        n: usize,
        #[serde(default = "default_sigma")]
        step_sigma: f64,
    },
    /// A fixed instance file, shared by every instance slot.
    File { path: PathBuf },
}

fn default_true() -> bool {
    true
}

fn default_attempts() -> usize {
    DEFAULT_MAX_ATTEMPTS
}

fn default_sigma() -> f64 {
    DEFAULT_STEP_SIGMA
}

impl ProblemSpec {
    pub fn generate(&self, rng: &mut RngStream) -> Result<Instance, BenchError> {
        Ok(match self {
            ProblemSpec::Qubo { n, with_diagonal } => {
                Instance::Qubo(QuboInstance::generate(*n, *with_diagonal, rng))
            }
            ProblemSpec::Knapsack { n, capacity } => {
                Instance::Knapsack(KnapsackInstance::generate(*n, *capacity, rng)?)
            }
            ProblemSpec::IsingXor { n, max_attempts } => {
                Instance::IsingXor(generate_3r3xor(*n, *max_attempts, rng)?)
            }
            ProblemSpec::SimplexQp { n, step_sigma } => {
                Instance::SimplexQp(SimplexQpInstance::generate(*n, *step_sigma, rng)?)
            }
            ProblemSpec::File { path } => Instance::load(path)?,
        })
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let n = match self {
            ProblemSpec::Qubo { n, .. }
            | ProblemSpec::Knapsack { n, .. }
            | ProblemSpec::SimplexQp { n, .. } => *n,
            ProblemSpec::IsingXor { n, .. } if *n < 3 => {
                return Err(ProblemError::InvalidInstance("3R3XOR needs n >= 3".into()).into())
            }
            ProblemSpec::IsingXor { n, .. } => *n,
            ProblemSpec::File { .. } => return Ok(()),
        };
        if n == 0 {
            return Err(BenchError::Config("problem size must be positive".into()));
        }
        Ok(())
    }
}

/// One algorithm configuration, written compactly as `sa`, `rf`,
/// `pns:<fraction>` (Method A), `pns:<method>:<fraction>`,
/// `pns:count:<k>` (k drawn candidates) or `tabu:<L>`.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Sa,
    Rf,
    Pns { method: PnsMethod, fraction: f64 },
    PnsCount { count: usize },
    Tabu { length: usize },
}

impl AlgorithmSpec {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmSpec::Sa => Algorithm::Sa,
            AlgorithmSpec::Rf => Algorithm::Rf,
            AlgorithmSpec::Pns { .. } | AlgorithmSpec::PnsCount { .. } => Algorithm::Pns,
            AlgorithmSpec::Tabu { .. } => Algorithm::TabuRf,
        }
    }

    pub fn strategy(&self) -> Result<Option<PnsStrategy>, RunError> {
        match self {
            AlgorithmSpec::Pns { method, fraction } => PnsStrategy::new(*method, *fraction).map(Some),
            AlgorithmSpec::PnsCount { count } => PnsStrategy::random_count(*count).map(Some),
            _ => Ok(None),
        }
    }

    /// Neighbor evaluations per step over a neighborhood of size `n`.
    pub fn evaluations_per_step(&self, n: usize) -> Result<usize, RunError> {
        match self {
            AlgorithmSpec::Sa => Ok(1),
            AlgorithmSpec::Rf | AlgorithmSpec::Tabu { .. } => Ok(n),
            AlgorithmSpec::PnsCount { count } => Ok(*count),
            AlgorithmSpec::Pns { .. } => self.strategy()?.expect("pns").evaluations_per_step(n),
        }
    }

    /// A run configuration over `steps` iterations, with the schedule
    /// stretched over those iterations.
    pub fn config(&self, schedule: &ScheduleSpec, steps: usize) -> Result<OptRunConfig, RunError> {
        let sched: CoolingSchedule = schedule.with_steps(steps)?;
        Ok(match self {
            AlgorithmSpec::Sa => OptRunConfig::sa(sched, steps),
            AlgorithmSpec::Rf => OptRunConfig::rf(sched, steps),
            AlgorithmSpec::Pns { .. } | AlgorithmSpec::PnsCount { .. } => {
                OptRunConfig::pns(sched, steps, self.strategy()?.expect("pns"))
            }
            AlgorithmSpec::Tabu { length } => OptRunConfig::tabu(sched, steps, *length),
        })
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Sa => f.write_str("sa"),
            AlgorithmSpec::Rf => f.write_str("rf"),
            AlgorithmSpec::Pns {
                method: PnsMethod::RandomEveryStep,
                fraction,
            } => write!(f, "pns:{fraction}"),
            AlgorithmSpec::Pns { method, fraction } => write!(f, "pns:{method}:{fraction}"),
            AlgorithmSpec::PnsCount { count } => write!(f, "pns:count:{count}"),
            AlgorithmSpec::Tabu { length } => write!(f, "tabu:{length}"),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number '{t}' in '{s}'"));
        let int = |t: &str| t.parse::<usize>().map_err(|_| format!("bad integer '{t}' in '{s}'"));
        let spec = match parts.as_slice() {
            ["sa"] => AlgorithmSpec::Sa,
            ["rf"] => AlgorithmSpec::Rf,
            ["pns", "count", k] => AlgorithmSpec::PnsCount { count: int(k)? },
            ["pns", f] => AlgorithmSpec::Pns {
                method: PnsMethod::RandomEveryStep,
                fraction: num(f)?,
            },
            ["pns", m, f] => AlgorithmSpec::Pns {
                method: m.parse()?,
                fraction: num(f)?,
            },
            ["tabu", l] => AlgorithmSpec::Tabu { length: int(l)? },
            _ => {
                return Err(format!(
                    "unknown algorithm '{s}'; expected sa, rf, pns:<fraction>, \
                     pns:<A|B|C|D>:<fraction>, pns:count:<k> or tabu:<L>"
                ))
            }
        };
        spec.strategy().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

impl Serialize for AlgorithmSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlgorithmSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// `budget` is neighbor evaluations per run; each algorithm gets
    /// `budget / evaluations_per_step` steps.
    EvaluationMatched,
    /// `budget` is steps per run for every algorithm.
    StepMatched,
}

impl BudgetMode {
    pub fn steps_for(self, budget: u64, per_step: usize) -> usize {
        match self {
            BudgetMode::EvaluationMatched => (budget / per_step.max(1) as u64) as usize,
            BudgetMode::StepMatched => budget as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// The model's default start: all zeros for bit vectors, the barycenter
    /// on the simplex.
    #[default]
    Default,
    /// Uniform random bit vector (QUBO and 3R3XOR only).
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: ProblemSpec,
    /// Distinct instances; each is run `repetitions` times.
    #[serde(default = "default_one")]
    pub instances: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    pub schedules: Vec<ScheduleSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub budget_mode: BudgetMode,
    pub budget: u64,
    #[serde(default)]
    pub initial: InitialState,
    /// Compute the known optimum per instance (exhaustive for QUBO up to 24
    /// bits, planted for 3R3XOR) and report hit counts.
    #[serde(default)]
    pub oracle: bool,
}

fn default_one() -> usize {
    1
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 || self.instances == 0 {
            return Err(BenchError::Config("instances and repetitions must be positive".into()));
        }
        if self.schedules.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Config("need at least one schedule and one algorithm".into()));
        }
        if self.budget == 0 {
            return Err(BenchError::Config("budget must be positive".into()));
        }
        self.problem.validate()?;
        let simplex = matches!(self.problem, ProblemSpec::SimplexQp { .. });
        for a in &self.algorithms {
            a.strategy()?;
            let sampled_ok = matches!(a, AlgorithmSpec::Sa | AlgorithmSpec::PnsCount { .. });
            if simplex && !sampled_ok {
                return Err(BenchError::Config(format!(
                    "{a} is not defined on the simplex; use sa or pns:count:<k>"
                )));
            }
        }
        if self.initial == InitialState::Random
            && !matches!(self.problem, ProblemSpec::Qubo { .. } | ProblemSpec::IsingXor { .. })
        {
            return Err(BenchError::Config(
                "random initial states are only offered for qubo and ising3xor".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}

/// Time-to-solution study over 3R3XOR instances with planted optima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsSpec {
    pub name: String,
    pub sizes: Vec<usize>,
    pub instances: usize,
    #[serde(default = "default_one")]
    pub repetitions: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    pub schedule: ScheduleSpec,
    pub base_seed: u64,
    pub budget_mode: BudgetMode,
    /// Per-run cap; neighbor evaluations or steps depending on the mode.
    pub budget: u64,
}

impl TtsSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.instances == 0 || self.repetitions == 0 || self.budget == 0 {
            return Err(BenchError::Config(
                "instances, repetitions and budget must be positive".into(),
            ));
        }
        if self.sizes.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Config("need at least one size and one algorithm".into()));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 3) {
            return Err(BenchError::Config(format!("3R3XOR needs n >= 3, got {n}")));
        }
        for a in &self.algorithms {
            a.strategy()?;
            if matches!(a, AlgorithmSpec::PnsCount { .. }) {
                return Err(BenchError::Config(format!("{a} needs a sampled neighborhood")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}
