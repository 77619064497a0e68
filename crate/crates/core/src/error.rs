use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("step {step} outside a schedule of {total} steps")]
    StepOutOfRange { step: usize, total: usize },
    #[error("invalid cooling schedule: {0}")]
    InvalidSchedule(String),
    #[error("current state has zero target probability")]
    InvalidCurrentState,
    #[error("no candidate carries positive weight")]
    EmptySupport,
    #[error("escape probability {0} is outside (0, 1]")]
    Domain(f64),
    #[error("non-finite log weight {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("initial state is infeasible")]
    InfeasibleInitialState,
    #[error("absorbing state at step {step}: no candidate with positive weight")]
    AbsorbingState { step: usize },
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spin {index} has value {value}, expected -1 or +1")]
    InvalidSpin { index: usize, value: i64 },
    #[error("no invertible system found after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("gain cache is stale for bit {index}")]
    StaleCache { index: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
