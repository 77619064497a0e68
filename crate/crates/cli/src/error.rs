use std::path::PathBuf;
use std::process::ExitCode;

use rfpns::{BenchError, NumericError, ProblemError, RunError};
use thiserror::Error;

/// Process exit codes. Stable: scripts rely on them.
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_RUNTIME: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, malformed input files or invalid configurations.
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    /// The run itself failed, e.g. it reached an absorbing state.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Runtime(_) => EXIT_RUNTIME,
        })
    }

    pub fn io(path: impl Into<PathBuf>, err: impl ToString) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(_) => CliError::Config(e.to_string()),
            RunError::InfeasibleInitialState | RunError::AbsorbingState { .. } | RunError::Numeric(_) => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::GenerationFailed { .. } | ProblemError::StaleCache { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::InvalidSchedule(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io { path, source } => CliError::io(path, source),
            BenchError::Csv { path, source } => CliError::io(path, source),
            // a file that exists but does not parse is a configuration problem
            BenchError::Json { .. } | BenchError::Config(_) => CliError::Config(e.to_string()),
            BenchError::Run(r) => r.into(),
            BenchError::Problem(p) => p.into(),
            BenchError::Numeric(n) => n.into(),
        }
    }
}
