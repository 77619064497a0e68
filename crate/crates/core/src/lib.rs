//! Simulated annealing, rejection-free Markov chains and partial neighbor
//! search over discrete and simplex-constrained problems.
//!
//! Targets are always handled as `log π`; infeasible states carry `-inf`.
//! Every run is deterministic given its seed.

mod chain;
pub mod bench;
pub mod error;
pub mod model;
pub mod numerics;
pub mod optimizers;
pub mod problems;
pub mod samplers;

pub use error::{BenchError, NumericError, ProblemError, RunError};
pub use model::{FiniteNeighborhood, ProblemModel, SampledNeighborhood};
