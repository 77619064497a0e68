//! Benchmark problem families, each exposed as a [`ProblemModel`].
//!
//! [`ProblemModel`]: crate::model::ProblemModel

pub mod gf2;
pub mod graph;
pub mod io;
pub mod knapsack;
pub mod qubo;
pub mod simplex;
pub mod toy;
pub mod xor3;

pub use gf2::{gf2_is_invertible, gf2_solve, Gf2Matrix};
pub use graph::GraphModel;
pub use io::{Instance, InstanceParseError, INSTANCE_SCHEMA_VERSION};
pub use knapsack::{knapsack_log_target, KnapsackInstance, KnapsackModel, EMPTY_LOG_TARGET};
pub use qubo::{qubo_flip_delta, qubo_log_target, QuboGains, QuboInstance, QuboModel};
pub use simplex::{
    shift_coordinate, simplex_log_target, simplex_propose, CoordinateMove, SimplexCandidate,
    SimplexQpInstance, SimplexQpModel, DEFAULT_STEP_SIGMA,
};
pub use toy::{ToyLocalMaxInstance, ToyModel, HUB_A, HUB_B};
pub use xor3::{
    count_violations, generate_3r3xor, ising_energy, Clause, IsingXorInstance, IsingXorModel,
    DEFAULT_MAX_ATTEMPTS,
};
