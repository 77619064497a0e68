//! Sampling chains: Metropolis-Hastings and rejection-free sampling with
//! jump states and multiplicities, plus the collapse that relates them.

mod metropolis;
mod rejection_free;
mod trace;

pub use metropolis::run_metropolis;
pub use rejection_free::run_rejection_free_sampling;
pub use trace::{
    jump_collapse, weighted_expectation, write_jump_csv, write_trace_csv, ChainTrace,
    JumpChainRecord,
};
