//! Shared numerical primitives: temperature schedules, log-domain weights,
//! categorical selection, holding times and seeded random streams.

mod rng;
mod schedule;
mod weights;

pub use rng::{derive_seed, mix64, purpose, RngStream};
pub use schedule::{CoolingSchedule, ScheduleKind, ScheduleSpec};
pub use weights::{
    categorical_pick, log_acceptance, log_hastings_acceptance, log_sum_exp, pick_with_uniform,
    sample_multiplicity, LogWeight,
};
