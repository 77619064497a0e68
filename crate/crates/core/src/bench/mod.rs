//! Seeded experiments: instance generation, evaluation-matched comparisons,
//! time-to-solution studies, diagnostics and result files.

mod diagnostics;
mod experiment;
mod output;
mod spec;
pub mod stats;
mod tts;

pub use diagnostics::{important_neighbors, transition_log_weights, IMPORTANT_THRESHOLD_LOG};
pub use experiment::{
    brute_force_qubo, generate_instances, instance_rng, run_experiment, run_on_instance, run_on_instance_recorded, run_rng,
    steps_for, summarize, RunFailure, RunOutcome, RunRecord, RunSample, RunSummary, SummaryRow,
    MAX_ORACLE_BITS,
};
pub use output::{
    output_paths, plot_rows, read_csv, read_manifest, read_samples_csv, read_summary_csv,
    read_tts_samples_csv, read_tts_summary_csv, render_table, render_tts_table,
    summarize_to_files, tts_to_files, write_csv, Manifest, ManifestSpec, OutputFiles, PlotRow,
    MANIFEST_SCHEMA_VERSION,
};
pub use spec::{AlgorithmSpec, BudgetMode, ExperimentSpec, InitialState, ProblemSpec, TtsSpec};
pub use tts::{time_to_solution, TtsRow, TtsSample, TtsSummary};

use rand::Rng;

use crate::problems::{KnapsackInstance, QuboInstance};

/// Upper-triangular QUBO with `Q_ij ~ Normal(0, 100^2)` for `i <= j`.
pub fn generate_qubo<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QuboInstance {
    QuboInstance::generate(n, true, rng)
}

/// Knapsack with i.i.d. `Poisson(1000)` weights and values.
pub fn generate_knapsack<R: Rng + ?Sized>(
    n: usize,
    capacity: f64,
    rng: &mut R,
) -> Result<KnapsackInstance, crate::error::ProblemError> {
    KnapsackInstance::generate(n, capacity, rng)
}
