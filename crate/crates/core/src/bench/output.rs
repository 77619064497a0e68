//! Result files: raw samples and summary rows as CSV, plus a JSON manifest
//! that records the full spec so a run can be repeated exactly.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bench::experiment::{RunFailure, RunSample, RunSummary, SummaryRow};
use crate::bench::spec::{ExperimentSpec, TtsSpec};
use crate::bench::tts::{TtsRow, TtsSample, TtsSummary};
use crate::error::BenchError;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "lowercase")]
pub enum ManifestSpec {
    Experiment(ExperimentSpec),
    Tts(TtsSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub library_version: String,
    pub base_seed: u64,
    pub run: ManifestSpec,
    /// File names relative to the manifest's directory.
    pub samples_file: String,
    pub summary_file: String,
    pub completed: usize,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub samples: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = csv::Writer::from_writer(file);
    for row in rows {
        out.serialize(row).map_err(csv_err)?;
    }
    out.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, BenchError> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}

pub fn read_samples_csv(path: &Path) -> Result<Vec<RunSample>, BenchError> {
    read_csv(path)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, BenchError> {
    read_csv(path)
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), BenchError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_manifest(path: &Path) -> Result<Manifest, BenchError> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(BenchError::Config(format!(
            "{}: unsupported manifest schema version {}",
            path.display(),
            manifest.schema_version
        )));
    }
    Ok(manifest)
}

/// Writes `<prefix>samples.csv`, `<prefix>summary.csv` and
/// `<prefix>manifest.json`.
pub fn summarize_to_files(summary: &RunSummary, prefix: &Path) -> Result<OutputFiles, BenchError> {
    let files = output_paths(prefix);
    write_csv(&files.samples, &summary.samples)?;
    write_csv(&files.summary, &summary.rows)?;
    write_manifest(
        &files.manifest,
        &Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            base_seed: summary.spec.base_seed,
            run: ManifestSpec::Experiment(summary.spec.clone()),
            samples_file: file_name(&files.samples),
            summary_file: file_name(&files.summary),
            completed: summary.completed,
            failures: summary.failures.clone(),
        },
    )?;
    Ok(files)
}

pub fn tts_to_files(summary: &TtsSummary, prefix: &Path) -> Result<OutputFiles, BenchError> {
    let files = output_paths(prefix);
    write_csv(&files.samples, &summary.samples)?;
    write_csv(&files.summary, &summary.rows)?;
    write_manifest(
        &files.manifest,
        &Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            base_seed: summary.spec.base_seed,
            run: ManifestSpec::Tts(summary.spec.clone()),
            samples_file: file_name(&files.samples),
            summary_file: file_name(&files.summary),
            completed: summary.samples.len(),
            failures: summary.failures.clone(),
        },
    )?;
    Ok(files)
}

pub fn output_paths(prefix: &Path) -> OutputFiles {
    OutputFiles {
        samples: with_suffix(prefix, "samples.csv"),
        summary: with_suffix(prefix, "summary.csv"),
        manifest: with_suffix(prefix, "manifest.json"),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

/// Plain-text quantile table, one line per `(schedule, algorithm)`.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<14} {:>5} {:>14} {:>14} {:>14} {:>14} {:>7}",
        "schedule", "algorithm", "runs", "mean", "q25", "q50", "q75", "hits"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20} {:<14} {:>5} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>7}",
            r.schedule,
            r.algorithm,
            r.count,
            r.mean,
            r.q25,
            r.q50,
            r.q75,
            r.hits.map_or_else(|| "-".to_string(), |h| h.to_string())
        );
    }
    out
}

/// Plain-text median table for time-to-solution rows.
pub fn render_tts_table(rows: &[TtsRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:<14} {:>5} {:>7} {:>9} {:>14} {:>16} {:>14}",
        "n", "algorithm", "runs", "solved", "timeouts", "median_steps", "median_evals", "median_secs"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>5} {:<14} {:>5} {:>7} {:>9} {:>14} {:>16} {:>14}",
            r.n,
            r.algorithm,
            r.runs,
            r.solved,
            r.timeouts,
            fmt_opt(r.median_steps),
            fmt_opt(r.median_evaluations),
            fmt_opt(r.median_wall_time)
        );
    }
    out
}

/// Long-form rows for plotting: one line per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub schedule: String,
    pub algorithm: String,
    pub instance: usize,
    pub repetition: usize,
    pub best: f64,
}

pub fn plot_rows(samples: &[RunSample]) -> Vec<PlotRow> {
    samples
        .iter()
        .map(|s| PlotRow {
            schedule: s.schedule.clone(),
            algorithm: s.algorithm.clone(),
            instance: s.instance,
            repetition: s.repetition,
            best: s.best,
        })
        .collect()
}

/// Reads back the raw samples of a time-to-solution run.
pub fn read_tts_samples_csv(path: &Path) -> Result<Vec<TtsSample>, BenchError> {
    read_csv(path)
}

pub fn read_tts_summary_csv(path: &Path) -> Result<Vec<TtsRow>, BenchError> {
    read_csv(path)
}
