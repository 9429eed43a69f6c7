//! Experiment driver for quaternion-valued differential evolution: resolves a
//! plan from defaults, a TOML file and flags; runs the algorithm × function ×
//! replicate matrix in parallel with one trace file per run; exports long-form
//! and summary tables; and runs the Friedman/Nemenyi analyses.

pub mod algorithm;
pub mod analysis;
pub mod config;
pub mod export;
pub mod runner;

use std::path::{Path, PathBuf};

use qde_core::benchmarks::BenchmarkError;
use qde_core::stats::StatsError;
use qde_core::EngineError;
use thiserror::Error;

pub use algorithm::AlgorithmId;
pub use analysis::{analyze, Analysis, Hypothesis};
pub use config::{parse_config, ConfigLayer, ExperimentPlan, ExportFormat};
pub use export::{export_results, load_runs, SummaryRow};
pub use runner::{run_matrix, MatrixOutcome, RunRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown format `{0}`; expected csv or json")]
    UnknownFormat(String),
    #[error("incomplete matrix: {} missing cells ({}{})", missing.len(), missing.iter().take(5).cloned().collect::<Vec<_>>().join(", "), if missing.len() > 5 { ", …" } else { "" })]
    IncompleteMatrix { missing: Vec<String> },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("export failed: {0}")]
    Export(String),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::UnknownFormat(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}
