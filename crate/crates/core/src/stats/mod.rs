//! Run aggregation and nonparametric ranking: Friedman test, Nemenyi post-hoc
//! critical difference, and the clique data behind critical-difference diagrams.

mod friedman;
mod nemenyi;

pub use friedman::{average_ranks, friedman, FriedmanResult, ImanDavenport};
pub use nemenyi::{cd_diagram_data, nemenyi, studentized_range_q, CdDiagram, CdEntry, NemenyiResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("cell has no records")]
    EmptyCell,
    #[error("degenerate input: need at least 2 blocks and 2 treatments, got {blocks}×{treatments}")]
    DegenerateInput { blocks: usize, treatments: usize },
    #[error("row {row} has {actual} values, expected {expected}")]
    RaggedMatrix { row: usize, expected: usize, actual: usize },
    #[error("non-finite value in row {row}")]
    NonFinite { row: usize },
    #[error("alpha {0} not tabulated; supported: 0.05, 0.10")]
    UnsupportedAlpha(f64),
    #[error("{0} treatments exceeds the tabulated maximum of 20")]
    KOutOfTable(usize),
    #[error("{labels} labels for {k} treatments")]
    LabelMismatch { labels: usize, k: usize },
}

/// One experiment: an algorithm run once on one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm_id: String,
    pub function_id: u32,
    pub seed: u64,
    pub final_fitness: f64,
    pub convergence_generation: usize,
    pub trace_ref: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub sigma: f64,
}

pub fn aggregate_cell(values: &[f64]) -> Result<CellSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyCell);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sigma = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CellSummary { count: values.len(), mean, median: median(values), sigma })
}

/// Median; the mean of the central pair for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Smallest generation `g` after which the trace stays within `tolerance` of
/// `trace[g]`. An empty trace yields 0.
pub fn convergence_generation(trace: &[f64], tolerance: f64) -> usize {
    let n = trace.len();
    if n == 0 {
        return 0;
    }
    let mut suffix_min = vec![0.0; n];
    let mut suffix_max = vec![0.0; n];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in (0..n).rev() {
        lo = lo.min(trace[t]);
        hi = hi.max(trace[t]);
        suffix_min[t] = lo;
        suffix_max[t] = hi;
    }
    (0..n)
        .find(|&g| suffix_max[g] - trace[g] <= tolerance && trace[g] - suffix_min[g] <= tolerance)
        .unwrap_or(n - 1)
}
