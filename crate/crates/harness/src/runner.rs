use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qde_core::benchmarks::{make_instance_with, BenchmarkInstance};
use qde_core::engine::{self, run_real_de};
use qde_core::seeding::{derive_seed, fnv1a};
use qde_core::stats::{convergence_generation, RunRecord};
use qde_core::{EngineConfig64, RunTrace64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithm::AlgorithmId;
use crate::config::ExperimentPlan;
use crate::{io_err, HarnessError};

pub const TRACE_DIR: &str = "traces";
pub const FAILURE_MANIFEST: &str = "failures.json";

/// One run, as stored in the long-form results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub algorithm: String,
    pub function_id: u32,
    pub dimension: usize,
    pub replicate: usize,
    pub seed: u64,
    pub final_fitness: f64,
    pub convergence_generation: usize,
    pub trace_ref: String,
}

impl RunRow {
    pub fn to_record(&self) -> RunRecord {
        RunRecord {
            algorithm_id: self.algorithm.clone(),
            function_id: self.function_id,
            seed: self.seed,
            final_fitness: self.final_fitness,
            convergence_generation: self.convergence_generation,
            trace_ref: self.trace_ref.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub algorithm: String,
    pub function_id: u32,
    pub replicate: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOutcome {
    /// Successful cells in plan order.
    pub rows: Vec<RunRow>,
    pub executed: usize,
    pub reused: usize,
    pub failures: Vec<Failure>,
}

/// Seed of one run; depends only on the master seed and the cell coordinates.
pub fn run_seed(master_seed: u64, algorithm: &AlgorithmId, function_id: u32, replicate: usize) -> u64 {
    derive_seed(&[master_seed, fnv1a(&algorithm.label()), u64::from(function_id), replicate as u64])
}

/// The benchmark instance shared by every run on `function_id`.
pub fn instance(plan: &ExperimentPlan, function_id: u32) -> Result<BenchmarkInstance, HarnessError> {
    Ok(make_instance_with(function_id, plan.dimension, plan.master_seed, plan.placement)?)
}

/// Engine settings for one run of `algorithm`.
pub fn engine_config(plan: &ExperimentPlan, algorithm: &AlgorithmId, seed: u64) -> EngineConfig64 {
    let mut cfg = match algorithm {
        AlgorithmId::Qde { init, strategy } => {
            let mut cfg = EngineConfig64::new(*strategy, *init, plan.dimension, seed);
            cfg.mutation.alpha = if strategy.is_polar() { plan.polar_alpha } else { plan.alpha };
            cfg
        }
        AlgorithmId::RealDe => {
            let mut cfg = EngineConfig64::real_de(plan.dimension, seed);
            cfg.mutation.alpha = plan.alpha;
            cfg
        }
    };
    cfg.mutation.beta = plan.beta;
    cfg.population_size = plan.population_size;
    cfg.crossover_rate = plan.crossover_rate;
    cfg.max_generations = plan.generations;
    cfg.bound_policy = plan.bound_policy;
    cfg
}

/// Runs `algorithm` on the instance, calling `objective` for every evaluation.
pub fn execute<F>(cfg: &EngineConfig64, algorithm: &AlgorithmId, objective: F) -> Result<RunTrace64, HarnessError>
where
    F: FnMut(&[f64]) -> Result<f64, qde_core::benchmarks::BenchmarkError>,
{
    Ok(match algorithm {
        AlgorithmId::Qde { .. } => engine::run(cfg, objective)?,
        AlgorithmId::RealDe => run_real_de(cfg, objective)?,
    })
}

/// Runs one cell in memory.
pub fn run_cell(
    plan: &ExperimentPlan,
    algorithm: &AlgorithmId,
    function_id: u32,
    replicate: usize,
) -> Result<(RunRow, Vec<f64>), HarnessError> {
    let inst = instance(plan, function_id)?;
    let seed = run_seed(plan.master_seed, algorithm, function_id, replicate);
    let mut cfg = engine_config(plan, algorithm, seed);
    cfg.bounds = inst.domain;
    let trace = execute(&cfg, algorithm, |x: &[f64]| inst.evaluate(x))?.best_fitness_per_generation;
    Ok((row_for(plan, algorithm, function_id, replicate, seed, &trace), trace))
}

fn row_for(
    plan: &ExperimentPlan,
    algorithm: &AlgorithmId,
    function_id: u32,
    replicate: usize,
    seed: u64,
    trace: &[f64],
) -> RunRow {
    RunRow {
        algorithm: algorithm.label(),
        function_id,
        dimension: plan.dimension,
        replicate,
        seed,
        final_fitness: *trace.last().expect("trace holds the initial best"),
        convergence_generation: convergence_generation(trace, plan.tolerance),
        trace_ref: trace_ref(algorithm, function_id, plan.dimension, replicate),
    }
}

/// Path of a trace file relative to the output directory.
pub fn trace_ref(algorithm: &AlgorithmId, function_id: u32, dimension: usize, replicate: usize) -> String {
    format!("{TRACE_DIR}/{algorithm}/f{function_id}_d{dimension}/r{replicate}.csv")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub header: BTreeMap<String, String>,
    pub trace: Vec<f64>,
}

pub fn read_trace(path: &Path) -> Result<TraceFile, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |msg: String| HarnessError::Parse { path: path.to_path_buf(), message: msg };
    let mut header = BTreeMap::new();
    let mut trace = Vec::new();
    let mut seen_columns = false;
    for (n, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else if !seen_columns {
            if line != "generation,best_fitness" {
                return Err(bad(format!("line {}: expected the column header", n + 1)));
            }
            seen_columns = true;
        } else {
            let (g, v) = line.split_once(',').ok_or_else(|| bad(format!("line {}: malformed row", n + 1)))?;
            if g.parse::<usize>().ok() != Some(trace.len()) {
                return Err(bad(format!("line {}: generation out of sequence", n + 1)));
            }
            trace.push(v.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 1)))?);
        }
    }
    if trace.is_empty() {
        return Err(bad("no trace rows".into()));
    }
    Ok(TraceFile { header, trace })
}

fn render_trace(plan: &ExperimentPlan, row: &RunRow, trace: &[f64]) -> String {
    let info = qde_core::benchmarks::function_info(row.function_id).expect("validated plan");
    let mut s = String::new();
    let _ = writeln!(s, "# algorithm = {}", row.algorithm);
    let _ = writeln!(s, "# function = {}", row.function_id);
    let _ = writeln!(s, "# function_name = {}", info.name);
    let _ = writeln!(s, "# dimension = {}", row.dimension);
    let _ = writeln!(s, "# replicate = {}", row.replicate);
    let _ = writeln!(s, "# seed = {}", row.seed);
    let _ = writeln!(s, "# fingerprint = {:016x}", plan.fingerprint());
    for line in plan.provenance.header_lines() {
        let _ = writeln!(s, "# config: {line}");
    }
    s.push_str("generation,best_fitness\n");
    for (g, v) in trace.iter().enumerate() {
        let _ = writeln!(s, "{g},{v:e}");
    }
    s
}

/// Writes to a sibling temporary file and renames it into place.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

enum CellOutcome {
    Executed(RunRow),
    Reused(RunRow),
    Failed(Failure),
}

/// An existing trace is reused when it was produced by the same settings.
fn reusable(plan: &ExperimentPlan, path: &Path, seed: u64) -> Option<Vec<f64>> {
    let file = read_trace(path).ok()?;
    let fingerprint = format!("{:016x}", plan.fingerprint());
    let matches = file.header.get("fingerprint") == Some(&fingerprint)
        && file.header.get("seed") == Some(&seed.to_string())
        && file.trace.len() == plan.generations + 1;
    matches.then_some(file.trace)
}

fn process_cell(plan: &ExperimentPlan, algorithm: &AlgorithmId, function_id: u32, replicate: usize) -> CellOutcome {
    let path = plan.output_dir.join(trace_ref(algorithm, function_id, plan.dimension, replicate));
    let seed = run_seed(plan.master_seed, algorithm, function_id, replicate);
    if let Some(trace) = reusable(plan, &path, seed) {
        return CellOutcome::Reused(row_for(plan, algorithm, function_id, replicate, seed, &trace));
    }
    let result = run_cell(plan, algorithm, function_id, replicate)
        .and_then(|(row, trace)| write_atomic(&path, &render_trace(plan, &row, &trace)).map(|_| row));
    match result {
        Ok(row) => CellOutcome::Executed(row),
        Err(e) => CellOutcome::Failed(Failure {
            algorithm: algorithm.label(),
            function_id,
            replicate,
            error: e.to_string(),
        }),
    }
}

/// Every (algorithm, function, replicate) cell of the plan, in plan order.
pub fn cells(plan: &ExperimentPlan) -> Vec<(AlgorithmId, u32, usize)> {
    let mut out = Vec::with_capacity(plan.cell_count());
    for a in &plan.algorithms {
        for &f in &plan.functions {
            for r in 0..plan.replicates {
                out.push((*a, f, r));
            }
        }
    }
    out
}

/// Executes the plan into `plan.output_dir`. Cells with a matching trace on
/// disk are not rerun; failed cells are listed in the failure manifest.
pub fn run_matrix(plan: &ExperimentPlan) -> Result<MatrixOutcome, HarnessError> {
    fs::create_dir_all(&plan.output_dir).map_err(io_err(&plan.output_dir))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("jobs: {e}")))?;
    let todo = cells(plan);
    let outcomes: Vec<CellOutcome> =
        pool.install(|| todo.par_iter().map(|(a, f, r)| process_cell(plan, a, *f, *r)).collect());

    let mut outcome = MatrixOutcome { rows: Vec::new(), executed: 0, reused: 0, failures: Vec::new() };
    for o in outcomes {
        match o {
            CellOutcome::Executed(row) => {
                outcome.executed += 1;
                outcome.rows.push(row);
            }
            CellOutcome::Reused(row) => {
                outcome.reused += 1;
                outcome.rows.push(row);
            }
            CellOutcome::Failed(f) => outcome.failures.push(f),
        }
    }
    let manifest = serde_json::to_string_pretty(&outcome.failures)? + "\n";
    write_atomic(&plan.output_dir.join(FAILURE_MANIFEST), &manifest)?;
    Ok(outcome)
}
