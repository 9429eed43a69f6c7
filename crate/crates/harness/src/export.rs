use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use qde_core::benchmarks::{function_info, Group};
use qde_core::stats::{aggregate_cell, median};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentPlan, ExportFormat, Provenance};
use crate::runner::{write_atomic, RunRow};
use crate::{io_err, HarnessError};

/// Per (algorithm, function) statistics over replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub function_id: u32,
    pub function: String,
    pub group: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub sigma: f64,
    pub median_convergence_generation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub id: u32,
    pub name: String,
    pub group: Group,
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    provenance: &'a Provenance,
    registry: &'a [RegistryEntry],
    rows: &'a [T],
}

#[derive(Deserialize)]
struct JsonRuns {
    rows: Vec<RunRow>,
}

pub fn registry(plan: &ExperimentPlan) -> Vec<RegistryEntry> {
    plan.functions
        .iter()
        .map(|&id| {
            let f = function_info(id).expect("validated plan");
            RegistryEntry { id, name: f.name.to_string(), group: f.group }
        })
        .collect()
}

/// Sorts rows into plan order: algorithm, function, replicate.
pub fn sort_rows(plan: &ExperimentPlan, rows: &mut [RunRow]) {
    let pos: HashMap<String, usize> = plan.algorithms.iter().enumerate().map(|(i, a)| (a.label(), i)).collect();
    rows.sort_by_key(|r| (pos.get(&r.algorithm).copied().unwrap_or(usize::MAX), r.function_id, r.replicate));
}

pub fn summarize(plan: &ExperimentPlan, rows: &[RunRow]) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut cells: HashMap<(&str, u32), Vec<&RunRow>> = HashMap::new();
    for r in rows {
        cells.entry((r.algorithm.as_str(), r.function_id)).or_default().push(r);
    }
    let mut out = Vec::new();
    for a in &plan.algorithms {
        let label = a.label();
        for &fid in &plan.functions {
            let Some(cell) = cells.get(&(label.as_str(), fid)) else { continue };
            let fitness: Vec<f64> = cell.iter().map(|r| r.final_fitness).collect();
            let conv: Vec<f64> = cell.iter().map(|r| r.convergence_generation as f64).collect();
            let s = aggregate_cell(&fitness)?;
            let info = function_info(fid)?;
            out.push(SummaryRow {
                algorithm: label.clone(),
                function_id: fid,
                function: info.name.to_string(),
                group: info.group.to_string(),
                count: s.count,
                mean: s.mean,
                median: s.median,
                sigma: s.sigma,
                median_convergence_generation: median(&conv),
            });
        }
    }
    Ok(out)
}

fn csv_text<T: Serialize>(plan: &ExperimentPlan, rows: &[T]) -> Result<String, HarnessError> {
    let mut head = String::new();
    for line in plan.provenance.header_lines() {
        head.push_str(&format!("# {line}\n"));
    }
    for f in registry(plan) {
        head.push_str(&format!("# function {} = {} [{}]\n", f.id, f.name, f.group));
    }
    let mut w = csv::Writer::from_writer(head.into_bytes());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Export(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Export(e.to_string()))
}

fn json_text<T: Serialize>(plan: &ExperimentPlan, rows: &[T]) -> Result<String, HarnessError> {
    let reg = registry(plan);
    let doc = JsonDoc { provenance: &plan.provenance, registry: &reg, rows };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Writes `runs.<fmt>`, `summary.<fmt>` and `provenance.json` into the output
/// directory. Returns the written paths. Output depends only on the rows and
/// the plan, so re-exporting is byte-identical.
pub fn export_results(plan: &ExperimentPlan, rows: &[RunRow]) -> Result<Vec<PathBuf>, HarnessError> {
    let mut rows = rows.to_vec();
    sort_rows(plan, &mut rows);
    let summary = summarize(plan, &rows)?;
    let ext = plan.format.extension();
    let runs_path = plan.output_dir.join(format!("runs.{ext}"));
    let summary_path = plan.output_dir.join(format!("summary.{ext}"));
    let (runs, table) = match plan.format {
        ExportFormat::Csv => (csv_text(plan, &rows)?, csv_text(plan, &summary)?),
        ExportFormat::Json => (json_text(plan, &rows)?, json_text(plan, &summary)?),
    };
    write_atomic(&runs_path, &runs)?;
    write_atomic(&summary_path, &table)?;
    let prov_path = plan.output_dir.join("provenance.json");
    let reg = registry(plan);
    let prov = serde_json::json!({ "provenance": plan.provenance, "registry": reg });
    write_atomic(&prov_path, &(serde_json::to_string_pretty(&prov)? + "\n"))?;
    Ok(vec![runs_path, summary_path, prov_path])
}

/// Reads `runs.csv`, or `runs.json` when no CSV file exists.
pub fn load_runs(dir: &Path) -> Result<Vec<RunRow>, HarnessError> {
    let csv_path = dir.join("runs.csv");
    if csv_path.exists() {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&csv_path)?;
        return r.deserialize().collect::<Result<Vec<RunRow>, _>>().map_err(Into::into);
    }
    let json_path = dir.join("runs.json");
    let text = fs::read_to_string(&json_path).map_err(io_err(&json_path))?;
    Ok(serde_json::from_str::<JsonRuns>(&text)?.rows)
}

/// Reads a summary table written by [`export_results`].
pub fn load_summary(path: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    if path.extension().is_some_and(|e| e == "json") {
        #[derive(Deserialize)]
        struct Doc {
            rows: Vec<SummaryRow>,
        }
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        return Ok(serde_json::from_str::<Doc>(&text)?.rows);
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    r.deserialize().collect::<Result<Vec<SummaryRow>, _>>().map_err(Into::into)
}
