use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qde_core::benchmarks::{function_info, Group};
use qde_core::stats::{
    cd_diagram_data, friedman, median, nemenyi, CdDiagram, FriedmanResult, ImanDavenport, NemenyiResult,
};
use qde_core::{InitMethod, Strategy};
use serde::Serialize;

use crate::algorithm::AlgorithmId;
use crate::config::ExperimentPlan;
use crate::runner::{write_atomic, RunRow};
use crate::HarnessError;

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Every algorithm over every function.
    All,
    /// Every algorithm within each function group.
    PerGroup,
    /// Mutations compared with initializations pooled.
    ByMutation,
    /// Initializations compared with mutations pooled.
    ByInitialization,
    /// Every algorithm ranked on convergence generation.
    Convergence,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 5] = [
        Hypothesis::All,
        Hypothesis::PerGroup,
        Hypothesis::ByMutation,
        Hypothesis::ByInitialization,
        Hypothesis::Convergence,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Hypothesis::All => "all",
            Hypothesis::PerGroup => "per-group",
            Hypothesis::ByMutation => "by-mutation",
            Hypothesis::ByInitialization => "by-initialization",
            Hypothesis::Convergence => "convergence",
        }
    }
}

impl FromStr for Hypothesis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Hypothesis::ALL.into_iter().find(|h| h.tag() == s).ok_or_else(|| {
            let valid: Vec<&str> = Hypothesis::ALL.iter().map(|h| h.tag()).collect();
            HarnessError::Config(format!("unknown hypothesis `{s}`; expected one of {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    FinalRegret,
    ConvergenceGeneration,
}

impl Metric {
    fn of(self, row: &RunRow) -> f64 {
        match self {
            Metric::FinalRegret => row.final_fitness,
            Metric::ConvergenceGeneration => row.convergence_generation as f64,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Metric::FinalRegret => "final regret",
            Metric::ConvergenceGeneration => "convergence generation",
        }
    }
}

/// One Friedman/Nemenyi comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub name: String,
    pub hypothesis: &'static str,
    pub metric: Metric,
    pub treatments: Vec<String>,
    pub blocks: Vec<String>,
    /// `blocks × treatments`, each the median over the pooled runs.
    pub matrix: Vec<Vec<f64>>,
    pub friedman: FriedmanResult,
    pub iman_davenport: ImanDavenport,
    pub nemenyi: NemenyiResult,
    pub diagram: CdDiagram,
}

impl Analysis {
    pub fn mean_rank(&self, treatment: &str) -> Option<f64> {
        let i = self.treatments.iter().position(|t| t == treatment)?;
        Some(self.friedman.mean_ranks[i])
    }

    pub fn significant(&self, a: &str, b: &str) -> Option<bool> {
        let i = self.treatments.iter().position(|t| t == a)?;
        let j = self.treatments.iter().position(|t| t == b)?;
        Some(self.nemenyi.pairwise_significant[i][j])
    }

    pub fn document(&self) -> String {
        let mut s = String::new();
        let fr = &self.friedman;
        let id = &self.iman_davenport;
        let _ = writeln!(s, "analysis: {}", self.name);
        let _ = writeln!(s, "hypothesis: {}", self.hypothesis);
        let _ = writeln!(s, "metric: {} (median per cell, lower is better)", self.metric.describe());
        let _ = writeln!(s, "blocks: {} ({})", fr.n, self.blocks.join(", "));
        let _ = writeln!(s, "treatments: {}", fr.k);
        let _ = writeln!(s);
        let _ = writeln!(s, "Friedman chi-square = {:.4} (df {}), p = {:.4e}", fr.statistic, fr.k - 1, fr.p_value);
        let _ = writeln!(
            s,
            "Iman-Davenport F = {:.4} (df {}, {}), p = {:.4e}",
            id.statistic, id.df_treatments, id.df_error, id.p_value
        );
        let _ = writeln!(
            s,
            "Nemenyi critical difference (alpha {}) = {:.4}",
            self.nemenyi.alpha, self.nemenyi.critical_difference
        );
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<6}{:<20}mean rank", "rank", "treatment");
        for (pos, e) in self.diagram.entries.iter().enumerate() {
            let _ = writeln!(s, "{:<6}{:<20}{:.4}", pos + 1, e.label, e.mean_rank);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "groups with no significant difference:");
        for clique in &self.diagram.cliques {
            let names: Vec<&str> = clique.iter().map(|&i| self.diagram.entries[i].label.as_str()).collect();
            let _ = writeln!(s, "  {}", names.join(", "));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "significant pairs:");
        let mut any = false;
        for a in 0..fr.k {
            for b in a + 1..fr.k {
                if self.nemenyi.pairwise_significant[a][b] {
                    any = true;
                    let gap = (fr.mean_ranks[a] - fr.mean_ranks[b]).abs();
                    let _ = writeln!(s, "  {} vs {} (rank gap {:.4})", self.treatments[a], self.treatments[b], gap);
                }
            }
        }
        if !any {
            let _ = writeln!(s, "  none");
        }
        s
    }
}

struct Treatment {
    label: String,
    members: Vec<AlgorithmId>,
}

/// Fails with the list of missing `(algorithm, function, replicate)` cells.
pub fn check_complete(plan: &ExperimentPlan, rows: &[RunRow], algorithms: &[AlgorithmId]) -> Result<(), HarnessError> {
    let have: std::collections::HashSet<(&str, u32, usize)> =
        rows.iter().map(|r| (r.algorithm.as_str(), r.function_id, r.replicate)).collect();
    let mut missing = Vec::new();
    for a in algorithms {
        let label = a.label();
        for &f in &plan.functions {
            for r in 0..plan.replicates {
                if !have.contains(&(label.as_str(), f, r)) {
                    missing.push(format!("{label}/f{f}/r{r}"));
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::IncompleteMatrix { missing })
    }
}

fn compare(
    name: String,
    hypothesis: Hypothesis,
    metric: Metric,
    treatments: &[Treatment],
    functions: &[u32],
    cells: &HashMap<(String, u32), Vec<&RunRow>>,
    alpha: f64,
) -> Result<Analysis, HarnessError> {
    let matrix: Vec<Vec<f64>> = functions
        .iter()
        .map(|&f| {
            treatments
                .iter()
                .map(|t| {
                    let pooled: Vec<f64> = t
                        .members
                        .iter()
                        .flat_map(|a| cells.get(&(a.label(), f)).into_iter().flatten())
                        .map(|r| metric.of(r))
                        .collect();
                    median(&pooled)
                })
                .collect()
        })
        .collect();
    let fr = friedman(&matrix, true)?;
    let nem = nemenyi(&fr, alpha)?;
    let labels: Vec<String> = treatments.iter().map(|t| t.label.clone()).collect();
    let diagram = cd_diagram_data(&fr, &nem, &labels)?;
    let blocks = functions
        .iter()
        .map(|&f| format!("f{f} {}", function_info(f).map(|i| i.name).unwrap_or("?")))
        .collect();
    Ok(Analysis {
        name,
        hypothesis: hypothesis.tag(),
        metric,
        treatments: labels,
        blocks,
        matrix,
        iman_davenport: fr.iman_davenport(),
        friedman: fr,
        nemenyi: nem,
        diagram,
    })
}

/// Runs one hypothesis over the plan's scope. `PerGroup` yields one analysis
/// per group holding at least two functions; the others yield exactly one.
pub fn analyze(
    plan: &ExperimentPlan,
    rows: &[RunRow],
    hypothesis: Hypothesis,
    alpha: f64,
) -> Result<Vec<Analysis>, HarnessError> {
    let qde: Vec<AlgorithmId> = plan.algorithms.iter().copied().filter(AlgorithmId::is_qde).collect();
    let scope = match hypothesis {
        Hypothesis::ByMutation | Hypothesis::ByInitialization => &qde,
        _ => &plan.algorithms,
    };
    check_complete(plan, rows, scope)?;

    let mut cells: HashMap<(String, u32), Vec<&RunRow>> = HashMap::new();
    for r in rows.iter().filter(|r| r.replicate < plan.replicates) {
        cells.entry((r.algorithm.clone(), r.function_id)).or_default().push(r);
    }
    let each: Vec<Treatment> =
        plan.algorithms.iter().map(|a| Treatment { label: a.label(), members: vec![*a] }).collect();
    let tag = hypothesis.tag();

    let out = match hypothesis {
        Hypothesis::All => {
            vec![compare(tag.into(), hypothesis, Metric::FinalRegret, &each, &plan.functions, &cells, alpha)?]
        }
        Hypothesis::Convergence => vec![compare(
            tag.into(),
            hypothesis,
            Metric::ConvergenceGeneration,
            &each,
            &plan.functions,
            &cells,
            alpha,
        )?],
        Hypothesis::PerGroup => {
            let mut v = Vec::new();
            for g in Group::ALL {
                let fs: Vec<u32> =
                    plan.functions.iter().copied().filter(|&f| function_info(f).is_ok_and(|i| i.group == g)).collect();
                if fs.len() >= 2 {
                    let name = format!("{tag}-{g}");
                    v.push(compare(name, hypothesis, Metric::FinalRegret, &each, &fs, &cells, alpha)?);
                }
            }
            v
        }
        Hypothesis::ByMutation => {
            let treatments: Vec<Treatment> = Strategy::ALL
                .into_iter()
                .map(|s| Treatment {
                    label: s.tag().to_string(),
                    members: qde.iter().copied().filter(|a| a.strategy() == Some(s)).collect(),
                })
                .filter(|t| !t.members.is_empty())
                .collect();
            vec![compare(tag.into(), hypothesis, Metric::FinalRegret, &treatments, &plan.functions, &cells, alpha)?]
        }
        Hypothesis::ByInitialization => {
            let treatments: Vec<Treatment> = InitMethod::ALL
                .into_iter()
                .map(|i| Treatment {
                    label: i.tag().to_string(),
                    members: qde.iter().copied().filter(|a| a.init() == Some(i)).collect(),
                })
                .filter(|t| !t.members.is_empty())
                .collect();
            vec![compare(tag.into(), hypothesis, Metric::FinalRegret, &treatments, &plan.functions, &cells, alpha)?]
        }
    };
    Ok(out)
}

/// Writes `<name>.txt`, `<name>.cd.json` and `<name>.ranks.csv` for each
/// analysis under `dir`.
pub fn write_analyses(dir: &Path, analyses: &[Analysis]) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    for a in analyses {
        let txt = dir.join(format!("{}.txt", a.name));
        write_atomic(&txt, &a.document())?;
        let json = dir.join(format!("{}.cd.json", a.name));
        write_atomic(&json, &(serde_json::to_string_pretty(a)? + "\n"))?;
        let csv_path = dir.join(format!("{}.ranks.csv", a.name));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["position", "treatment", "mean_rank"])?;
        for (pos, e) in a.diagram.entries.iter().enumerate() {
            w.write_record([(pos + 1).to_string(), e.label.clone(), e.mean_rank.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Export(e.to_string()))?;
        write_atomic(&csv_path, &String::from_utf8_lossy(&bytes))?;
        written.extend([txt, json, csv_path]);
    }
    Ok(written)
}
