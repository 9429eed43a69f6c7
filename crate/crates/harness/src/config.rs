//! Layered experiment configuration: built-in defaults, then an optional TOML
//! file, then command-line flags. Every resolved key remembers all three layers.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qde_core::benchmarks::{function_info, list_functions, Group, Placement, FUNCTIONS, SMOKE_TIER};
use qde_core::engine::{BlockLayout, DEFAULT_CROSSOVER, DEFAULT_GENERATIONS, DEFAULT_POPULATION};
use qde_core::mutation::{DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_POLAR_ALPHA};
use qde_core::seeding::fnv1a;
use qde_core::BoundPolicy;
use serde::{Deserialize, Serialize};

use crate::algorithm::{parse_selection, AlgorithmId};
use crate::HarnessError;

pub const DEFAULT_MASTER_SEED: u64 = 1;
pub const DEFAULT_REPLICATES: usize = 20;
pub const DEFAULT_DIMENSION: usize = 3;

/// One configuration layer. Every field is optional; unset fields fall through
/// to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub master_seed: Option<u64>,
    /// Replicates per (algorithm, function) cell.
    pub seeds: Option<usize>,
    pub dimension: Option<usize>,
    pub generations: Option<usize>,
    pub np: Option<usize>,
    pub cr: Option<f64>,
    /// ESD scale and the baseline's `F`.
    pub alpha: Option<f64>,
    /// Magnitude scale of the polar mutations.
    pub polar_alpha: Option<f64>,
    pub beta: Option<f64>,
    pub placement: Option<String>,
    pub bound_policy: Option<String>,
    /// Tolerance for the convergence generation.
    pub tolerance: Option<f64>,
    pub functions: Option<ListOrText<u32>>,
    pub algorithms: Option<ListOrText<String>>,
    pub tier: Option<String>,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    pub jobs: Option<usize>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListOrText<T> {
    List(Vec<T>),
    Text(String),
}

impl<T: Display> Display for ListOrText<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ListOrText::List(v) => f.write_str(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            ListOrText::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(HarnessError::UnknownFormat(other.to_string())),
        }
    }
}

impl Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Default,
    File,
    Flag,
}

/// How one key was resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvenanceEntry {
    pub value: String,
    pub source: Layer,
    pub default: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub code_version: String,
    pub config_file: Option<PathBuf>,
    pub resolved: BTreeMap<String, ProvenanceEntry>,
}

impl Provenance {
    /// `key = value [source] (default …, file …, flag …)` lines for file
    /// headers. The output directory and worker count are left out since they
    /// do not affect results.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("qde-harness {}", self.code_version)];
        for (key, e) in self.resolved.iter().filter(|(k, _)| !matches!(k.as_str(), "out" | "jobs")) {
            let mut layers = vec![format!("default {}", e.default)];
            layers.extend(e.file.as_ref().map(|v| format!("file {v}")));
            layers.extend(e.flag.as_ref().map(|v| format!("flag {v}")));
            lines.push(format!("{key} = {} [{:?}] ({})", e.value, e.source, layers.join(", ")));
        }
        lines
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub algorithms: Vec<AlgorithmId>,
    pub functions: Vec<u32>,
    pub dimension: usize,
    pub replicates: usize,
    pub master_seed: u64,
    pub population_size: usize,
    pub crossover_rate: f64,
    pub alpha: f64,
    pub polar_alpha: f64,
    pub beta: f64,
    pub generations: usize,
    pub placement: Placement,
    pub bound_policy: BoundPolicy,
    pub tolerance: f64,
    pub output_dir: PathBuf,
    pub jobs: usize,
    pub format: ExportFormat,
    pub provenance: Provenance,
}

impl ExperimentPlan {
    /// The default plan with no file and no flags.
    pub fn default_plan() -> Self {
        resolve(None, ConfigLayer::default()).expect("defaults are valid")
    }

    pub fn cell_count(&self) -> usize {
        self.algorithms.len() * self.functions.len() * self.replicates
    }

    /// Hash of every setting that changes a run's result; stored in trace files
    /// so stale traces from a different configuration are recomputed.
    pub fn fingerprint(&self) -> u64 {
        let text = format!(
            "master_seed={} dim={} generations={} np={} cr={:?} alpha={:?} polar_alpha={:?} beta={:?} placement={:?} bounds={:?}",
            self.master_seed,
            self.dimension,
            self.generations,
            self.population_size,
            self.crossover_rate,
            self.alpha,
            self.polar_alpha,
            self.beta,
            self.placement,
            self.bound_policy,
        );
        fnv1a(&text)
    }
}

/// Reads a TOML layer. Errors name the file, line and key.
pub fn load_config_file(path: &Path) -> Result<ConfigLayer, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        let location = e.span().map(|span| locate(&text, span.start)).unwrap_or_default();
        HarnessError::Config(format!("{}{location}: {}", path.display(), e.message().trim()))
    })
}

fn locate(text: &str, offset: usize) -> String {
    let offset = offset.min(text.len());
    let line_no = text[..offset].matches('\n').count() + 1;
    let line = text.lines().nth(line_no - 1).unwrap_or("");
    match line.split_once('=') {
        Some((key, _)) => format!(": line {line_no}, key `{}`", key.trim()),
        None => format!(": line {line_no}"),
    }
}

/// Full layered resolution: defaults, then `path` if given, then `flags`.
pub fn parse_config(path: Option<&Path>, flags: ConfigLayer) -> Result<ExperimentPlan, HarnessError> {
    let file = path.map(|p| load_config_file(p).map(|layer| (p.to_path_buf(), layer))).transpose()?;
    resolve(file, flags)
}

struct Resolver {
    entries: BTreeMap<String, ProvenanceEntry>,
}

impl Resolver {
    fn pick<T: Clone + Display>(&mut self, key: &str, default: T, file: Option<T>, flag: Option<T>) -> T {
        let (value, source) = match (&flag, &file) {
            (Some(v), _) => (v.clone(), Layer::Flag),
            (None, Some(v)) => (v.clone(), Layer::File),
            (None, None) => (default.clone(), Layer::Default),
        };
        self.entries.insert(
            key.to_string(),
            ProvenanceEntry {
                value: value.to_string(),
                source,
                default: default.to_string(),
                file: file.map(|v| v.to_string()),
                flag: flag.map(|v| v.to_string()),
            },
        );
        value
    }
}

fn config_err(key: &str, msg: impl Display) -> HarnessError {
    HarnessError::Config(format!("{key}: {msg}"))
}

pub fn resolve(file: Option<(PathBuf, ConfigLayer)>, flags: ConfigLayer) -> Result<ExperimentPlan, HarnessError> {
    let (config_file, f) = match file {
        Some((p, layer)) => (Some(p), layer),
        None => (None, ConfigLayer::default()),
    };
    let mut r = Resolver { entries: BTreeMap::new() };

    let master_seed = r.pick("master_seed", DEFAULT_MASTER_SEED, f.master_seed, flags.master_seed);
    let replicates = r.pick("seeds", DEFAULT_REPLICATES, f.seeds, flags.seeds);
    let dimension = r.pick("dimension", DEFAULT_DIMENSION, f.dimension, flags.dimension);
    let generations = r.pick("generations", DEFAULT_GENERATIONS, f.generations, flags.generations);
    let population_size = r.pick("np", DEFAULT_POPULATION, f.np, flags.np);
    let crossover_rate = r.pick("cr", DEFAULT_CROSSOVER, f.cr, flags.cr);
    let alpha = r.pick("alpha", DEFAULT_ALPHA, f.alpha, flags.alpha);
    let polar_alpha = r.pick("polar_alpha", DEFAULT_POLAR_ALPHA, f.polar_alpha, flags.polar_alpha);
    let beta = r.pick("beta", DEFAULT_BETA, f.beta, flags.beta);
    let tolerance = r.pick("tolerance", 0.0, f.tolerance, flags.tolerance);
    let jobs = r.pick("jobs", 0, f.jobs, flags.jobs);
    let output_dir = r.pick("out", "results".to_string(), path_text(f.out), path_text(flags.out));
    let placement = r.pick("placement", "canonical".to_string(), f.placement, flags.placement);
    let bound_policy = r.pick("bound_policy", "clamp".to_string(), f.bound_policy, flags.bound_policy);
    let format = r.pick("format", "csv".to_string(), f.format, flags.format);
    let tier = r.pick("tier", "full".to_string(), f.tier, flags.tier);
    let functions = r.pick(
        "functions",
        format!("tier:{tier}"),
        f.functions.map(|v| v.to_string()),
        flags.functions.map(|v| v.to_string()),
    );
    let algorithms = r.pick(
        "algorithms",
        "all".to_string(),
        f.algorithms.map(|v| v.to_string()),
        flags.algorithms.map(|v| v.to_string()),
    );

    if replicates == 0 {
        return Err(config_err("seeds", "need at least one replicate"));
    }
    BlockLayout::for_dimension(dimension).map_err(|e| config_err("dimension", e))?;
    if population_size < 4 {
        return Err(config_err("np", "population must hold at least 4 members"));
    }
    if !(0.0..=1.0).contains(&crossover_rate) {
        return Err(config_err("cr", format!("{crossover_rate} is outside [0, 1]")));
    }
    for (key, v) in [("alpha", alpha), ("polar_alpha", polar_alpha)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(config_err(key, format!("{v} must be finite and positive")));
        }
    }
    if !beta.is_finite() {
        return Err(config_err("beta", "must be finite"));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(config_err("tolerance", "must be finite and non-negative"));
    }
    let placement = placement.parse::<Placement>().map_err(|e| config_err("placement", e))?;
    let bound_policy = bound_policy.parse::<BoundPolicy>().map_err(|e| config_err("bound_policy", e))?;
    let format = format.parse::<ExportFormat>()?;
    let functions = match functions.strip_prefix("tier:") {
        Some(t) => parse_tier(t)?,
        None => parse_functions(&functions)?,
    };
    let algorithms = parse_selection(&[algorithms])?;

    Ok(ExperimentPlan {
        algorithms,
        functions,
        dimension,
        replicates,
        master_seed,
        population_size,
        crossover_rate,
        alpha,
        polar_alpha,
        beta,
        generations,
        placement,
        bound_policy,
        tolerance,
        output_dir: PathBuf::from(output_dir),
        jobs,
        format,
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_file,
            resolved: r.entries,
        },
    })
}

fn path_text(p: Option<PathBuf>) -> Option<String> {
    p.map(|p| p.display().to_string())
}

pub fn parse_tier(tier: &str) -> Result<Vec<u32>, HarnessError> {
    match tier {
        "smoke" => Ok(SMOKE_TIER.to_vec()),
        "full" => Ok(FUNCTIONS.iter().map(|f| f.id).collect()),
        other => Err(config_err("tier", format!("unknown tier `{other}`; expected smoke or full"))),
    }
}

/// Comma-separated function ids, `a-b` ranges, group names, `all` or a tier.
pub fn parse_functions(text: &str) -> Result<Vec<u32>, HarnessError> {
    let mut ids = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(g) = Group::ALL.iter().find(|g| g.tag().eq_ignore_ascii_case(item)) {
            ids.extend(list_functions(Some(*g)).iter().map(|f| f.id));
        } else if item == "all" || item == "full" || item == "smoke" {
            ids.extend(parse_tier(if item == "smoke" { "smoke" } else { "full" })?);
        } else if let Some((a, b)) = item.split_once('-') {
            let (a, b) = (parse_id(a)?, parse_id(b)?);
            ids.extend(a..=b);
        } else {
            ids.push(parse_id(item)?);
        }
    }
    for &id in &ids {
        function_info(id).map_err(|e| config_err("functions", e))?;
    }
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(config_err("functions", "selection is empty"));
    }
    Ok(ids)
}

fn parse_id(s: &str) -> Result<u32, HarnessError> {
    let groups: Vec<&str> = Group::ALL.iter().map(|g| g.tag()).collect();
    s.trim().parse().map_err(|_| {
        config_err(
            "functions",
            format!("`{s}` is not a function id (1..=24), a range, a tier or a group ({})", groups.join(", ")),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let plan = ExperimentPlan::default_plan();
        assert_eq!(plan.algorithms.len(), 13);
        assert_eq!(plan.functions.len(), 24);
        assert_eq!(plan.replicates, 20);
        assert_eq!(plan.cell_count(), 6240);
        assert_eq!(plan.dimension, 3);
        assert_eq!(plan.population_size, 30);
        assert!(plan.provenance.resolved.values().all(|e| e.source == Layer::Default));
    }

    #[test]
    fn flags_override_files() {
        let file = ConfigLayer { np: Some(35), seeds: Some(3), ..Default::default() };
        let flags = ConfigLayer { np: Some(40), ..Default::default() };
        let plan = resolve(Some(("x.toml".into(), file)), flags).unwrap();
        assert_eq!(plan.population_size, 40);
        assert_eq!(plan.replicates, 3);
        let np = &plan.provenance.resolved["np"];
        assert_eq!((np.source, np.default.as_str()), (Layer::Flag, "30"));
        assert_eq!((np.file.as_deref(), np.flag.as_deref()), (Some("35"), Some("40")));
        assert_eq!(plan.provenance.resolved["seeds"].source, Layer::File);
    }

    #[test]
    fn function_selectors() {
        assert_eq!(parse_functions("1,8, 12").unwrap(), vec![1, 8, 12]);
        assert_eq!(parse_functions("3-5,1").unwrap(), vec![1, 3, 4, 5]);
        assert_eq!(parse_functions("U-Low").unwrap(), vec![6, 7, 8, 9]);
        assert_eq!(parse_functions("smoke").unwrap(), SMOKE_TIER.to_vec());
        assert!(parse_functions("25").is_err());
        assert!(parse_functions("sphere").is_err());
        let tier = ConfigLayer { tier: Some("smoke".into()), ..Default::default() };
        assert_eq!(resolve(None, tier).unwrap().functions, SMOKE_TIER.to_vec());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            ConfigLayer { np: Some(3), ..Default::default() },
            ConfigLayer { cr: Some(1.5), ..Default::default() },
            ConfigLayer { dimension: Some(5), ..Default::default() },
            ConfigLayer { placement: Some("random".into()), ..Default::default() },
            ConfigLayer { algorithms: Some(ListOrText::Text("PM2".into())), ..Default::default() },
        ];
        for layer in bad {
            assert!(matches!(resolve(None, layer), Err(HarnessError::Config(_))));
        }
        let fmt = ConfigLayer { format: Some("xml".into()), ..Default::default() };
        assert!(matches!(resolve(None, fmt), Err(HarnessError::UnknownFormat(_))));
    }

    #[test]
    fn fingerprint_tracks_engine_settings() {
        let a = ExperimentPlan::default_plan();
        let b = resolve(None, ConfigLayer { jobs: Some(3), ..Default::default() }).unwrap();
        let c = resolve(None, ConfigLayer { beta: Some(0.25), ..Default::default() }).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
