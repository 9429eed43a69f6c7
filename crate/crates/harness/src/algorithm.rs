use std::fmt;
use std::str::FromStr;

use qde_core::{InitMethod, Strategy};

use crate::HarnessError;

/// One row of the comparison: a quaternion scheme or the real-valued baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Qde { init: InitMethod, strategy: Strategy },
    RealDe,
}

pub const REAL_DE: &str = "Real-DE";

impl AlgorithmId {
    /// The default 13: both initializations crossed with the six mutations,
    /// then the baseline.
    pub fn all() -> Vec<AlgorithmId> {
        InitMethod::ALL
            .into_iter()
            .flat_map(|init| Strategy::ALL.into_iter().map(move |strategy| AlgorithmId::Qde { init, strategy }))
            .chain([AlgorithmId::RealDe])
            .collect()
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn init(&self) -> Option<InitMethod> {
        match self {
            AlgorithmId::Qde { init, .. } => Some(*init),
            AlgorithmId::RealDe => None,
        }
    }

    pub fn strategy(&self) -> Option<Strategy> {
        match self {
            AlgorithmId::Qde { strategy, .. } => Some(*strategy),
            AlgorithmId::RealDe => None,
        }
    }

    pub fn is_qde(&self) -> bool {
        matches!(self, AlgorithmId::Qde { .. })
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmId::Qde { init, strategy } => write!(f, "{init}-{strategy}"),
            AlgorithmId::RealDe => f.write_str(REAL_DE),
        }
    }
}

impl FromStr for AlgorithmId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == REAL_DE {
            return Ok(AlgorithmId::RealDe);
        }
        let (init, strategy) = s.split_once('-').ok_or_else(|| unknown_algorithm(s, None))?;
        let init = init.parse::<InitMethod>().map_err(|e| unknown_algorithm(s, Some(e)))?;
        let strategy = strategy.parse::<Strategy>().map_err(|e| unknown_algorithm(s, Some(e.to_string())))?;
        Ok(AlgorithmId::Qde { init, strategy })
    }
}

fn unknown_algorithm(s: &str, cause: Option<String>) -> HarnessError {
    let valid: Vec<String> = AlgorithmId::all().iter().map(AlgorithmId::label).collect();
    let cause = cause.map(|c| format!("{c}; ")).unwrap_or_default();
    HarnessError::Config(format!("unknown algorithm `{s}`: {cause}valid ids are {}", valid.join(", ")))
}

/// Parses a comma-separated selection. Each item is a full id (`Polar-PM1`,
/// `Real-DE`), a bare mutation (`PM1`, both initializations), a bare
/// initialization (`E4`, all six mutations) or `all`. Order follows
/// [`AlgorithmId::all`] and duplicates collapse.
pub fn parse_selection(items: &[String]) -> Result<Vec<AlgorithmId>, HarnessError> {
    let mut chosen = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            chosen.extend(AlgorithmId::all());
        } else if let Ok(init) = item.parse::<InitMethod>() {
            chosen.extend(Strategy::ALL.map(|strategy| AlgorithmId::Qde { init, strategy }));
        } else if !item.contains('-') {
            let strategy = item.parse::<Strategy>().map_err(|e| {
                HarnessError::Config(format!("{e}; initializations are E4, Polar; the baseline is {REAL_DE}"))
            })?;
            chosen.extend(InitMethod::ALL.map(|init| AlgorithmId::Qde { init, strategy }));
        } else {
            chosen.push(item.parse()?);
        }
    }
    let order = AlgorithmId::all();
    chosen.sort_by_key(|a| order.iter().position(|o| o == a));
    chosen.dedup();
    if chosen.is_empty() {
        return Err(HarnessError::Config("algorithm selection is empty".into()));
    }
    Ok(chosen)
}
