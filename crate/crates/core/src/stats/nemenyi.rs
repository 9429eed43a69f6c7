use serde::{Deserialize, Serialize};

use super::{FriedmanResult, StatsError};

// Studentized range quantiles divided by √2, for k = 2..=20 treatments and
// infinite degrees of freedom. k ≤ 10 are the standard published values;
// k = 11..20 were computed from the studentized range distribution and
// rounded to three decimals.
const Q_05: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426,
    3.458, 3.489, 3.517, 3.544,
];
const Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120, 3.159, 3.196,
    3.230, 3.261, 3.291, 3.319,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NemenyiResult {
    pub critical_difference: f64,
    pub alpha: f64,
    /// `k × k`, symmetric, false on the diagonal.
    pub pairwise_significant: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdEntry {
    pub label: String,
    pub mean_rank: f64,
}

/// Treatments sorted by mean rank (best first) and the maximal groups of
/// mutually non-significant treatments, as index ranges into `entries`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdDiagram {
    pub critical_difference: f64,
    pub alpha: f64,
    pub n: usize,
    pub entries: Vec<CdEntry>,
    pub cliques: Vec<Vec<usize>>,
}

/// Tabulated `q_α / √2` for `k` treatments.
pub fn studentized_range_q(alpha: f64, k: usize) -> Result<f64, StatsError> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(StatsError::UnsupportedAlpha(alpha));
    };
    if !(2..=20).contains(&k) {
        return Err(StatsError::KOutOfTable(k));
    }
    Ok(table[k - 2])
}

pub fn nemenyi(fr: &FriedmanResult, alpha: f64) -> Result<NemenyiResult, StatsError> {
    let k = fr.k;
    let q = studentized_range_q(alpha, k)?;
    let cd = q * ((k * (k + 1)) as f64 / (6.0 * fr.n as f64)).sqrt();
    let pairwise_significant = (0..k)
        .map(|a| (0..k).map(|b| (fr.mean_ranks[a] - fr.mean_ranks[b]).abs() > cd).collect())
        .collect();
    Ok(NemenyiResult { critical_difference: cd, alpha, pairwise_significant })
}

pub fn cd_diagram_data(fr: &FriedmanResult, nem: &NemenyiResult, labels: &[String]) -> Result<CdDiagram, StatsError> {
    if labels.len() != fr.k {
        return Err(StatsError::LabelMismatch { labels: labels.len(), k: fr.k });
    }
    let mut order: Vec<usize> = (0..fr.k).collect();
    order.sort_by(|&a, &b| fr.mean_ranks[a].total_cmp(&fr.mean_ranks[b]).then(a.cmp(&b)));

    // In rank order a contiguous run is mutually non-significant iff its two
    // ends are. Run ends never decrease with the start, so a run is maximal
    // exactly when it reaches further than the previous one.
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut prev_end = None;
    for start in 0..order.len() {
        let mut end = start;
        while end + 1 < order.len() && !nem.pairwise_significant[order[start]][order[end + 1]] {
            end += 1;
        }
        if prev_end.is_none_or(|p| end > p) {
            cliques.push((start..=end).collect());
        }
        prev_end = Some(end);
    }

    let entries =
        order.iter().map(|&i| CdEntry { label: labels[i].clone(), mean_rank: fr.mean_ranks[i] }).collect();
    Ok(CdDiagram { critical_difference: nem.critical_difference, alpha: nem.alpha, n: fr.n, entries, cliques })
}
