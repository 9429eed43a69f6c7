use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    /// χ²_F with `k − 1` degrees of freedom.
    pub statistic: f64,
    pub k: usize,
    pub n: usize,
    pub p_value: f64,
    /// Mean rank per treatment; rank 1 is best.
    pub mean_ranks: Vec<f64>,
}

/// Iman–Davenport refinement of the Friedman statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImanDavenport {
    pub statistic: f64,
    pub df_treatments: f64,
    pub df_error: f64,
    pub p_value: f64,
}

/// Ranks within one block, 1 = best; ties share the average rank.
pub fn average_ranks(values: &[f64], lower_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let o = values[a].total_cmp(&values[b]);
        if lower_is_better {
            o
        } else {
            o.reverse()
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) share ranks start+1..=end.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = shared;
        }
        start = end;
    }
    ranks
}

/// Friedman rank test over `blocks` rows, each holding one value per treatment.
pub fn friedman(blocks: &[Vec<f64>], lower_is_better: bool) -> Result<FriedmanResult, StatsError> {
    let n = blocks.len();
    let k = blocks.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(StatsError::DegenerateInput { blocks: n, treatments: k });
    }
    let mut rank_sums = vec![0.0; k];
    for (row, values) in blocks.iter().enumerate() {
        if values.len() != k {
            return Err(StatsError::RaggedMatrix { row, expected: k, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite { row });
        }
        for (s, r) in rank_sums.iter_mut().zip(average_ranks(values, lower_is_better)) {
            *s += r;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let statistic = (12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    let p_value = ChiSquared::new(kf - 1.0).expect("k ≥ 2").sf(statistic).clamp(0.0, 1.0);
    Ok(FriedmanResult { statistic, k, n, p_value, mean_ranks })
}

impl FriedmanResult {
    pub fn iman_davenport(&self) -> ImanDavenport {
        let (nf, kf) = (self.n as f64, self.k as f64);
        let df_treatments = kf - 1.0;
        let df_error = (kf - 1.0) * (nf - 1.0);
        let denom = nf * (kf - 1.0) - self.statistic;
        let statistic = if denom > 0.0 { (nf - 1.0) * self.statistic / denom } else { f64::INFINITY };
        let p_value = if statistic.is_finite() {
            FisherSnedecor::new(df_treatments, df_error).expect("positive dof").sf(statistic).clamp(0.0, 1.0)
        } else {
            0.0
        };
        ImanDavenport { statistic, df_treatments, df_error, p_value }
    }
}
