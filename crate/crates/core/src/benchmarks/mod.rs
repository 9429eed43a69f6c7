//! The 24 noiseless black-box benchmark functions in five groups.
//!
//! Formulas follow the standard black-box optimization benchmarking
//! definitions (oscillation/asymmetry transforms, conditioning, boundary
//! penalties). Instances are generated locally from a seed: optimum location,
//! rotation matrices and Gallagher peaks. `evaluate` reports the regret
//! `f(x) − f_opt`, so the optimum reads 0.

mod functions;
pub mod transforms;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding::derive_seed;
use transforms::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchmarkError {
    #[error("unknown function id {0}; expected 1..=24")]
    UnknownFunction(u32),
    #[error("dimension {0} is unsupported; expected 3 or a positive multiple of 4")]
    UnsupportedDimension(usize),
    #[error("point has {actual} coordinates, instance expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "Separable")]
    Separable,
    /// Unimodal, low or moderate conditioning.
    #[serde(rename = "U-Low")]
    ULow,
    /// Unimodal, high conditioning.
    #[serde(rename = "U-High")]
    UHigh,
    /// Multi-modal with adequate global structure.
    #[serde(rename = "M-Adequate")]
    MAdequate,
    /// Multi-modal with weak global structure.
    #[serde(rename = "M-Weak")]
    MWeak,
}

impl Group {
    pub const ALL: [Group; 5] = [Group::Separable, Group::ULow, Group::UHigh, Group::MAdequate, Group::MWeak];

    pub fn tag(self) -> &'static str {
        match self {
            Group::Separable => "Separable",
            Group::ULow => "U-Low",
            Group::UHigh => "U-High",
            Group::MAdequate => "M-Adequate",
            Group::MWeak => "M-Weak",
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown group `{s}`; expected one of Separable, U-Low, U-High, M-Adequate, M-Weak"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FunctionInfo {
    pub id: u32,
    pub name: &'static str,
    pub group: Group,
    /// False for Linear Slope, whose optimum sits on the domain boundary.
    pub interior_optimum: bool,
    /// The first linear map applied to `x − x_opt` is the rotation `R`, and `R`
    /// appears nowhere else.
    pub inner_rotation_only: bool,
}

const fn info(id: u32, name: &'static str, group: Group, inner_rotation_only: bool) -> FunctionInfo {
    FunctionInfo { id, name, group, interior_optimum: id != 5, inner_rotation_only }
}

pub const FUNCTIONS: [FunctionInfo; 24] = [
    info(1, "Sphere", Group::Separable, false),
    info(2, "Ellipsoidal", Group::Separable, false),
    info(3, "Rastrigin", Group::Separable, false),
    info(4, "Büche-Rastrigin", Group::Separable, false),
    info(5, "Linear Slope", Group::Separable, false),
    info(6, "Attractive Sector", Group::ULow, true),
    info(7, "Step Ellipsoidal", Group::ULow, true),
    info(8, "Rosenbrock", Group::ULow, false),
    info(9, "Rotated Rosenbrock", Group::ULow, false),
    info(10, "Rotated Ellipsoidal", Group::UHigh, true),
    info(11, "Discus", Group::UHigh, true),
    info(12, "Bent Cigar", Group::UHigh, false),
    info(13, "Sharp Ridge", Group::UHigh, true),
    info(14, "Different Powers", Group::UHigh, true),
    info(15, "Rastrigin (non-separable)", Group::MAdequate, false),
    info(16, "Weierstrass", Group::MAdequate, false),
    info(17, "Schaffers F7", Group::MAdequate, true),
    info(18, "Schaffers F7 ill-conditioned", Group::MAdequate, true),
    info(19, "Composite Griewank-Rosenbrock", Group::MAdequate, false),
    info(20, "Schwefel", Group::MWeak, false),
    info(21, "Gallagher 101 Peaks", Group::MWeak, false),
    info(22, "Gallagher 21 Peaks", Group::MWeak, false),
    info(23, "Katsuura", Group::MWeak, true),
    info(24, "Lunacek bi-Rastrigin", Group::MWeak, false),
];

/// One function per group, for quick runs.
pub const SMOKE_TIER: [u32; 5] = [1, 8, 12, 15, 20];

pub fn function_info(id: u32) -> Result<&'static FunctionInfo, BenchmarkError> {
    FUNCTIONS.iter().find(|f| f.id == id).ok_or(BenchmarkError::UnknownFunction(id))
}

/// The registry, optionally filtered by group.
pub fn list_functions(group: Option<Group>) -> Vec<FunctionInfo> {
    FUNCTIONS.iter().filter(|f| group.is_none_or(|g| f.group == g)).copied().collect()
}

/// Where an instance puts its optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Optimum drawn from the seed: uniform in `[-4, 4]^D`, or the function's
    /// fixed magnitude with random signs where the definition prescribes one.
    #[default]
    Shifted,
    /// The textbook location: the origin for most functions, `(1, …, 1)` for
    /// Rosenbrock, the all-positive sign pattern for Linear Slope, Schwefel
    /// and Lunacek. Rotations and Gallagher peaks are still seeded.
    Canonical,
}

impl std::str::FromStr for Placement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shifted" => Ok(Placement::Shifted),
            "canonical" => Ok(Placement::Canonical),
            other => Err(format!("unknown placement `{other}`; expected shifted or canonical")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Peaks {
    pub centers: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Diagonal of each peak's (unrotated) precision matrix.
    pub precisions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkInstance {
    pub function_id: u32,
    pub name: &'static str,
    pub group: Group,
    pub dimension: usize,
    /// Domain is `[lo, hi]^D`.
    pub domain: (f64, f64),
    pub x_opt: Vec<f64>,
    /// Raw function value at `x_opt`; subtracted by [`BenchmarkInstance::evaluate`].
    pub f_opt: f64,
    pub rotation_seed: u64,
    pub placement: Placement,
    pub(crate) rot_r: Matrix,
    pub(crate) rot_q: Matrix,
    pub(crate) peaks: Option<Peaks>,
}

pub const DOMAIN: (f64, f64) = (-5.0, 5.0);
const SCHWEFEL_OPT: f64 = 4.209_687_463_3 / 2.0;
pub(crate) const LUNACEK_MU0: f64 = 2.5;

/// Instance with a shifted optimum.
pub fn make_instance(function_id: u32, dimension: usize, seed: u64) -> Result<BenchmarkInstance, BenchmarkError> {
    make_instance_with(function_id, dimension, seed, Placement::Shifted)
}

pub fn make_instance_with(
    function_id: u32,
    dimension: usize,
    seed: u64,
    placement: Placement,
) -> Result<BenchmarkInstance, BenchmarkError> {
    let info = function_info(function_id)?;
    if !(dimension == 3 || (dimension > 0 && dimension.is_multiple_of(4))) {
        return Err(BenchmarkError::UnsupportedDimension(dimension));
    }
    let d = dimension;
    let rotation_seed = derive_seed(&[seed, u64::from(function_id), d as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(rotation_seed);

    let uniform_shift: Vec<f64> = (0..d).map(|_| rng.random_range(-4.0..4.0)).collect();
    let signs: Vec<f64> = (0..d).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let rot_r = Matrix::random_orthonormal(d, &mut rng);
    let rot_q = Matrix::random_orthonormal(d, &mut rng);
    let peaks = match function_id {
        21 => Some(make_peaks(&mut rng, d, 101, 1000.0, 4.0, 5.0)),
        22 => Some(make_peaks(&mut rng, d, 21, 1000.0 * 1000.0, 3.92, 4.9)),
        _ => None,
    };

    let canonical = placement == Placement::Canonical;
    let plus = vec![1.0; d];
    let fixed_signs = if canonical { &plus } else { &signs };
    let x_opt: Vec<f64> = match function_id {
        5 => fixed_signs.iter().map(|s| 5.0 * s).collect(),
        20 => fixed_signs.iter().map(|s| SCHWEFEL_OPT * s).collect(),
        24 => fixed_signs.iter().map(|s| 0.5 * LUNACEK_MU0 * s).collect(),
        21 | 22 => peaks.as_ref().expect("peaks built").centers[0].clone(),
        8 if canonical => vec![1.0; d],
        9 | 19 if canonical => {
            let c = rosenbrock_scale(d);
            rot_r.apply_transpose(&vec![0.5 / c; d])
        }
        4 if !canonical => uniform_shift
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { v.abs() } else { *v })
            .collect(),
        _ if canonical => vec![0.0; d],
        _ => uniform_shift,
    };

    let mut inst = BenchmarkInstance {
        function_id,
        name: info.name,
        group: info.group,
        dimension: d,
        domain: DOMAIN,
        x_opt,
        f_opt: 0.0,
        rotation_seed,
        placement,
        rot_r,
        rot_q,
        peaks,
    };
    inst.f_opt = functions::raw(&inst, &inst.x_opt);
    Ok(inst)
}

pub(crate) fn rosenbrock_scale(d: usize) -> f64 {
    ((d as f64).sqrt() / 8.0).max(1.0)
}

fn make_peaks<R: Rng + ?Sized>(rng: &mut R, d: usize, count: usize, top_condition: f64, global_box: f64, local_box: f64) -> Peaks {
    let locals = count - 1;
    let mut pool: Vec<f64> =
        (0..locals).map(|j| 1000f64.powf(2.0 * j as f64 / (locals - 1) as f64)).collect();
    // Fisher-Yates so the draw order is fixed by the rng alone.
    for i in (1..pool.len()).rev() {
        let k = rng.random_range(0..=i);
        pool.swap(i, k);
    }
    let conditions: Vec<f64> = std::iter::once(top_condition).chain(pool).collect();
    let precisions = conditions
        .iter()
        .map(|&a| {
            let mut diag: Vec<f64> = (0..d).map(|j| a.powf(0.5 * transforms::ratio(j, d)) / a.powf(0.25)).collect();
            for i in (1..d).rev() {
                let k = rng.random_range(0..=i);
                diag.swap(i, k);
            }
            diag
        })
        .collect();
    let centers = (0..count)
        .map(|i| {
            let b = if i == 0 { global_box } else { local_box };
            (0..d).map(|_| rng.random_range(-b..b)).collect()
        })
        .collect();
    let weights = (0..count)
        .map(|i| if i == 0 { 10.0 } else { 1.1 + 8.0 * (i - 1) as f64 / (count - 2) as f64 })
        .collect();
    Peaks { centers, weights, precisions }
}

impl BenchmarkInstance {
    pub fn info(&self) -> &'static FunctionInfo {
        function_info(self.function_id).expect("instance built from the registry")
    }

    /// Regret `f(x) − f_opt`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, BenchmarkError> {
        if x.len() != self.dimension {
            return Err(BenchmarkError::DimensionMismatch { expected: self.dimension, actual: x.len() });
        }
        Ok(functions::raw(self, x) - self.f_opt)
    }

    /// Replaces the inner rotation `R`; `x_opt` and `f_opt` are kept.
    pub fn with_rotation(mut self, r: Matrix) -> Self {
        assert_eq!(r.dim(), self.dimension);
        self.rot_r = r;
        self
    }

    pub fn rotation(&self) -> &Matrix {
        &self.rot_r
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().all(|v| (self.domain.0..=self.domain.1).contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_layout() {
        assert_eq!(list_functions(None).len(), 24);
        for g in Group::ALL {
            let n = list_functions(Some(g)).len();
            assert_eq!(n, if g == Group::ULow { 4 } else { 5 }, "{g}");
        }
        assert!(list_functions(Some(Group::UHigh)).iter().any(|f| f.name == "Bent Cigar"));
        let sep: Vec<&str> = list_functions(Some(Group::Separable)).iter().map(|f| f.name).collect();
        assert_eq!(sep, ["Sphere", "Ellipsoidal", "Rastrigin", "Büche-Rastrigin", "Linear Slope"]);
        let weak: Vec<u32> = list_functions(Some(Group::MWeak)).iter().map(|f| f.id).collect();
        assert_eq!(weak, [20, 21, 22, 23, 24]);
        for (k, &id) in SMOKE_TIER.iter().enumerate() {
            assert_eq!(function_info(id).unwrap().group, Group::ALL[k]);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(make_instance(25, 3, 1).unwrap_err(), BenchmarkError::UnknownFunction(25));
        assert_eq!(make_instance(1, 5, 1).unwrap_err(), BenchmarkError::UnsupportedDimension(5));
        let inst = make_instance(1, 3, 1).unwrap();
        assert_eq!(inst.evaluate(&[0.0; 4]).unwrap_err(), BenchmarkError::DimensionMismatch { expected: 3, actual: 4 });
    }

    #[test]
    fn deterministic_instances() {
        let a = make_instance(21, 3, 77).unwrap();
        let b = make_instance(21, 3, 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.x_opt, make_instance(21, 3, 78).unwrap().x_opt);
    }

    #[test]
    fn shifted_optimum_margin() {
        for id in 1..=24 {
            let inst = make_instance(id, 4, 12).unwrap();
            if id == 5 {
                assert!(inst.x_opt.iter().all(|v| v.abs() == 5.0));
            } else if id == 9 || id == 19 {
                continue;
            } else {
                assert!(inst.x_opt.iter().all(|v| v.abs() <= 4.0), "{id}");
            }
        }
    }

    #[test]
    fn hand_values() {
        let s = make_instance_with(1, 3, 0, Placement::Canonical).unwrap();
        assert_eq!(s.evaluate(&[1.0, 2.0, 2.0]).unwrap(), 9.0);
        let r = make_instance_with(3, 3, 0, Placement::Canonical).unwrap();
        assert_eq!(r.evaluate(&[0.0; 3]).unwrap(), 0.0);
        // Canonical Rosenbrock is the textbook form: zero at (1,1,1), 2 at the origin.
        let ros = make_instance_with(8, 3, 0, Placement::Canonical).unwrap();
        assert_eq!(ros.evaluate(&[1.0; 3]).unwrap(), 0.0);
        assert_eq!(ros.evaluate(&[0.0; 3]).unwrap(), 2.0);
        // Shifted Rosenbrock, z = x − x_opt + 1.
        let ros = make_instance(8, 3, 5).unwrap();
        let at: Vec<f64> = ros.x_opt.iter().map(|v| v - 1.0).collect();
        assert!((ros.evaluate(&at).unwrap() - 2.0).abs() < 1e-12);
    }
}
