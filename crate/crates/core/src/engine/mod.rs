//! The quaternion-valued DE loop and the classical real-valued DE baseline.
//!
//! A `D`-dimensional solution is stored as `D/4` quaternion blocks. `D = 3` is
//! embedded as a single block whose real part is ignored on decode.

mod genome;
mod qde;
mod real_de;

pub use genome::{decode, encode, repair_bounds, BlockLayout, Genome};
pub use qde::{evaluate_population, evolve_generation, init_population, run};
pub use real_de::run_real_de;

use std::error::Error as StdError;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mutation::{MutationError, MutationSpec, Strategy, DEFAULT_ALPHA};
use crate::scalar::Real;

pub type BoxedError = Box<dyn StdError + Send + Sync>;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("dimension {0} is unsupported; expected 3 or a positive multiple of 4")]
    UnsupportedDimension(usize),
    #[error("vector of length {actual} does not match dimension {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("population size {0} is below the minimum of 4")]
    PopulationTooSmall(usize),
    #[error("crossover rate {0} outside [0, 1]")]
    InvalidCrossoverRate(f64),
    #[error("invalid bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error("objective evaluation failed: {0}")]
    Objective(#[source] BoxedError),
    #[error("objective returned a non-finite value")]
    NonFiniteFitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InitMethod {
    /// Every quaternion component uniform over the coordinate bounds.
    E4,
    /// Unit quaternions from a uniform angle in `[-2π, 2π]` and a uniform axis.
    Polar,
}

impl InitMethod {
    pub const ALL: [InitMethod; 2] = [InitMethod::E4, InitMethod::Polar];

    pub fn tag(self) -> &'static str {
        match self {
            InitMethod::E4 => "E4",
            InitMethod::Polar => "Polar",
        }
    }
}

impl std::fmt::Display for InitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for InitMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E4" => Ok(InitMethod::E4),
            "Polar" => Ok(InitMethod::Polar),
            other => Err(format!("unknown initialization `{other}`; expected E4 or Polar")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundPolicy {
    #[default]
    Clamp,
    Reflect,
}

impl std::str::FromStr for BoundPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamp" => Ok(BoundPolicy::Clamp),
            "reflect" => Ok(BoundPolicy::Reflect),
            other => Err(format!("unknown bound policy `{other}`; expected clamp or reflect")),
        }
    }
}

pub const DEFAULT_POPULATION: usize = 30;
pub const DEFAULT_CROSSOVER: f64 = 0.9;
pub const DEFAULT_GENERATIONS: usize = 100;
pub const DEFAULT_BOUNDS: (f64, f64) = (-5.0, 5.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig<T> {
    pub population_size: usize,
    pub crossover_rate: T,
    pub mutation: MutationSpec<T>,
    pub init: InitMethod,
    pub max_generations: usize,
    pub seed: u64,
    pub dimension: usize,
    /// Box applied to every coordinate.
    pub bounds: (T, T),
    pub bound_policy: BoundPolicy,
    /// Build the whole mutant vector before crossover instead of mutating
    /// lazily inside the per-block crossover test.
    pub mutant_first: bool,
}

impl<T: Real> EngineConfig<T> {
    /// Default settings for `strategy` on a `dimension`-dimensional problem.
    pub fn new(strategy: Strategy, init: InitMethod, dimension: usize, seed: u64) -> Self {
        Self {
            population_size: DEFAULT_POPULATION,
            crossover_rate: T::lit(DEFAULT_CROSSOVER),
            mutation: MutationSpec::with_defaults(strategy),
            init,
            max_generations: DEFAULT_GENERATIONS,
            seed,
            dimension,
            bounds: (T::lit(DEFAULT_BOUNDS.0), T::lit(DEFAULT_BOUNDS.1)),
            bound_policy: BoundPolicy::Clamp,
            mutant_first: false,
        }
    }

    /// Defaults for the real-valued baseline; `mutation.alpha` is its `F`.
    pub fn real_de(dimension: usize, seed: u64) -> Self {
        let mut cfg = Self::new(Strategy::Esd, InitMethod::E4, dimension, seed);
        cfg.mutation.alpha = T::lit(DEFAULT_ALPHA);
        cfg
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.population_size < 4 {
            return Err(EngineError::PopulationTooSmall(self.population_size));
        }
        let cr = self.crossover_rate;
        if !(cr >= T::zero() && cr <= T::one()) {
            return Err(EngineError::InvalidCrossoverRate(cr.as_f64()));
        }
        let (lo, hi) = self.bounds;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(EngineError::InvalidBounds { lo: lo.as_f64(), hi: hi.as_f64() });
        }
        self.mutation.validate()?;
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    /// Best fitness of the initial population followed by one entry per generation.
    pub best_fitness_per_generation: Vec<T>,
    /// Best quaternion genome; `None` for the real-valued baseline.
    pub best_genome: Option<Genome<T>>,
    pub best_solution: Vec<T>,
    pub evaluations: usize,
}

impl<T: Real> RunTrace<T> {
    pub fn final_fitness(&self) -> T {
        *self.best_fitness_per_generation.last().expect("trace holds the initial best")
    }

    pub fn generations(&self) -> usize {
        self.best_fitness_per_generation.len() - 1
    }
}

/// Evaluates `x`, mapping failures and non-finite values into [`EngineError`].
pub(crate) fn evaluate_point<T, F, E>(objective: &mut F, x: &[T]) -> Result<T, EngineError>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T, E>,
    E: Into<BoxedError>,
{
    let v = objective(x).map_err(|e| EngineError::Objective(e.into()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EngineError::NonFiniteFitness)
    }
}

/// Three distinct indices in `0..n`, all different from `target`.
pub(crate) fn pick_donors<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, target: usize) -> [usize; 3] {
    let picks = rand::seq::index::sample(rng, n - 1, 3);
    let shift = |k: usize| if k >= target { k + 1 } else { k };
    [shift(picks.index(0)), shift(picks.index(1)), shift(picks.index(2))]
}
