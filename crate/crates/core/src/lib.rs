//! Quaternion-valued differential evolution.
//!
//! The optimizer encodes a real search vector as quaternion blocks and evolves
//! them with quaternion mutation operators. Around it sit a black-box
//! benchmark suite and the rank statistics used to compare algorithms.
//!
//! ```
//! use qde_core::{benchmarks, engine, EngineConfig64, InitMethod, Strategy};
//!
//! let sphere = benchmarks::make_instance(1, 3, 7).unwrap();
//! let cfg = EngineConfig64::new(Strategy::Pm1, InitMethod::Polar, 3, 42);
//! let trace = engine::run(&cfg, |x: &[f64]| sphere.evaluate(x)).unwrap();
//! assert_eq!(trace.best_fitness_per_generation.len(), cfg.max_generations + 1);
//! ```

pub mod benchmarks;
pub mod engine;
pub mod mutation;
pub mod quaternion;
pub mod scalar;
pub mod seeding;
pub mod stats;

pub use engine::{BoundPolicy, EngineConfig, EngineError, Genome, InitMethod, RunTrace};
pub use mutation::{MutationError, MutationSpec, Strategy};
pub use quaternion::{Quaternion, QuaternionError};
pub use scalar::Real;

pub type Quat = Quaternion<f64>;
pub type Quat32 = Quaternion<f32>;
pub type MutationSpec64 = MutationSpec<f64>;
pub type MutationSpec32 = MutationSpec<f32>;
pub type EngineConfig64 = EngineConfig<f64>;
pub type EngineConfig32 = EngineConfig<f32>;
pub type Genome64 = Genome<f64>;
pub type Genome32 = Genome<f32>;
pub type RunTrace64 = RunTrace<f64>;
pub type RunTrace32 = RunTrace<f32>;
