//! The six per-quaternion mutation operators.
//!
//! Donor quaternions `q1, q2, q3` are the blocks of three distinct population
//! members. Operators that need fewer donors ignore the rest.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quaternion::{random_quaternion_uniform, random_unit_quaternion, rotation_between, Quaternion};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MutationError {
    #[error("unknown mutation strategy `{0}`; expected one of ESD, EGSD, PM1, PM3, PM13, RQ")]
    UnknownStrategy(String),
    #[error("alpha must be finite and > 0, got {0}")]
    InvalidAlpha(f64),
    #[error("beta must be finite, got {0}")]
    InvalidBeta(f64),
    #[error("EGSD component range [{lo}, {hi}) is empty")]
    InvalidEgsdRange { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Euclidean sum of differences: `q3 + α(q2 − q1)`.
    #[serde(rename = "ESD")]
    Esd,
    /// Generalized sum of differences with a random quaternion scale.
    #[serde(rename = "EGSD")]
    Egsd,
    /// Polar rotor applied to `q1`.
    #[serde(rename = "PM1")]
    Pm1,
    /// Polar rotor applied to `q3`.
    #[serde(rename = "PM3")]
    Pm3,
    /// `q3` plus the polar rotor applied to `q1`.
    #[serde(rename = "PM13")]
    Pm13,
    /// Random rotation of `q1`.
    #[serde(rename = "RQ")]
    Rq,
}

impl Strategy {
    pub const ALL: [Strategy; 6] =
        [Strategy::Esd, Strategy::Egsd, Strategy::Pm1, Strategy::Pm3, Strategy::Pm13, Strategy::Rq];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::Esd => "ESD",
            Strategy::Egsd => "EGSD",
            Strategy::Pm1 => "PM1",
            Strategy::Pm3 => "PM3",
            Strategy::Pm13 => "PM13",
            Strategy::Rq => "RQ",
        }
    }

    pub fn is_polar(self) -> bool {
        matches!(self, Strategy::Pm1 | Strategy::Pm3 | Strategy::Pm13)
    }

    /// Number of donor quaternions read by the operator.
    pub fn arity(self) -> usize {
        match self {
            Strategy::Rq => 1,
            Strategy::Pm1 => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Strategy {
    type Err = MutationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.tag() == s)
            .ok_or_else(|| MutationError::UnknownStrategy(s.to_string()))
    }
}

/// Default magnitude scale for ESD (and the real-valued DE `F`).
pub const DEFAULT_ALPHA: f64 = 0.5;
/// Default magnitude scale for the polar strategies.
pub const DEFAULT_POLAR_ALPHA: f64 = 0.8;
/// Default angle scale for the polar strategies.
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_EGSD_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationSpec<T> {
    pub strategy: Strategy,
    pub alpha: T,
    pub beta: T,
    /// Component range of the random quaternion drawn by EGSD.
    pub egsd_component_range: (T, T),
}

impl<T: Real> MutationSpec<T> {
    pub fn new(strategy: Strategy, alpha: T, beta: T) -> Result<Self, MutationError> {
        let spec = Self {
            strategy,
            alpha,
            beta,
            egsd_component_range: (T::lit(DEFAULT_EGSD_RANGE.0), T::lit(DEFAULT_EGSD_RANGE.1)),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The strategy with its default scale factors.
    pub fn with_defaults(strategy: Strategy) -> Self {
        let alpha = if strategy.is_polar() { DEFAULT_POLAR_ALPHA } else { DEFAULT_ALPHA };
        Self::new(strategy, T::lit(alpha), T::lit(DEFAULT_BETA)).expect("defaults are valid")
    }

    pub fn with_egsd_range(mut self, lo: T, hi: T) -> Result<Self, MutationError> {
        self.egsd_component_range = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), MutationError> {
        if !self.alpha.is_finite() || self.alpha <= T::zero() {
            return Err(MutationError::InvalidAlpha(self.alpha.as_f64()));
        }
        if !self.beta.is_finite() {
            return Err(MutationError::InvalidBeta(self.beta.as_f64()));
        }
        let (lo, hi) = self.egsd_component_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(MutationError::InvalidEgsdRange { lo: lo.as_f64(), hi: hi.as_f64() });
        }
        Ok(())
    }

    /// Produces one mutant from the donors `(q1, q2, q3)`. Only EGSD and RQ draw
    /// from `rng`.
    pub fn apply<R: Rng + ?Sized>(
        &self,
        q1: Quaternion<T>,
        q2: Quaternion<T>,
        q3: Quaternion<T>,
        rng: &mut R,
    ) -> Quaternion<T> {
        match self.strategy {
            Strategy::Esd => mutate_esd(q1, q2, q3, self.alpha),
            Strategy::Egsd => {
                let (lo, hi) = self.egsd_component_range;
                let qr = random_quaternion_uniform(rng, lo, hi).expect("range validated");
                mutate_egsd(q1, q2, q3, qr)
            }
            Strategy::Pm1 => mutate_pm1(q1, q2, self.alpha, self.beta),
            Strategy::Pm3 => mutate_pm3(q1, q2, q3, self.alpha, self.beta),
            Strategy::Pm13 => mutate_pm13(q1, q2, q3, self.alpha, self.beta),
            Strategy::Rq => mutate_rq(q1, rng),
        }
    }
}

pub fn mutate_esd<T: Real>(q1: Quaternion<T>, q2: Quaternion<T>, q3: Quaternion<T>, alpha: T) -> Quaternion<T> {
    q3 + (q2 - q1).scale(alpha)
}

pub fn mutate_egsd<T: Real>(
    q1: Quaternion<T>,
    q2: Quaternion<T>,
    q3: Quaternion<T>,
    qr: Quaternion<T>,
) -> Quaternion<T> {
    q3 + qr * (q2 - q1)
}

/// `α[cos(βθ) + sin(βθ)·n̂]` where `(θ, n̂)` rotate `imag(q1)` onto `imag(q2)`.
///
/// Falls back to `(α, 0, 0, 0)` when the geometry is degenerate.
pub fn polar_rotor<T: Real>(q1: Quaternion<T>, q2: Quaternion<T>, alpha: T, beta: T) -> Quaternion<T> {
    let rot = rotation_between(q1, q2);
    if rot.degenerate {
        return Quaternion::from_real(alpha);
    }
    let (s, c) = (beta * rot.angle).sin_cos();
    Quaternion::new(c, s * rot.axis[0], s * rot.axis[1], s * rot.axis[2]).scale(alpha)
}

/// The rotor is not renormalized: the result has norm `α²·‖q1‖`.
pub fn mutate_pm1<T: Real>(q1: Quaternion<T>, q2: Quaternion<T>, alpha: T, beta: T) -> Quaternion<T> {
    q1.sandwich(polar_rotor(q1, q2, alpha, beta))
}

pub fn mutate_pm3<T: Real>(
    q1: Quaternion<T>,
    q2: Quaternion<T>,
    q3: Quaternion<T>,
    alpha: T,
    beta: T,
) -> Quaternion<T> {
    q3.sandwich(polar_rotor(q1, q2, alpha, beta))
}

pub fn mutate_pm13<T: Real>(
    q1: Quaternion<T>,
    q2: Quaternion<T>,
    q3: Quaternion<T>,
    alpha: T,
    beta: T,
) -> Quaternion<T> {
    q3 + q1.sandwich(polar_rotor(q1, q2, alpha, beta))
}

pub fn mutate_rq<T: Real, R: Rng + ?Sized>(q1: Quaternion<T>, rng: &mut R) -> Quaternion<T> {
    q1.sandwich(random_unit_quaternion(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    type Q = Quaternion<f64>;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Q {
        Q::new(w, x, y, z)
    }

    #[test]
    fn esd_examples() {
        let a = q(0.3, 1., -2., 4.);
        let b = q(-1., 0.5, 2., 0.);
        assert_eq!(mutate_esd(a, a, b, 0.7), b);
        assert_eq!(mutate_esd(a, q(9., 9., 9., 9.), b, 0.0), b);
        assert_eq!(mutate_esd(q(0., 1., 0., 0.), q(0., 2., 0., 0.), q(1., 0., 0., 0.), 0.5), q(1., 0.5, 0., 0.));
    }

    #[test]
    fn egsd_examples() {
        let (a, b, c) = (q(1., 2., 3., 4.), q(-0.5, 0.25, 8., 1.), q(3., -1., 0., 2.));
        assert_eq!(mutate_egsd(a, b, c, q(0.5, 0., 0., 0.)), mutate_esd(a, b, c, 0.5));
        assert_eq!(mutate_egsd(a, a, c, q(0.2, 0.4, -1., 3.)), c);
        assert_eq!(mutate_egsd(Q::zero(), q(0., 0., 1., 0.), Q::zero(), q(0., 1., 0., 0.)), q(0., 0., 0., 1.));
    }

    #[test]
    fn polar_rotor_examples() {
        let (i, j) = (q(0., 1., 0., 0.), q(0., 0., 1., 0.));
        assert_eq!(polar_rotor(i, j, 2.5, 0.0), q(2.5, 0., 0., 0.));
        // θ = π/2 and β = 1: cos(π/2) + sin(π/2)k.
        assert!(polar_rotor(i, j, 1.0, 1.0).approx_eq(&q(0., 0., 0., 1.), 1e-15));
        // β = 1/2 gives the half angle.
        let h = SQRT_2 / 2.0;
        assert!(polar_rotor(i, j, 1.0, 0.5).approx_eq(&q(h, 0., 0., h), 1e-15));
        assert_eq!(polar_rotor(i, i, 0.8, 0.5), q(0.8, 0., 0., 0.));
    }

    #[test]
    fn half_angle_pm1_carries_q1_onto_q2_direction() {
        let a = q(0., 2., 0., 0.);
        let b = q(0., 0., 5., 0.);
        assert!(mutate_pm1(a, b, 1.0, 0.5).approx_eq(&q(0., 0., 2., 0.), 1e-14));
    }

    #[test]
    fn pm_identities() {
        let (a, b, c) = (q(0.2, 1., -2., 0.5), q(-0.3, 0.1, 0.7, 2.), q(1., 2., 3., -4.));
        assert!(mutate_pm1(a, b, 1.0, 0.0).approx_eq(&a, 1e-15));
        assert!(mutate_pm1(a, a, 1.0, 0.5).approx_eq(&a, 1e-15));
        assert!(mutate_pm3(a, b, c, 1.0, 0.0).approx_eq(&c, 1e-15));
        assert!(mutate_pm3(a, a, c, 1.0, 0.5).approx_eq(&c, 1e-15));
        assert!(mutate_pm13(a, b, c, 1.0, 0.0).approx_eq(&(c + a), 1e-15));
        assert_eq!(mutate_pm13(a, b, Q::zero(), 0.7, 0.3), mutate_pm1(a, b, 0.7, 0.3));
        assert_eq!(mutate_pm3(a, b, a, 0.7, 0.3), mutate_pm1(a, b, 0.7, 0.3));
    }

    #[test]
    fn pm_norm_scales_by_alpha_squared() {
        let (a, b, c) = (q(0.2, 1., -2., 0.5), q(-0.3, 0.1, 0.7, 2.), q(1., 2., 3., -4.));
        let alpha = 0.6;
        assert!((mutate_pm1(a, b, alpha, 0.8).norm() - alpha * alpha * a.norm()).abs() < 1e-12);
        assert!((mutate_pm3(a, b, c, alpha, 0.8).norm() - alpha * alpha * c.norm()).abs() < 1e-12);
    }

    #[test]
    fn pm13_minus_q3_is_pm1() {
        let (a, b, c) = (q(0.2, 1., -2., 0.5), q(-0.3, 0.1, 0.7, 2.), q(1., 2., 3., -4.));
        let d = mutate_pm13(a, b, c, 0.9, 0.4) - c;
        assert!(d.approx_eq(&mutate_pm1(a, b, 0.9, 0.4), 1e-14));
    }

    #[test]
    fn rq_examples() {
        let a = q(0.5, -1., 2., 0.25);
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        let m = mutate_rq(a, &mut r1);
        assert!((m.norm() - a.norm()).abs() < 1e-10);
        assert!((m.w - a.w).abs() < 1e-12);
        assert_eq!(m, mutate_rq(a, &mut r2));
        let real = q(3., 0., 0., 0.);
        assert!(mutate_rq(real, &mut r1).approx_eq(&real, 1e-12));
    }

    #[test]
    fn every_strategy_is_finite_at_the_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in Strategy::ALL {
            let spec = MutationSpec::<f64>::with_defaults(s);
            let m = spec.apply(Q::zero(), Q::zero(), Q::zero(), &mut rng);
            assert!(m.is_finite(), "{s}");
        }
    }

    #[test]
    fn tags_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.tag().parse::<Strategy>().unwrap(), s);
        }
        let err = "PM2".parse::<Strategy>().unwrap_err().to_string();
        assert!(err.contains("PM13") && err.contains("RQ"), "{err}");
    }

    #[test]
    fn spec_validation() {
        assert_eq!(MutationSpec::new(Strategy::Esd, 0.0, 0.5), Err(MutationError::InvalidAlpha(0.0)));
        assert!(MutationSpec::new(Strategy::Pm1, 1.0, f64::NAN).is_err());
        let s = MutationSpec::new(Strategy::Egsd, 0.5, 0.5).unwrap();
        assert!(s.with_egsd_range(1.0, 1.0).is_err());
    }
}
