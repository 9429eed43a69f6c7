//! Quaternion algebra over a generic real scalar.
//!
//! Scalar-first convention: `w + x·i + y·j + z·k`. Multiplication is the
//! Hamilton product, so `i·j = k`, `j·k = i`, `k·i = j` and the reversed
//! products change sign.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuaternionError {
    #[error("quaternion norm {norm} is at or below the zero tolerance")]
    NearZeroQuaternion { norm: f64 },
    #[error("invalid sampling range [{lo}, {hi})")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("quaternion component is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Magnitude, angle and unit axis of a quaternion: `‖q‖(cos θ + sin θ·n̂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDecomposition<T> {
    pub magnitude: T,
    /// In `[0, π]` when produced by [`Quaternion::to_polar`].
    pub angle: T,
    pub axis: [T; 3],
}

/// Rotation taking the imaginary direction of one quaternion onto another's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationBetween<T> {
    pub angle: T,
    pub axis: [T; 3],
    /// Set when an imaginary part or the cross product vanished; `axis` is then
    /// the fallback axis.
    pub degenerate: bool,
}

/// Axis used whenever a direction is undefined.
pub fn fallback_axis<T: Real>() -> [T; 3] {
    [T::one(), T::zero(), T::zero()]
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(w: T, x: T, y: T, z: T) -> Result<Self, QuaternionError> {
        let q = Self::new(w, x, y, z);
        if q.is_finite() {
            Ok(q)
        } else {
            Err(QuaternionError::NonFinite)
        }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn identity() -> Self {
        Self::from_real(T::one())
    }

    #[inline]
    pub fn from_real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    /// Pure quaternion `x·i + y·j + z·k`.
    #[inline]
    pub fn pure(v: [T; 3]) -> Self {
        Self::new(T::zero(), v[0], v[1], v[2])
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn imag(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Hamilton product `self · rhs`.
    #[inline]
    pub fn hamilton(self, rhs: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }

    #[inline]
    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalize(self) -> Result<Self, QuaternionError> {
        let n = self.norm();
        if n <= T::eps_q() {
            return Err(QuaternionError::NearZeroQuaternion { norm: n.as_f64() });
        }
        Ok(self.scale(n.recip()))
    }

    pub fn to_polar(self) -> Result<PolarDecomposition<T>, QuaternionError> {
        let magnitude = self.norm();
        if magnitude <= T::eps_q() {
            return Err(QuaternionError::NearZeroQuaternion { norm: magnitude.as_f64() });
        }
        let imag_norm = norm3(self.imag());
        // atan2 with a non-negative first argument already lands in [0, π].
        let angle = imag_norm.atan2(self.w);
        let axis = if imag_norm <= T::eps_q() {
            fallback_axis()
        } else {
            scale3(self.imag(), imag_norm.recip())
        };
        Ok(PolarDecomposition { magnitude, angle, axis })
    }

    pub fn from_polar(p: &PolarDecomposition<T>) -> Self {
        let (s, c) = p.angle.sin_cos();
        let k = p.magnitude * s;
        Self::new(p.magnitude * c, k * p.axis[0], k * p.axis[1], k * p.axis[2])
    }

    /// `rotor · self · conj(rotor)`. A unit rotor preserves the norm and the real
    /// part; a rotor of norm `a` additionally scales by `a²`.
    #[inline]
    pub fn sandwich(self, rotor: Self) -> Self {
        rotor.hamilton(self).hamilton(rotor.conjugate())
    }

    pub fn approx_eq(&self, other: &Self, eps: T) -> bool {
        (self.w - other.w).abs() <= eps
            && (self.x - other.x).abs() <= eps
            && (self.y - other.y).abs() <= eps
            && (self.z - other.z).abs() <= eps
    }

    /// Componentwise comparison at the scalar's default tolerance.
    pub fn approx_eq_default(&self, other: &Self) -> bool {
        self.approx_eq(other, T::eps_q())
    }
}

/// Free-function form of `rotor · q · conj(rotor)`.
#[inline]
pub fn sandwich<T: Real>(rotor: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    q.sandwich(rotor)
}

/// Angle and axis between the imaginary parts of `q1` and `q2`.
///
/// The imaginary parts are normalized before the dot product and the cosine is
/// clamped to `[-1, 1]`, so `angle = 2·acos(√((1+c)/2))` is always real and
/// equals the plain angle between the two directions.
pub fn rotation_between<T: Real>(q1: Quaternion<T>, q2: Quaternion<T>) -> RotationBetween<T> {
    let eps = T::eps_q();
    let a = q1.imag();
    let b = q2.imag();
    let na = norm3(a);
    let nb = norm3(b);
    if na <= eps || nb <= eps {
        return RotationBetween { angle: T::zero(), axis: fallback_axis(), degenerate: true };
    }
    let ua = scale3(a, na.recip());
    let ub = scale3(b, nb.recip());
    let c = dot3(ua, ub).max(-T::one()).min(T::one());
    let two = T::lit(2.0);
    let angle = two * ((T::one() + c) / two).sqrt().acos();
    let cross = cross3(ua, ub);
    let nc = norm3(cross);
    if nc <= eps {
        return RotationBetween { angle, axis: fallback_axis(), degenerate: true };
    }
    RotationBetween { angle, axis: scale3(cross, nc.recip()), degenerate: false }
}

/// Uniformly distributed unit quaternion (uniform on the 3-sphere).
pub fn random_unit_quaternion<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Quaternion<T> {
    loop {
        let mut c = [0.0f64; 4];
        for v in c.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = (c.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if n > 1e-12 {
            let q = Quaternion::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2]), T::lit(c[3]));
            if let Ok(u) = q.normalize() {
                return u;
            }
        }
    }
}

/// Quaternion whose four components are i.i.d. uniform on `[lo, hi)`.
pub fn random_quaternion_uniform<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    lo: T,
    hi: T,
) -> Result<Quaternion<T>, QuaternionError> {
    let (l, h) = (lo.as_f64(), hi.as_f64());
    if !(l < h) || !l.is_finite() || !h.is_finite() {
        return Err(QuaternionError::InvalidRange { lo: l, hi: h });
    }
    let mut draw = || T::lit(rng.random_range(l..h));
    Ok(Quaternion::new(draw(), draw(), draw(), draw()))
}

/// Uniformly distributed unit 3-vector.
pub fn random_unit_vector3<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [T::lit(v[0] / n), T::lit(v[1] / n), T::lit(v[2] / n)];
        }
    }
}

#[inline]
pub(crate) fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub(crate) fn norm3<T: Real>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

#[inline]
fn scale3<T: Real>(a: [T; 3], s: T) -> [T; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        self.hamilton(r)
    }
}

impl<T: Real> Mul<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    type Q = Quaternion<f64>;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Q {
        Q::new(w, x, y, z)
    }

    #[test]
    fn basis_product_i_j_is_k() {
        assert_eq!(q(0., 1., 0., 0.) * q(0., 0., 1., 0.), q(0., 0., 0., 1.));
    }

    #[test]
    fn identity_is_neutral() {
        let p = q(0.3, -1.2, 4.0, 2.5);
        assert_eq!(Q::identity() * p, p);
        assert_eq!(p * Q::identity(), p);
    }

    #[test]
    fn product_of_1234_and_5678() {
        // Expanded term by term by hand.
        assert_eq!(q(1., 2., 3., 4.) * q(5., 6., 7., 8.), q(-60., 12., 30., 24.));
    }

    #[test]
    fn conjugation() {
        assert_eq!(q(1., 2., 3., 4.).conjugate(), q(1., -2., -3., -4.));
        let p = q(0.5, 7.0, -1.0, 3.0);
        assert_eq!(p.conjugate().conjugate(), p);
        assert_eq!(q(5., 0., 0., 0.).conjugate(), q(5., 0., 0., 0.));
    }

    #[test]
    fn norms() {
        assert_eq!(Q::zero().norm(), 0.0);
        assert_eq!(q(1., 1., 1., 1.).norm(), 2.0);
        let prod = (q(1., 2., 3., 4.) * q(5., 6., 7., 8.)).norm();
        assert!((prod - 5220f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normalize_cases() {
        assert_eq!(q(2., 0., 0., 0.).normalize().unwrap(), q(1., 0., 0., 0.));
        assert_eq!(q(1., 1., 1., 1.).normalize().unwrap(), q(0.5, 0.5, 0.5, 0.5));
        assert!(matches!(Q::zero().normalize(), Err(QuaternionError::NearZeroQuaternion { .. })));
    }

    #[test]
    fn try_new_rejects_nan() {
        assert_eq!(Q::try_new(f64::NAN, 0., 0., 0.), Err(QuaternionError::NonFinite));
        assert!(Q::try_new(1., 2., 3., 4.).is_ok());
    }

    #[test]
    fn polar_examples() {
        let p = q(0., 1., 0., 0.).to_polar().unwrap();
        assert_eq!(p.magnitude, 1.0);
        assert!((p.angle - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.axis, [1., 0., 0.]);

        let p = q(1., 0., 0., 0.).to_polar().unwrap();
        assert_eq!((p.magnitude, p.angle, p.axis), (1.0, 0.0, [1., 0., 0.]));

        let p = q(1., 1., 0., 0.).to_polar().unwrap();
        assert!((p.magnitude - SQRT_2).abs() < 1e-15);
        assert!((p.angle - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(p.axis, [1., 0., 0.]);

        // Negative real part lands in the upper half of [0, π].
        let p = q(-1., 1., 0., 0.).to_polar().unwrap();
        assert!((p.angle - 3.0 * FRAC_PI_4).abs() < 1e-15);

        assert!(Q::zero().to_polar().is_err());
    }

    #[test]
    fn from_polar_examples() {
        let a = Q::from_polar(&PolarDecomposition { magnitude: 1.0, angle: FRAC_PI_2, axis: [1., 0., 0.] });
        assert!(a.approx_eq(&q(0., 1., 0., 0.), 1e-15));
        let b = Q::from_polar(&PolarDecomposition { magnitude: 1.0, angle: 0.0, axis: [0., 0.6, 0.8] });
        assert_eq!(b, q(1., 0., 0., 0.));
        let u = q(1., 2., 3., 4.).normalize().unwrap();
        assert!(Q::from_polar(&u.to_polar().unwrap()).approx_eq(&u, 1e-10));
    }

    #[test]
    fn sandwich_quarter_turn_about_k() {
        let h = SQRT_2 / 2.0;
        let r = sandwich(q(h, 0., 0., h), q(0., 1., 0., 0.));
        assert!(r.approx_eq(&q(0., 0., 1., 0.), 1e-15), "{r:?}");
        let p = q(0.1, 0.2, -0.3, 0.9);
        assert_eq!(sandwich(Q::identity(), p), p);
    }

    #[test]
    fn rotation_between_examples() {
        let r = rotation_between(q(0., 1., 0., 0.), q(0., 0., 1., 0.));
        assert!((r.angle - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(r.axis, [0., 0., 1.]);
        assert!(!r.degenerate);

        let a = q(0.4, 1.0, 2.0, -0.5);
        let r = rotation_between(a, a);
        assert!(r.angle.abs() < 1e-7 && r.degenerate);
        assert_eq!(r.axis, [1., 0., 0.]);

        let r = rotation_between(q(0., 1., 0., 0.), q(0., -1., 0., 0.));
        assert!((r.angle - PI).abs() < 1e-15 && r.degenerate);

        let r = rotation_between(q(3., 0., 0., 0.), q(0., 1., 0., 0.));
        assert!(r.degenerate);
        assert_eq!(r.angle, 0.0);
    }

    #[test]
    fn rotation_between_ignores_magnitudes() {
        let r = rotation_between(q(0., 1000., 0., 0.), q(0., 0., 1e-3, 0.));
        assert!((r.angle - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(r.axis, [0., 0., 1.]);
    }

    #[test]
    fn random_unit_is_unit_and_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let u: Q = random_unit_quaternion(&mut a);
            assert!((u.norm() - 1.0).abs() <= 1e-12);
            assert_eq!(u, random_unit_quaternion(&mut b));
        }
    }

    #[test]
    fn random_unit_component_means_are_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sum = [0.0; 4];
        let n = 10_000;
        for _ in 0..n {
            let u: Q = random_unit_quaternion(&mut rng);
            for (s, c) in sum.iter_mut().zip(u.to_array()) {
                *s += c;
            }
        }
        for s in sum {
            assert!((s / n as f64).abs() < 0.05);
        }
    }

    #[test]
    fn random_uniform_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let v: Q = random_quaternion_uniform(&mut rng, 0.0, 1.0).unwrap();
            assert!(v.to_array().iter().all(|c| (0.0..1.0).contains(c)));
        }
        assert!(matches!(
            random_quaternion_uniform::<f64, _>(&mut rng, 1.0, 1.0),
            Err(QuaternionError::InvalidRange { .. })
        ));
        let mut sum = [0.0; 4];
        for _ in 0..10_000 {
            let v: Q = random_quaternion_uniform(&mut rng, -5.0, 5.0).unwrap();
            for (s, c) in sum.iter_mut().zip(v.to_array()) {
                *s += c;
            }
        }
        for s in sum {
            assert!((s / 10_000.0).abs() < 0.15);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = Quaternion::<f32>::new(0., 1., 0., 0.);
        let b = Quaternion::<f32>::new(0., 0., 1., 0.);
        assert_eq!(a * b, Quaternion::new(0., 0., 0., 1.));
        assert!((Quaternion::<f32>::new(1., 1., 1., 1.).norm() - 2.0).abs() < 1e-6);
    }
}
