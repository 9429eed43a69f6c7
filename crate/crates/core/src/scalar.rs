use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the quaternion algebra and the optimizer are generic over.
///
/// Random draws are always taken in `f64` and converted, so a seed produces the
/// same stream of decisions for every scalar type.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance below which a norm is treated as zero.
    const EPSILON_Q: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn eps_q() -> Self {
        Self::lit(Self::EPSILON_Q)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EPSILON_Q: f64 = 1e-12;
}

impl Real for f32 {
    const EPSILON_Q: f64 = 1e-6;
}
