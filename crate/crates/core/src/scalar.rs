//! Scalar abstraction: every closed-form and quadrature routine is written
//! once against [`Real`] and instantiated for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance on `Σp = 1` for a valid distribution.
    fn normalization_tol() -> Self;

    /// Below this |a| the efficiency uses its logarithmic limit branch.
    fn limit_threshold() -> Self;

    /// Literal conversion; panics only if `f64` cannot be represented at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn normalization_tol() -> Self {
        1e-12
    }
    fn limit_threshold() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn normalization_tol() -> Self {
        1e-5
    }
    fn limit_threshold() -> Self {
        1e-6
    }
}

/// Counts and sizes lifted into the scalar type.
#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap_or_else(T::infinity)
}
