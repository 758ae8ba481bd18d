//! Scalar abstractions.
//!
//! Everything numeric in this crate is generic over [`Real`], which `f32` and
//! `f64` implement. The determinant/adjugate kernels only need field
//! arithmetic and are generic over the weaker [`Field`], so they also work
//! with exact rationals.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    /// A tolerance of `x`, floored at 64 ulps of `Self`.
    ///
    /// Thresholds like `1e-12` are meaningless in `f32`; this keeps them
    /// attainable at the lower precision while leaving `f64` untouched.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact-or-approximate field arithmetic (floats, rationals).
pub trait Field: Num + Copy + PartialOrd + Neg<Output = Self> {
    #[inline]
    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl<T> Field for T where T: Num + Copy + PartialOrd + Neg<Output = T> {}
