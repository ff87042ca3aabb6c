//! Floating point scalar abstraction shared by the state algebra and the
//! protocol engines.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance used for norm invariant checks.
    const NORM_TOL: Self;

    /// Converts a literal, panicking only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {
    const NORM_TOL: Self = 1e-5;
}

impl Scalar for f64 {
    const NORM_TOL: Self = 1e-12;
}
