//! The floating-point abstraction every numeric routine in the crate is
//! written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar: `f32` or `f64`.
///
/// Tolerances quoted throughout the crate (1e-9 residuals, 1e-12 condition
/// cutoffs) are meaningful for `f64`; `f32` is supported for the model
/// evaluation paths but most verification thresholds will not hold at single
/// precision.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm_sq<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}
