//! Scalar abstraction for the numeric core.
//!
//! Every statistical routine in this crate is generic over [`Real`], a small
//! extension of `num_traits::Float` that adds assign-ops, conversions to and
//! from `f64`, and the threading bounds needed by callers. `f32` and `f64`
//! both implement it; the type aliases at the crate root pin the default
//! `f64` instantiation used by the CLI.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::Float;

pub trait Real:
    Float
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Display
    + Debug
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` (exact for `f64`, rounded for `f32`).
    fn from_f64(v: f64) -> Self;

    /// Widening conversion to `f64` (exact for both `f32` and `f64`).
    fn as_f64(self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

/// Mean of a slice; zero for an empty slice.
pub fn mean<F: Real>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::zero();
    }
    xs.iter().copied().sum::<F>() / F::from_usize(xs.len())
}

/// Sample standard deviation (denominator `n - 1`).
///
/// Returns zero for slices shorter than two elements.
pub fn sample_sd<F: Real>(xs: &[F]) -> F {
    if xs.len() < 2 {
        return F::zero();
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return F::zero();
    }
    let m = mean(xs);
    let ss: F = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / F::from_usize(xs.len() - 1)).sqrt()
}
