//! Scalar abstraction for the numeric kernel.
//!
//! Everything downstream of the graph layer (network weights, probabilities,
//! losses, edit-distance costs) is written against [`Real`] so the same code
//! runs at `f32` or `f64`. Checkpoints and reports always serialize through
//! `f64`, so switching the working precision never changes file formats.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` (identity for `f64`).
    fn of(v: f64) -> Self;

    /// Widening conversion to `f64` (identity for `f64`).
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn of(v: f64) -> Self {
        v
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Probabilities are kept inside `[PROB_FLOOR, 1 - PROB_FLOOR]` so that
/// logarithms and odds ratios stay finite.
pub const PROB_FLOOR: f64 = 1e-7;

/// Clamp a probability into the stable range.
#[inline]
pub fn clamp_prob<R: Real>(p: R) -> R {
    let lo = R::of(PROB_FLOOR);
    let hi = R::one() - lo;
    if p < lo {
        lo
    } else if p > hi {
        hi
    } else {
        p
    }
}
