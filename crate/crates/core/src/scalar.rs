//! Floating-point scalar abstraction.
//!
//! Every numerical routine in this crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances quoted throughout the crate are
//! calibrated for `f64`; `f32` instantiations run the same algorithms at
//! single precision.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + Sum
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    <T as NumCast>::from(x).expect("f64 literal representable in scalar type")
}

/// Converts an integer into `T`.
#[inline]
pub fn from_int<T: Real>(n: i64) -> T {
    <T as NumCast>::from(n).expect("integer representable in scalar type")
}
