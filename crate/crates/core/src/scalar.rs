//! Floating-point scalar abstraction shared by weights, scoring and evaluation.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type used for weights, scores and metrics: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion of an integer count.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }

    /// Conversion of an `f64` literal or parameter.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
