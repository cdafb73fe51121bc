//! Scalar abstraction for the numeric core.
//!
//! Every algorithm in this crate is generic over [`Scalar`], so the same
//! pipeline can run in `f32` or `f64`. The crate root exports concrete
//! aliases for the common case (`f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps, NumCast, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar usable throughout the pipeline: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + Display
    + Debug
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(v: f64) -> Self {
        NumCast::from(v).expect("constant representable in scalar type")
    }

    /// Conversion from a count or index.
    fn of_usize(n: usize) -> Self {
        NumCast::from(n).expect("count representable in scalar type")
    }

    /// Widening view for interop with `f64`-only backends (FFT, eigensolver).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(f64::of(1.5), 1.5);
        assert_eq!(f32::of_usize(800), 800.0);
        assert_eq!(2.5f32.as_f64(), 2.5);
    }
}
