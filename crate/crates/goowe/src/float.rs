//! Scalar abstraction for the numeric core.

use std::fmt;
use std::iter::Sum;

use num_traits::{FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. Streams, learners and the weight solver
/// all run at either precision; the evaluation harness and CLI use `f64`.
pub trait Float:
    num_traits::Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for constants and RNG output.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant must be representable")
    }

    /// Lossy conversion to `f64`, for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Float for f32 {}
impl Float for f64 {}
