//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar used for coefficients, outcomes, and expectations.
///
/// In practice this is `f32` or `f64`. Probabilities and summary statistics
/// stay `f64` throughout; this trait converts between the two worlds.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Copy
    + Send
    + Sync
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts a probability or other `f64` quantity into this scalar.
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts into any Scalar")
    }

    /// Widens (or passes through) to `f64` for reporting.
    fn as_real(self) -> f64 {
        self.to_f64().expect("any Scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Copy
        + Send
        + Sync
        + Debug
        + Display
        + Default
        + Serialize
        + DeserializeOwned
        + 'static
{
}

/// Neumaier-compensated running sum.
///
/// Used where many small terms of mixed sign accumulate (enumeration over
/// randomization atoms) and the result is compared at 1e-10 tolerances.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}
