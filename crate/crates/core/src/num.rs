//! Scalar abstraction for the closed-form models.
//!
//! The energy, fitness and gap formulas are plain arithmetic and are written
//! once over [`Scalar`], with `f32` and `f64` implementations. The simulator
//! itself keeps time and position in `f64`.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};

/// Floating point type accepted by the generic models.
pub trait Scalar: 'static + Float + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync {
    /// Converts an `f64` literal, panicking only if the target cannot hold it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
