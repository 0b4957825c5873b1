//! Floating-point abstraction for the radio math.
//!
//! Everything numeric in [`crate::channel`], [`crate::linkadapt`] and
//! [`crate::sched`] is generic over [`Scalar`] so the same code runs on
//! `f32` or `f64`. The simulator and the CLI pin `f64` through the
//! aliases at the crate root.

use num_traits::{Float, FromPrimitive};

/// A floating-point scalar: `f32` or `f64`.
///
/// Extends `num_traits::Float` with two conversion helpers so generic
/// code can mix in `f64` constants without `F::from(x).unwrap()` noise.
pub trait Scalar: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display {
    /// Converts an `f64` constant into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("constant must be representable")
    }

    /// Widens to `f64`, mainly for error messages and reports.
    fn widen(self) -> f64 {
        self.to_f64().expect("scalar must widen to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
