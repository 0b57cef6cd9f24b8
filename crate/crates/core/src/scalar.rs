//! Floating-point abstraction shared by the store, the learner and the metrics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar usable for feature values, network parameters and rewards.
///
/// Implemented for `f32` and `f64`. Conversions from `f64` are total for both,
/// so [`Scalar::of`] never fails on finite input.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_f64() {
        assert_eq!(<f32 as Scalar>::of(1.5).as_f64(), 1.5);
        assert_eq!(<f64 as Scalar>::of_usize(7), 7.0);
    }
}
