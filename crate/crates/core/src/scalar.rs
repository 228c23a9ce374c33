//! Scalar abstraction shared by the geometry and metric code.
//!
//! Everything that computes a ratio (IoU, precision, recall, AP, AR) is
//! written against [`Scalar`] so the same routine runs over `f32`, `f64`,
//! or an exact rational type. The exact instantiation is what reports are
//! built from; the float instantiations exist for speed and cross-checks.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Number type usable by the metric and geometry routines.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// `num / den` built without passing through a float.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num).expect("u64 fits scalar") / Self::from_u64(den).expect("u64 fits scalar")
    }

    /// Converts a decimal literal such as a configured IoU threshold.
    ///
    /// Values are snapped to a 1e-6 grid so that `0.55` means 55/100 for
    /// the exact instantiations instead of the nearest binary fraction.
    fn from_decimal(x: f64) -> Self {
        let micros = (x * 1e6).round();
        if micros >= 0.0 {
            Self::ratio(micros as u64, 1_000_000)
        } else {
            -Self::ratio((-micros) as u64, 1_000_000)
        }
    }

    /// Converts a measured quantity (pixel coordinate, similarity).
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("finite value")
    }

    fn to_real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// Clamps at zero from below.
    fn non_negative(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else {
            self
        }
    }
}

impl Scalar for f32 {
    fn from_decimal(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn from_decimal(x: f64) -> Self {
        x
    }
}

impl Scalar for Ratio<i64> {}

impl Scalar for BigRational {}

/// Exact rational used for every reported metric.
pub type Exact = BigRational;

/// Builds an exact ratio from counts.
pub fn exact_ratio(num: u64, den: u64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Mean of a non-empty list of scalars.
pub fn mean<S: Scalar>(values: &[S]) -> Option<S> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().cloned().fold(S::zero(), |acc, v| acc + v);
    Some(sum / S::from_usize(values.len()).expect("usize fits scalar"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_thresholds_are_exact_for_rationals() {
        let t = Exact::from_decimal(0.55);
        assert_eq!(t, exact_ratio(11, 20));
        let t = Exact::from_decimal(0.30000000000000004);
        assert_eq!(t, exact_ratio(3, 10));
    }

    #[test]
    fn ratio_matches_float_division() {
        assert_eq!(f64::ratio(1, 3), 1.0 / 3.0);
        assert_eq!(Ratio::<i64>::ratio(2, 4), Ratio::new(1, 2));
    }

    #[test]
    fn mean_of_empty_is_none() {
        assert!(mean::<f64>(&[]).is_none());
        assert_eq!(mean(&[exact_ratio(1, 2), exact_ratio(1, 4)]), Some(exact_ratio(3, 8)));
    }
}
