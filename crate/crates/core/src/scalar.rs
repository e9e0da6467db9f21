use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Scalar field the load and bound computations are generic over.
///
/// Implemented for `f32`/`f64` (approximate) and [`BigRational`] (exact).
/// Every quantity the crate manipulates is a ratio of small integers, so
/// `from_ratio` is the canonical constructor; with `BigRational` it is exact
/// and arithmetic never overflows.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + 'static
{
    fn from_int(v: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_int(numer) / Self::from_int(denom)
    }

    /// Approximate value, for convenience output only.
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_int(v: i64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        // `new` reduces and keeps the denominator positive.
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Larger of two scalars. The values this crate produces are always
/// comparable, so the partial order is total in practice.
pub(crate) fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn ratio_construction_reduces() {
        let x = Exact::from_ratio(6, -9);
        assert_eq!(x, Exact::from_ratio(-2, 3));
        assert_eq!(x.to_string(), "-2/3");
    }

    #[test]
    fn integer_ratio_displays_without_denominator() {
        assert_eq!(Exact::from_ratio(8, 4).to_string(), "2");
    }

    #[test]
    fn float_ratio() {
        assert_eq!(f64::from_ratio(1, 4), 0.25);
    }
}
