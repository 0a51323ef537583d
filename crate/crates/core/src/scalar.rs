//! Exact scalar types the algebra is generic over.
//!
//! Every quantity handled by this crate is an integer, a rational number or
//! an element of an imaginary quadratic field, so the scalar abstraction only
//! covers exact rational types. `Ratio<i64>` is fast and sufficient for the
//! small denominators met in practice; `BigRational` never overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// An exact ordered field of rationals.
pub trait Scalar:
    Clone + Debug + Display + Eq + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_frac(numer: i64, denom: i64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    /// Largest integer not exceeding `self`.
    fn floor_val(&self) -> Self;

    fn is_int(&self) -> bool;

    /// The value as an `i64`, if it is an integer that fits.
    fn to_int(&self) -> Option<i64>;

    /// The reduced denominator, if it fits in an `i64`.
    fn denom_int(&self) -> Option<i64>;

    /// Fractional part in `[0, 1)`.
    fn fract_val(&self) -> Self {
        self.clone() - self.floor_val()
    }
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Hash + Debug + Display + From<i64> + ToPrimitive + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from(n))
    }

    fn floor_val(&self) -> Self {
        self.floor()
    }

    fn is_int(&self) -> bool {
        self.is_integer()
    }

    fn to_int(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn denom_int(&self) -> Option<i64> {
        self.denom().to_i64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Rational64};

    fn exercise<Q: Scalar>() {
        let x = Q::from_frac(-7, 3);
        assert_eq!(x.floor_val(), Q::from_int(-3));
        assert_eq!(x.fract_val(), Q::from_frac(2, 3));
        assert!(!x.is_int());
        assert_eq!(x.denom_int(), Some(3));
        assert_eq!(Q::from_frac(6, 3).to_int(), Some(2));
        assert_eq!(x.to_int(), None);
    }

    #[test]
    fn both_rational_backends_agree() {
        exercise::<Rational>();
        exercise::<Rational64>();
    }
}
