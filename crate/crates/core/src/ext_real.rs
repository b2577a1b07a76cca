//! The extended real line `[-inf, +inf]`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real number or one of the two infinities.
///
/// Ordering is total. Arithmetic is only defined between finite values;
/// anything touching an infinity other than comparison, `min` and `max`
/// is an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> ExtendedReal<T> {
    /// Wraps a float. Float infinities map onto the symbols; NaN is rejected.
    pub fn new(v: T) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else if v == T::infinity() {
            Ok(Self::PosInf)
        } else if v == T::neg_infinity() {
            Ok(Self::NegInf)
        } else {
            Ok(Self::Finite(v))
        }
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Value as a float, with the infinities mapped to float infinities.
    pub fn to_float(&self) -> T {
        match *self {
            Self::NegInf => T::neg_infinity(),
            Self::Finite(v) => v,
            Self::PosInf => T::infinity(),
        }
    }

    fn binary(self, rhs: Self, op: impl FnOnce(T, T) -> T) -> Result<Self> {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::new(op(a, b)),
            _ => Err(Error::InfiniteArithmetic),
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.binary(rhs, |a, b| a + b)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.binary(rhs, |a, b| a - b)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.binary(rhs, |a, b| a * b)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        match rhs {
            Self::Finite(b) if b == T::zero() => {
                Err(Error::InvalidArgument("division of extended reals by zero".into()))
            }
            _ => self.binary(rhs, |a, b| a / b),
        }
    }

    pub fn checked_neg(self) -> Result<Self> {
        match self {
            Self::Finite(a) => Ok(Self::Finite(-a)),
            _ => Err(Error::InfiniteArithmetic),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Self::NegInf => 0,
            Self::Finite(_) => 1,
            Self::PosInf => 2,
        }
    }
}

impl<T: Scalar> From<T> for ExtendedReal<T> {
    /// Panics on NaN; use [`ExtendedReal::new`] for fallible conversion.
    fn from(v: T) -> Self {
        Self::new(v).expect("NaN is not an extended real")
    }
}

impl<T: Scalar> Eq for ExtendedReal<T> {}

impl<T: Scalar> PartialOrd for ExtendedReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for ExtendedReal<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            // NaN is unrepresentable, so partial_cmp is always Some.
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl<T: Scalar> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInf => f.write_str("-inf"),
            Self::Finite(v) => fmt::Display::fmt(v, f),
            Self::PosInf => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ExtendedReal<f64>;

    #[test]
    fn ordering_puts_infinities_at_the_ends() {
        let mut v = vec![E::PosInf, E::Finite(3.0), E::NegInf, E::Finite(-1e300)];
        v.sort();
        assert_eq!(v, vec![E::NegInf, E::Finite(-1e300), E::Finite(3.0), E::PosInf]);
        assert!(E::NegInf < E::Finite(f64::MIN));
        assert!(E::Finite(f64::MAX) < E::PosInf);
    }

    #[test]
    fn min_max_work_with_infinities() {
        assert_eq!(E::PosInf.min(E::Finite(2.0)), E::Finite(2.0));
        assert_eq!(E::NegInf.max(E::Finite(2.0)), E::Finite(2.0));
    }

    #[test]
    fn arithmetic_rejects_infinities() {
        assert_eq!(E::Finite(1.0).checked_add(E::Finite(2.0)), Ok(E::Finite(3.0)));
        assert_eq!(E::PosInf.checked_add(E::Finite(2.0)), Err(Error::InfiniteArithmetic));
        assert_eq!(E::Finite(1.0).checked_mul(E::NegInf), Err(Error::InfiniteArithmetic));
        assert!(E::Finite(1.0).checked_div(E::Finite(0.0)).is_err());
        assert_eq!(E::PosInf.checked_neg(), Err(Error::InfiniteArithmetic));
    }

    #[test]
    fn nan_is_rejected_and_float_infinities_map() {
        assert_eq!(E::new(f64::NAN), Err(Error::NotANumber));
        assert_eq!(E::new(f64::INFINITY), Ok(E::PosInf));
        assert_eq!(E::new(f64::NEG_INFINITY), Ok(E::NegInf));
        // overflow in finite arithmetic lands on the symbol
        assert_eq!(E::Finite(f64::MAX).checked_add(E::Finite(f64::MAX)), Ok(E::PosInf));
    }
}
