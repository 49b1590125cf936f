//! Exact scalars.
//!
//! [`Rational`] is a reduced big-integer fraction with a positive denominator,
//! so structural equality is numeric equality. [`ExtendedRational`] adds the two
//! infinities needed for optimal values and conjugates; forming `∞ − ∞` is an
//! error rather than a silent NaN-like value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// Canonical `"p/q"` rendering; integers keep the `/1`.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Number of bits in numerator plus denominator. Used as a pivot-size heuristic.
pub fn bit_size(value: &Rational) -> u64 {
    value.numer().bits() + value.denom().bits()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtendedRational {
    pub fn zero() -> Self {
        ExtendedRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        use ExtendedRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => {
                Err(Error::InfinityMinusInfinity)
            }
            (PosInfinity, _) | (_, PosInfinity) => Ok(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Ok(NegInfinity),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        use ExtendedRational::*;
        match self {
            NegInfinity => PosInfinity,
            PosInfinity => NegInfinity,
            Finite(v) => Finite(-v),
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(value: Rational) -> Self {
        ExtendedRational::Finite(value)
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (PosInfinity, _) | (_, NegInfinity) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInfinity => f.write_str("-inf"),
            ExtendedRational::PosInfinity => f.write_str("+inf"),
            ExtendedRational::Finite(v) => f.write_str(&format_rational(v)),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtendedRational::PosInfinity),
            "-inf" => Ok(ExtendedRational::NegInfinity),
            other => parse_rational(other).map(ExtendedRational::Finite),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(format_rational(&int(0)), "0/1");
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn zero_is_canonical() {
        let z = ratio(0, -7);
        assert_eq!(z.numer(), &BigInt::zero());
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn extended_arithmetic() {
        use ExtendedRational::*;
        let two = Finite(int(2));
        assert_eq!(two.checked_add(&PosInfinity).unwrap(), PosInfinity);
        assert_eq!(NegInfinity.checked_add(&two).unwrap(), NegInfinity);
        assert!(PosInfinity.checked_add(&NegInfinity).is_err());
        assert!(PosInfinity.checked_sub(&PosInfinity).is_err());
        assert!(NegInfinity < two && two < PosInfinity);
        assert_eq!("+inf".parse::<ExtendedRational>().unwrap(), PosInfinity);
        assert_eq!(Finite(ratio(-1, 3)).to_string(), "-1/3");
    }

    proptest! {
        #[test]
        fn field_round_trips(an in -1000i64..1000, ad in 1i64..200, bn in -1000i64..1000, bd in 1i64..200) {
            let a = ratio(an, ad);
            let b = ratio(bn, bd);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                let back = (&a * &b) / &b;
                prop_assert_eq!(back.denom().sign(), num_bigint::Sign::Plus);
                prop_assert_eq!(back, a.clone());
            }
            prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
        }
    }
}
