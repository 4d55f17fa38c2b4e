//! Numeric scalars: IEEE floats with a comparison tolerance, or exact rationals.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute comparison tolerance used for float inputs.
pub const TAU: f64 = 1e-9;

/// Exact rational number.
pub type Rational = BigRational;

/// A length or ratio type the metric and cover machinery can run over.
///
/// Floats compare with the global tolerance [`TAU`] (scaled by magnitude);
/// rationals compare exactly.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// `true` when arithmetic on this type is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Exact conversion from a float for rationals, identity for floats.
    /// `None` for non-finite input.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// `self <= other`, up to tolerance for inexact types.
    fn le_tol(&self, other: &Self) -> bool;

    /// `self == other`, up to tolerance for inexact types.
    fn eq_tol(&self, other: &Self) -> bool {
        self.le_tol(other) && other.le_tol(self)
    }

    /// `self < other` beyond tolerance.
    fn lt_strict(&self, other: &Self) -> bool {
        !other.le_tol(self)
    }

    /// `p/q` for rationals, shortest round-trip decimal for floats.
    fn to_exact_string(&self) -> String;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

fn float_scale(a: f64, b: f64) -> f64 {
    1.0f64.max(a.abs()).max(b.abs())
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn le_tol(&self, other: &Self) -> bool {
        *self <= *other + TAU * float_scale(*self, *other)
    }

    fn to_exact_string(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        // Numerator and denominator may exceed f64 range individually.
        self.to_f64_lossy()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }

    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for Rational {
    fn to_f64_lossy(&self) -> f64 {
        if let (Some(n), Some(d)) = (self.numer().to_f64(), self.denom().to_f64()) {
            if n.is_finite() && d.is_finite() && d != 0.0 {
                return n / d;
            }
        }
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Error parsing an exact number literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as an exact number")]
pub struct ParseExactError(pub String);

/// Parses `p/q`, integers and decimal literals (with optional exponent) exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseExactError> {
    let t = text.trim();
    let err = || ParseExactError(text.to_string());
    if t.contains('/') {
        return Rational::from_str(t).map_err(|_| err());
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// A length that may be `+infinity` (distance to an empty set).
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `value <= self` up to tolerance; everything is below `+infinity`.
    pub fn at_least(&self, value: &S) -> bool {
        match self {
            Extended::Finite(v) => value.le_tol(v),
            Extended::Infinite => true,
        }
    }

    /// Positive in the strict sense (`> 0` exactly, `+infinity` counts).
    pub fn is_positive(&self) -> bool {
        match self {
            Extended::Finite(v) => *v > S::zero(),
            Extended::Infinite => true,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<S: Scalar> Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{}", v.to_exact_string()),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational::from_ratio(3, 4));
        assert_eq!(parse_rational("0.1").unwrap(), Rational::from_ratio(1, 10));
        assert_eq!(parse_rational("-2.5e1").unwrap(), Rational::from_i64(-25));
        assert_eq!(parse_rational("12").unwrap(), Rational::from_i64(12));
        assert_eq!(parse_rational("1.5E-2").unwrap(), Rational::from_ratio(3, 200));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn float_tolerance_is_relative_above_one() {
        assert!(1.0f64.le_tol(&(1.0 - 1e-12)));
        assert!(!1.0f64.le_tol(&(1.0 - 1e-6)));
        assert!(1e6f64.le_tol(&(1e6 - 1e-4)));
        assert!(Rational::from_ratio(1, 3).le_tol(&Rational::from_ratio(1, 3)));
        assert!(!Rational::from_ratio(1, 3).le_tol(&Rational::from_ratio(1, 4)));
    }

    #[test]
    fn extended_orders_infinity_last() {
        let a: Extended<f64> = Extended::Finite(3.0);
        assert!(a < Extended::Infinite);
        assert!(Extended::<f64>::Infinite.at_least(&1e300));
        assert_eq!(a.clone().min(Extended::Infinite), a);
        assert_eq!(Extended::Finite(Rational::from_ratio(2, 4)).to_string(), "1/2");
    }
}
