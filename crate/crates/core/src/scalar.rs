//! Number types used by every computation in the crate.
//!
//! All algorithms are generic over [`Scalar`]. Two implementations ship:
//! [`Rational`], an exact fraction over `i128` whose arithmetic panics on
//! overflow instead of wrapping, and `f64`, whose comparisons accept an
//! absolute/relative slack of [`FLOAT_TOL`].

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

/// Comparison slack used by the `f64` implementation of [`Scalar`].
pub const FLOAT_TOL: f64 = 1e-9;

/// Ordered field operations plus tolerance-aware comparisons.
///
/// For exact types `approx_eq`/`approx_le` coincide with `==`/`<=`.
pub trait Scalar:
    Copy
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic and comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_rational(r: Rational) -> Self;
    fn to_f64(self) -> f64;

    fn approx_eq(self, other: Self) -> bool;
    fn approx_le(self, other: Self) -> bool;

    /// True when the value is indistinguishable from zero.
    fn is_negligible(self) -> bool {
        self.approx_eq(Self::zero())
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Positive part, `max(self, 0)`.
    fn pos(self) -> Self {
        self.max(Self::zero())
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

/// Exact rational number.
///
/// Backed by a reduced `Ratio<i128>`. Every arithmetic operation is checked;
/// an overflow panics with `"rational overflow"` rather than producing a
/// silently wrong value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer / denom`, reduced. Returns `None` for a zero denominator.
    pub fn new(numer: i128, denom: i128) -> Option<Self> {
        if denom == 0 {
            None
        } else {
            Some(Rational(Ratio::new(numer, denom)))
        }
    }

    pub fn from_integer(v: i128) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(self) -> Self {
        assert!(!self.0.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Failure to parse a rational literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    Empty,
    InvalidInteger,
    ZeroDenominator,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Empty => f.write_str("empty rational literal"),
            ParseRationalError::InvalidInteger => f.write_str("invalid integer in rational literal"),
            ParseRationalError::ZeroDenominator => f.write_str("zero denominator"),
        }
    }
}

impl core::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"p/q"` and plain integers `"p"`; surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let parse = |t: &str| t.trim().parse::<i128>().map_err(|_| ParseRationalError::InvalidInteger);
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse(s)?)),
            Some((p, q)) => {
                let (p, q) = (parse(p)?, parse(q)?);
                Rational::new(p, q).ok_or(ParseRationalError::ZeroDenominator)
            }
        }
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$checked(&rhs.0).expect("rational overflow"))
            }
        }
    };
}

checked_binop!(Add, add, checked_add);
checked_binop!(Sub, sub, checked_sub);
checked_binop!(Mul, mul, checked_mul);

impl Div for Rational {
    type Output = Rational;
    #[inline]
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.0.is_zero(), "division by zero");
        Rational(self.0.checked_div(&rhs.0).expect("rational overflow"))
    }
}

impl Neg for Rational {
    type Output = Rational;
    #[inline]
    fn neg(self) -> Rational {
        let n = self.numer().checked_neg().expect("rational overflow");
        Rational(Ratio::new_raw(n, self.denom()))
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v as i128)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational::ZERO
    }
    fn one() -> Self {
        Rational::ONE
    }
    fn from_int(v: i64) -> Self {
        Rational::from(v)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
    fn approx_eq(self, other: Self) -> bool {
        self == other
    }
    fn approx_le(self, other: Self) -> bool {
        self <= other
    }
    fn is_negligible(self) -> bool {
        self.0.is_zero()
    }
    fn max(self, other: Self) -> Self {
        Ord::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        Ord::min(self, other)
    }
    fn abs(self) -> Self {
        Rational(self.0.abs())
    }
}

fn float_scale(a: f64, b: f64) -> f64 {
    let m = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    if m > 1.0 {
        m
    } else {
        1.0
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: Rational) -> Self {
        r.to_f64()
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= FLOAT_TOL * float_scale(self, other)
    }
    fn approx_le(self, other: Self) -> bool {
        self <= other + FLOAT_TOL * float_scale(self, other)
    }
}

/// Exact comparison helper for sorting slices of scalars.
pub(crate) fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(r("6/4").to_string(), "3/2");
        assert_eq!(r("-3").to_string(), "-3");
        assert_eq!(r(" 4/2 ").to_string(), "2");
        assert_eq!(r("1/-2").to_string(), "-1/2");
        assert_eq!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator));
        assert_eq!("x".parse::<Rational>(), Err(ParseRationalError::InvalidInteger));
        assert_eq!("".parse::<Rational>(), Err(ParseRationalError::Empty));
    }

    #[test]
    fn exact_arithmetic() {
        assert_eq!(r("1/3") + r("1/6"), r("1/2"));
        assert_eq!(r("1/3") - r("1/2"), r("-1/6"));
        assert_eq!(r("2/3") * r("3/4"), r("1/2"));
        assert_eq!(r("2/3") / r("4/3"), r("1/2"));
        assert_eq!(-r("1/2"), r("-1/2"));
        assert_eq!(r("-5/2").pos(), Rational::ZERO);
        assert_eq!(Scalar::max(r("1/2"), r("2/3")), r("2/3"));
    }

    #[test]
    #[should_panic(expected = "rational overflow")]
    fn overflow_panics() {
        let big = Rational::from_integer(i128::MAX / 2 + 1);
        let _ = big + big;
    }

    #[test]
    fn float_tolerance() {
        assert!(1.0f64.approx_eq(1.0 + 1e-12));
        assert!(!1.0f64.approx_eq(1.0 + 1e-6));
        assert!((1.0 + 1e-12f64).approx_le(1.0));
        assert!(!(1.0 + 1e-6f64).approx_le(1.0));
    }
}
