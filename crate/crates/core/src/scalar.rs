//! Scalar backends.
//!
//! Every algebraic routine in the crate is generic over [`Scalar`]. Two
//! implementations are provided: [`Rational`] (arbitrary-precision, exact,
//! the default for verification) and `f64` (fast, compared with a relative
//! tolerance, used for sampling and randomized stress tests).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default relative tolerance of the float backend.
pub const DEFAULT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True for backends whose equality is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// `n / d`; panics if `d == 0`.
    fn from_ratio(n: i64, d: i64) -> Self;

    /// Conversion from a float. The rational backend converts the binary
    /// value exactly.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Zero test. Exact backends ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Equality test. Float compares `|a-b| <= tol * max(1, |a|, |b|)`;
    /// exact backends ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Square root, when it exists in the backend (perfect squares only for
    /// rationals, non-negative inputs for floats).
    fn sqrt_checked(&self) -> Option<Self>;

    /// Parses `"p/q"`, integers, and decimals such as `"-0.75"` or `"1e-3"`.
    fn parse_scalar(s: &str) -> Result<Self>;

    /// String form used in JSON files and reports.
    fn to_repr(&self) -> String;

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_repr(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        n as f64 / d as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(f64::abs(*self)).max(f64::abs(*other));
        f64::abs(self - other) <= tol * scale
    }

    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n = f64::from_str(n.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            let d = f64::from_str(d.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            if d == 0.0 {
                return Err(Error::Parse(format!("{t:?}: zero denominator")));
            }
            return Ok(n / d);
        }
        f64::from_str(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    }

    fn to_repr(&self) -> String {
        format!("{self:?}")
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = |why: &str| Error::Parse(format!("{t:?}: {why}"));
    if t.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad("bad numerator"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e = t[pos + 1..].parse::<i32>().map_err(|_| bad("bad exponent"))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a number"));
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad("not a number"))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(if sign < 0 { -value } else { value })
}

/// Largest `|x|` over a slice, as f64.
pub fn max_abs<S: Scalar>(values: &[S]) -> f64 {
    values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(Rational::parse_scalar("3/4").unwrap(), q(3, 4));
        assert_eq!(Rational::parse_scalar("-6/8").unwrap(), q(-3, 4));
        assert_eq!(Rational::parse_scalar("0.75").unwrap(), q(3, 4));
        assert_eq!(Rational::parse_scalar("-1.5e2").unwrap(), q(-150, 1));
        assert_eq!(Rational::parse_scalar("25e-2").unwrap(), q(1, 4));
        assert_eq!(Rational::parse_scalar(" 7 ").unwrap(), q(7, 1));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
        assert!(Rational::parse_scalar("").is_err());
    }

    #[test]
    fn repr_round_trips() {
        for v in [q(0, 1), q(-5, 3), q(12, 1)] {
            assert_eq!(Rational::parse_scalar(&v.to_repr()).unwrap(), v);
        }
        assert_eq!(q(-5, 3).to_repr(), "-5/3");
        assert_eq!(q(4, 2).to_repr(), "2");
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::parse_scalar(&x.to_repr()).unwrap(), x);
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1e6f64.approx_eq(&(1e6 + 1e-4), 1e-9));
        assert!(!1.0f64.approx_eq(&1.001, 1e-9));
        assert!(1e-12f64.is_negligible(1e-9));
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(q(9, 4).sqrt_checked(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_checked(), None);
        assert_eq!(q(-1, 1).sqrt_checked(), None);
    }
}
