//! Extended rationals: exact fractions plus the two infinities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

/// Shorthand for building a finite rational from machine integers.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("indeterminate form {0}")]
    Indeterminate(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected a finite value, got {0}")]
    NotFinite(String),
}

/// A rational number extended by `-inf` and `+inf`.
///
/// Indeterminate forms (`inf - inf`, `0 * inf`, `inf / inf`) are reported as
/// errors. The conventions `1/inf = 0` and `1/0 = inf` are only applied by
/// [`ExtRat::recip`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRat {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtRat::Finite(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        ExtRat::Finite(Rational::from_integer(BigInt::from(n)))
    }

    /// `num/den` in lowest terms. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        ExtRat::Finite(rat(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRat::Finite(q) if q.is_zero())
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtRat::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn finite(&self) -> Result<&Rational, ArithError> {
        self.as_finite()
            .ok_or_else(|| ArithError::NotFinite(self.to_string()))
    }

    pub fn into_finite(self) -> Result<Rational, ArithError> {
        match self {
            ExtRat::Finite(q) => Ok(q),
            other => Err(ArithError::NotFinite(other.to_string())),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self {
            ExtRat::NegInf => -1,
            ExtRat::PosInf => 1,
            ExtRat::Finite(q) => {
                if q.is_zero() {
                    0
                } else if q.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    fn infinity_with_sign(sign: i8) -> Self {
        if sign < 0 {
            ExtRat::NegInf
        } else {
            ExtRat::PosInf
        }
    }

    pub fn checked_add(&self, other: &ExtRat) -> Result<ExtRat, ArithError> {
        use ExtRat::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(ArithError::Indeterminate("inf - inf")),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(&self, other: &ExtRat) -> Result<ExtRat, ArithError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &ExtRat) -> Result<ExtRat, ArithError> {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => Ok(ExtRat::Finite(a * b)),
            _ => {
                let sign = self.signum() * other.signum();
                if sign == 0 {
                    Err(ArithError::Indeterminate("0 * inf"))
                } else {
                    Ok(Self::infinity_with_sign(sign))
                }
            }
        }
    }

    /// Division without the `1/0` convention: dividing by zero is an error.
    pub fn checked_div(&self, other: &ExtRat) -> Result<ExtRat, ArithError> {
        match (self, other) {
            (_, ExtRat::Finite(b)) if b.is_zero() => Err(ArithError::DivisionByZero),
            (ExtRat::Finite(a), ExtRat::Finite(b)) => Ok(ExtRat::Finite(a / b)),
            (ExtRat::Finite(_), _) => Ok(ExtRat::zero()),
            (_, ExtRat::Finite(b)) => {
                let sign = self.signum() * if b.is_positive() { 1 } else { -1 };
                Ok(Self::infinity_with_sign(sign))
            }
            _ => Err(ArithError::Indeterminate("inf / inf")),
        }
    }

    /// Reciprocal with the conventions `1/inf = 0` and `1/0 = inf`.
    ///
    /// Used to move between an integrability parameter `p` and the diagram
    /// abscissa `1/p`, where only non-negative values occur.
    pub fn recip(&self) -> ExtRat {
        match self {
            ExtRat::Finite(q) if q.is_zero() => ExtRat::PosInf,
            ExtRat::Finite(q) => ExtRat::Finite(q.recip()),
            _ => ExtRat::zero(),
        }
    }

    pub fn min(self, other: ExtRat) -> ExtRat {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: ExtRat) -> ExtRat {
        std::cmp::max(self, other)
    }

    /// Nearest `f64`, with infinities mapped to the float infinities.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRat::NegInf => f64::NEG_INFINITY,
            ExtRat::PosInf => f64::INFINITY,
            ExtRat::Finite(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Decimal rendering with six significant digits, for human readers only.
    pub fn to_decimal_string(&self) -> String {
        match self {
            ExtRat::Finite(_) => format_significant(self.to_f64(), 6),
            other => other.to_string(),
        }
    }
}

fn format_significant(v: f64, digits: i32) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRat::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
        }
    }
}

impl std::ops::Neg for &ExtRat {
    type Output = ExtRat;
    fn neg(self) -> ExtRat {
        match self {
            ExtRat::NegInf => ExtRat::PosInf,
            ExtRat::PosInf => ExtRat::NegInf,
            ExtRat::Finite(q) => ExtRat::Finite(-q),
        }
    }
}

impl std::ops::Neg for ExtRat {
    type Output = ExtRat;
    fn neg(self) -> ExtRat {
        -&self
    }
}

impl From<Rational> for ExtRat {
    fn from(q: Rational) -> Self {
        ExtRat::Finite(q)
    }
}

impl From<&Rational> for ExtRat {
    fn from(q: &Rational) -> Self {
        ExtRat::Finite(q.clone())
    }
}

impl From<i64> for ExtRat {
    fn from(n: i64) -> Self {
        ExtRat::int(n)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => f.write_str("-inf"),
            ExtRat::PosInf => f.write_str("inf"),
            ExtRat::Finite(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Malformed rational literal. `position` is the byte offset of the first
/// offending character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational {input:?} at position {position}: {message}")]
pub struct ParseRationalError {
    pub input: String,
    pub position: usize,
    pub message: &'static str,
}

fn parse_integer(s: &str, offset: usize, full: &str) -> Result<BigInt, ParseRationalError> {
    let err = |position, message| ParseRationalError {
        input: full.to_string(),
        position,
        message,
    };
    let digits_start = usize::from(s.starts_with(['+', '-']));
    if s.len() == digits_start {
        return Err(err(offset + s.len(), "expected digits"));
    }
    if let Some((i, _)) = s[digits_start..]
        .char_indices()
        .find(|(_, c)| !c.is_ascii_digit())
    {
        return Err(err(offset + digits_start + i, "unexpected character"));
    }
    s.parse::<BigInt>()
        .map_err(|_| err(offset, "not an integer"))
}

impl FromStr for ExtRat {
    type Err = ParseRationalError;

    /// Accepts `inf`, `+inf`, `-inf`, integer literals and `a/b` fractions.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s = input.trim();
        let lead = input.len() - input.trim_start().len();
        match s {
            "inf" | "+inf" => return Ok(ExtRat::PosInf),
            "-inf" => return Ok(ExtRat::NegInf),
            _ => {}
        }
        match s.split_once('/') {
            None => Ok(ExtRat::Finite(Rational::from_integer(parse_integer(
                s, lead, input,
            )?))),
            Some((num, den)) => {
                let n = parse_integer(num, lead, input)?;
                let den_offset = lead + num.len() + 1;
                if den.starts_with(['+', '-']) {
                    return Err(ParseRationalError {
                        input: input.to_string(),
                        position: den_offset,
                        message: "denominator must be unsigned",
                    });
                }
                let d = parse_integer(den, den_offset, input)?;
                if d.is_zero() {
                    return Err(ParseRationalError {
                        input: input.to_string(),
                        position: den_offset,
                        message: "zero denominator",
                    });
                }
                Ok(ExtRat::Finite(Rational::new(n, d)))
            }
        }
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(ExtRat::int(n)),
        }
    }
}
