//! Exact exponents, extended valuation values and Gauss parameters.
//!
//! Everything here is an arbitrary-precision rational. Gauss radii are kept in
//! additive form `s = -log(rho)`, so norms never have to be materialized.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(String),
    #[error("gauss parameter must be nonnegative, got {0}")]
    NegativeGaussParam(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
}

/// Prints a rational as `num/den`, or `num` when the denominator is one.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `serialize_with` helper writing a rational as its `num/den` string.
pub fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<BigRational, ValueError> {
    let text = text.trim();
    let bad = || ValueError::Malformed(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Converts an exact rational to the nearest `f64` (with overflow falling back to
/// a split numerator/denominator conversion).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Decimal expansion of `q` with `digits` fractional digits, truncated toward zero.
/// Uses integer long division only.
pub fn rational_to_decimal(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let abs = q.abs();
    let (int, mut rem) = abs.numer().div_rem(abs.denom());
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if !rem.is_zero() && digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        let mut frac = String::new();
        for _ in 0..digits {
            rem *= &ten;
            let (d, r) = rem.div_rem(abs.denom());
            frac.push_str(&d.to_string());
            rem = r;
            if rem.is_zero() {
                break;
            }
        }
        out.push_str(&frac);
    }
    out
}

/// A nonnegative rational exponent, an element of the positive cone of the value group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn new(q: BigRational) -> Result<Self, ValueError> {
        if q.is_negative() {
            Err(ValueError::NegativeExponent(fmt_rational(&q)))
        } else {
            Ok(Exponent(q))
        }
    }

    pub fn zero() -> Self {
        Exponent(BigRational::zero())
    }

    pub fn integer(n: u64) -> Self {
        Exponent(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator or a negative ratio.
    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::new(BigRational::new(num.into(), den.into())).expect("nonnegative ratio")
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Integer part.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Representative of the coset `self + Z` in `[0, 1)`.
    pub fn fract(&self) -> Exponent {
        Exponent(self.0.fract())
    }

    /// `self - other` if it stays nonnegative.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        let d = &self.0 - &other.0;
        (!d.is_negative()).then_some(Exponent(d))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl FromStr for Exponent {
    type Err = ValueError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Exponent::new(parse_rational(s)?)
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 + &rhs.0)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Extended value: a rational or `+inf`. This is the carrier of the tropical
/// semiring, with `min` as addition and `+` as multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(BigRational),
    Infinite,
}

impl Value {
    pub fn zero() -> Self {
        Value::Finite(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Finite(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Value::Finite(BigRational::new(num.into(), den.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinite)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Value::Finite(q) => Some(q),
            Value::Infinite => None,
        }
    }

    /// Tropical addition.
    pub fn min_with(&self, other: &Value) -> Value {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Finite(q) => rational_to_f64(q),
            Value::Infinite => f64::INFINITY,
        }
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Finite(q)
    }
}

impl From<&Exponent> for Value {
    fn from(e: &Exponent) -> Self {
        Value::Finite(e.0.clone())
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::Infinite) => Ordering::Less,
            (Value::Infinite, Value::Finite(_)) => Ordering::Greater,
            (Value::Infinite, Value::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Infinite,
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        &self + &rhs
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(q) => f.write_str(&fmt_rational(q)),
            Value::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Value {
    type Err = ValueError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(Value::Infinite),
            t => Ok(Value::Finite(parse_rational(t)?)),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Gauss parameter `s = -log(rho)` in additive form.
///
/// `s = 0` (radius one) is accepted; everything else about the family is
/// continuous there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussParam(BigRational);

impl GaussParam {
    pub fn new(s: BigRational) -> Result<Self, ValueError> {
        if s.is_negative() {
            Err(ValueError::NegativeGaussParam(fmt_rational(&s)))
        } else {
            Ok(GaussParam(s))
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussParam::new(BigRational::new(num.into(), den.into())).expect("nonnegative ratio")
    }

    pub fn integer(n: u64) -> Self {
        GaussParam(BigRational::from_integer(n.into()))
    }

    /// `2^-k`.
    pub fn dyadic(k: u32) -> Self {
        GaussParam(BigRational::new(BigInt::one(), BigInt::one() << (k as usize)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// `s * e`.
    pub fn scale(&self, e: &Exponent) -> BigRational {
        &self.0 * e.as_rational()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for GaussParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl FromStr for GaussParam {
    type Err = ValueError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GaussParam::new(parse_rational(s)?)
    }
}

impl Serialize for GaussParam {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Mul<&Exponent> for &GaussParam {
    type Output = BigRational;
    fn mul(self, rhs: &Exponent) -> BigRational {
        self.scale(rhs)
    }
}

/// Precision frontier of a truncated series: terms at or beyond it are unknown.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Precision {
    Finite(Exponent),
    Infinite,
}

impl Precision {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Precision::Infinite)
    }

    pub fn admits(&self, e: &Exponent) -> bool {
        match self {
            Precision::Finite(p) => e < p,
            Precision::Infinite => true,
        }
    }

    pub fn min_with(&self, other: &Precision) -> Precision {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Shift by a (possibly infinite) order.
    pub fn shifted(&self, by: &Precision) -> Precision {
        match (self, by) {
            (Precision::Finite(a), Precision::Finite(b)) => Precision::Finite(a + b),
            _ => Precision::Infinite,
        }
    }

    pub fn as_value(&self) -> Value {
        match self {
            Precision::Finite(e) => Value::from(e),
            Precision::Infinite => Value::Infinite,
        }
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_value().cmp(&other.as_value())
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(e) => write!(f, "{e}"),
            Precision::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let a = Value::ratio(3, 2);
        assert_eq!(&a + &Value::Infinite, Value::Infinite);
        assert!(a < Value::Infinite);
        assert_eq!(a.min_with(&Value::Infinite), a);
    }

    #[test]
    fn exponent_rejects_negative() {
        assert!("-1/2".parse::<Exponent>().is_err());
        assert_eq!("6/4".parse::<Exponent>().unwrap(), Exponent::ratio(3, 2));
    }

    #[test]
    fn coset_split() {
        let e = Exponent::ratio(7, 3);
        assert_eq!(e.floor(), BigInt::from(2));
        assert_eq!(e.fract(), Exponent::ratio(1, 3));
    }

    #[test]
    fn decimal_expansion_is_exact_truncation() {
        let q = BigRational::new(1.into(), 3.into());
        assert_eq!(rational_to_decimal(&q, 5), "0.33333");
        assert_eq!(rational_to_decimal(&BigRational::new(5.into(), 2.into()), 5), "2.5");
        assert_eq!(rational_to_decimal(&BigRational::from_integer(2.into()), 5), "2");
    }

    #[test]
    fn precision_order() {
        let a = Precision::Finite(Exponent::integer(2));
        assert!(a < Precision::Infinite);
        assert!(a.admits(&Exponent::ratio(3, 2)));
        assert!(!a.admits(&Exponent::integer(2)));
    }
}
