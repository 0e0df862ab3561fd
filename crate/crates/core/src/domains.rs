//! Coefficient domains and their valuations.
//!
//! A coefficient is always stored as a finite polynomial `sum c_e x^e` with
//! integer `c_e` and nonnegative rational `e`. The domain decides how the
//! integers are read:
//!
//! * `PerfectPoly`: `F_p[x^{1/p^inf}]` (or Puiseux-style arbitrary denominators),
//!   integers reduced into `[1, p-1]`;
//! * `PadicDigits`: a single integer (the `x^0` slot), read modulo `p^N`;
//! * `MixedPoly`: `W(F_p)[x^{1/p^inf}]` truncated modulo `p^N`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::value::{Exponent, GaussParam, Value};

/// Default `N` in the precision modulus `p^N`.
pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("precision N must be at least 1")]
    ZeroPrecision,
    #[error("exponent {exponent} has a denominator that is not a power of {p}")]
    Denominator { exponent: String, p: u32 },
    #[error("p-adic digit coefficients cannot involve x (found x^{0})")]
    UnexpectedMonomial(String),
    #[error("coefficient {0} is malformed for this domain")]
    Malformed(String),
}

/// Finite polynomial in `x` with rational exponents and integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<Exponent, BigInt>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn constant(n: impl Into<BigInt>) -> Self {
        Coefficient::monomial(n, Exponent::zero())
    }

    pub fn one() -> Self {
        Coefficient::constant(1)
    }

    pub fn monomial(c: impl Into<BigInt>, e: Exponent) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Coefficient { terms }
    }

    /// `x^e`.
    pub fn x_pow(e: Exponent) -> Self {
        Coefficient::monomial(1, e)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, BigInt)>) -> Self {
        let mut c = Coefficient::zero();
        for (e, v) in terms {
            c.add_monomial(e, v);
        }
        c
    }

    pub fn add_monomial(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, e: &Exponent) -> Option<&BigInt> {
        self.terms.get(e)
    }

    /// Constant term (the only slot used by p-adic digits).
    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Exponent::zero()).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exponent(&self) -> Option<&Exponent> {
        self.terms.keys().next()
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&BigInt) -> BigInt) -> Self {
        Coefficient::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        self.map_coefficients(|c| c * k)
    }

    /// Shift every exponent by `e` (multiplication by `x^e`).
    pub fn shift(&self, e: &Exponent) -> Self {
        Coefficient { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_monomial(e.clone(), c.clone());
        }
        out
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Coefficient { terms: acc }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        self.map_coefficients(|c| -c)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let x = if e.is_zero() {
                String::new()
            } else if *e == Exponent::integer(1) {
                "x".to_string()
            } else {
                format!("x^{{{e}}}")
            };
            match (x.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => f.write_str(&x)?,
                (false, false) => write!(f, "{c}*{x}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Which exponent denominators the coefficient ring admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Denominators {
    /// `x^{1/p^inf}`: denominators are powers of `p`.
    PPowers,
    /// `x^{1/N}`: any denominator (Puiseux instance).
    Arbitrary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum CoefficientDomain {
    PerfectPoly { p: u32, denominators: Denominators },
    PadicDigits { p: u32, precision: u32 },
    MixedPoly { p: u32, precision: u32, denominators: Denominators },
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<(), DomainError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(DomainError::NotPrime(p))
    }
}

/// `ord_p(n)` for nonzero `n`.
pub fn ord_p(n: &BigInt, p: u32) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

fn is_p_power(mut d: BigInt, p: u32) -> bool {
    let p = BigInt::from(p);
    while d > BigInt::one() {
        let (q, r) = d.div_rem(&p);
        if !r.is_zero() {
            return false;
        }
        d = q;
    }
    true
}

impl CoefficientDomain {
    /// `F_p[x^{1/p^inf}]`.
    pub fn perfect(p: u32) -> Result<Self, DomainError> {
        check_prime(p)?;
        Ok(CoefficientDomain::PerfectPoly { p, denominators: Denominators::PPowers })
    }

    /// `F_p[x^{1/N}]`, the Puiseux variant.
    pub fn puiseux(p: u32) -> Result<Self, DomainError> {
        check_prime(p)?;
        Ok(CoefficientDomain::PerfectPoly { p, denominators: Denominators::Arbitrary })
    }

    pub fn padic(p: u32, precision: u32) -> Result<Self, DomainError> {
        check_prime(p)?;
        if precision == 0 {
            return Err(DomainError::ZeroPrecision);
        }
        Ok(CoefficientDomain::PadicDigits { p, precision })
    }

    pub fn mixed(p: u32, precision: u32) -> Result<Self, DomainError> {
        Self::mixed_with(p, precision, Denominators::PPowers)
    }

    pub fn mixed_with(p: u32, precision: u32, denominators: Denominators) -> Result<Self, DomainError> {
        check_prime(p)?;
        if precision == 0 {
            return Err(DomainError::ZeroPrecision);
        }
        Ok(CoefficientDomain::MixedPoly { p, precision, denominators })
    }

    pub fn p(&self) -> u32 {
        match *self {
            CoefficientDomain::PerfectPoly { p, .. }
            | CoefficientDomain::PadicDigits { p, .. }
            | CoefficientDomain::MixedPoly { p, .. } => p,
        }
    }

    /// `N` for the digit domains, `None` in characteristic `p`.
    pub fn precision(&self) -> Option<u32> {
        match *self {
            CoefficientDomain::PerfectPoly { .. } => None,
            CoefficientDomain::PadicDigits { precision, .. } | CoefficientDomain::MixedPoly { precision, .. } => {
                Some(precision)
            }
        }
    }

    /// `p^N` for the digit domains.
    pub fn modulus(&self) -> Option<BigInt> {
        self.precision().map(|n| BigInt::from(self.p()).pow(n))
    }

    pub fn denominators(&self) -> Denominators {
        match *self {
            CoefficientDomain::PerfectPoly { denominators, .. } | CoefficientDomain::MixedPoly { denominators, .. } => {
                denominators
            }
            CoefficientDomain::PadicDigits { .. } => Denominators::PPowers,
        }
    }

    /// True for the characteristic-0 digit domains.
    pub fn is_arithmetic(&self) -> bool {
        !matches!(self, CoefficientDomain::PerfectPoly { .. })
    }

    /// Residue ring `V/p` as a `PerfectPoly` domain.
    pub fn residue_domain(&self) -> CoefficientDomain {
        CoefficientDomain::PerfectPoly { p: self.p(), denominators: self.denominators() }
    }

    pub fn name(&self) -> String {
        match self {
            CoefficientDomain::PerfectPoly { p, denominators: Denominators::PPowers } => {
                format!("perfect(p={p})")
            }
            CoefficientDomain::PerfectPoly { p, denominators: Denominators::Arbitrary } => {
                format!("puiseux(p={p})")
            }
            CoefficientDomain::PadicDigits { p, precision } => format!("padic(p={p}, N={precision})"),
            CoefficientDomain::MixedPoly { p, precision, .. } => format!("mixed(p={p}, N={precision})"),
        }
    }

    /// Checks exponent shape; does not require the coefficient to be reduced.
    pub fn validate(&self, a: &Coefficient) -> Result<(), DomainError> {
        if let CoefficientDomain::PadicDigits { .. } = self {
            if let Some((e, _)) = a.terms().find(|(e, _)| !e.is_zero()) {
                return Err(DomainError::UnexpectedMonomial(e.to_string()));
            }
            return Ok(());
        }
        if self.denominators() == Denominators::PPowers {
            for (e, _) in a.terms() {
                if !is_p_power(e.as_rational().denom().clone(), self.p()) {
                    return Err(DomainError::Denominator { exponent: e.to_string(), p: self.p() });
                }
            }
        }
        Ok(())
    }

    /// Validates and, in characteristic `p`, reduces the integers into `[0, p-1]`.
    pub fn normalize(&self, a: &Coefficient) -> Result<Coefficient, DomainError> {
        self.validate(a)?;
        Ok(match self {
            CoefficientDomain::PerfectPoly { p, .. } => {
                let p = BigInt::from(*p);
                a.map_coefficients(|c| c.mod_floor(&p))
            }
            _ => a.clone(),
        })
    }

    /// x-adic valuation of the residue of `a` modulo `p`.
    ///
    /// `PadicDigits`: 0 when `p` does not divide `a`; `MixedPoly`: the least exponent
    /// whose coefficient is prime to `p`; zero residue gives `+inf`.
    pub fn coeff_valuation(&self, a: &Coefficient) -> Result<Value, DomainError> {
        self.validate(a)?;
        let p = BigInt::from(self.p());
        let v = a
            .terms()
            .filter(|(_, c)| !c.mod_floor(&p).is_zero())
            .map(|(e, _)| Value::from(e))
            .next()
            .unwrap_or(Value::Infinite);
        Ok(v)
    }

    /// Member of the base family at parameter `s`: `|p|` corresponds to `s`.
    ///
    /// `PadicDigits`: `s * ord_p(a)`; `MixedPoly`: `min_e (s * ord_p(c_e) + e)`;
    /// `PerfectPoly`: the x-adic valuation (the family is constant there).
    pub fn base_valuation_at(&self, a: &Coefficient, s: &GaussParam) -> Result<Value, DomainError> {
        match self {
            CoefficientDomain::PerfectPoly { .. } => self.coeff_valuation(a),
            CoefficientDomain::PadicDigits { p, .. } => {
                self.validate(a)?;
                let c = a.constant_term();
                if c.is_zero() {
                    return Ok(Value::Infinite);
                }
                let k = BigRational::from_integer(ord_p(&c, *p).into());
                Ok(Value::Finite(s.as_rational() * k))
            }
            CoefficientDomain::MixedPoly { p, .. } => {
                self.validate(a)?;
                Ok(a.terms()
                    .map(|(e, c)| {
                        let k = BigRational::from_integer(ord_p(c, *p).into());
                        Value::Finite(s.as_rational() * k + e.as_rational())
                    })
                    .min()
                    .unwrap_or(Value::Infinite))
            }
        }
    }

    /// Whether `a` is an admissible canonical digit (`p` does not divide it).
    pub fn is_canonical_digit(&self, a: &Coefficient) -> bool {
        if self.validate(a).is_err() || a.is_zero() {
            return false;
        }
        let p = BigInt::from(self.p());
        match self {
            CoefficientDomain::PerfectPoly { .. } => a.terms().all(|(_, c)| c.is_positive() && c < &p),
            CoefficientDomain::PadicDigits { .. } => {
                let c = a.constant_term();
                let m = self.modulus().expect("digit domain");
                c.is_positive() && c < m && !c.mod_floor(&p).is_zero()
            }
            CoefficientDomain::MixedPoly { .. } => {
                let m = self.modulus().expect("digit domain");
                a.terms().all(|(_, c)| !c.is_negative() && c < &m) && a.terms().any(|(_, c)| !c.mod_floor(&p).is_zero())
            }
        }
    }

    /// Image of `a` in the residue ring `F_p[x^{...}]`.
    pub fn reduce_mod_p(&self, a: &Coefficient) -> Coefficient {
        let p = BigInt::from(self.p());
        a.map_coefficients(|c| c.mod_floor(&p))
    }

    /// Ring product in this domain (reduced in characteristic `p`).
    pub fn mul(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        let prod = a * b;
        match self {
            CoefficientDomain::PerfectPoly { p, .. } => {
                let p = BigInt::from(*p);
                prod.map_coefficients(|c| c.mod_floor(&p))
            }
            _ => prod,
        }
    }

    /// Ring sum in this domain (reduced in characteristic `p`).
    pub fn add(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        let sum = a + b;
        match self {
            CoefficientDomain::PerfectPoly { p, .. } => {
                let p = BigInt::from(*p);
                sum.map_coefficients(|c| c.mod_floor(&p))
            }
            _ => sum,
        }
    }
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(num: i64, den: i64) -> Exponent {
        Exponent::ratio(num, den)
    }

    #[test]
    fn perfect_valuation_is_min_exponent() {
        let d = CoefficientDomain::perfect(3).unwrap();
        let a = Coefficient::from_terms([(x(4, 3), 1.into()), (x(2, 1), 2.into())]);
        assert_eq!(d.coeff_valuation(&a).unwrap(), Value::ratio(4, 3));
        assert_eq!(d.coeff_valuation(&Coefficient::zero()).unwrap(), Value::Infinite);
    }

    #[test]
    fn mixed_valuation_reduces_mod_p() {
        let d = CoefficientDomain::mixed(2, 4).unwrap();
        let a = Coefficient::from_terms([(x(1, 2), 2.into()), (x(1, 1), 1.into())]);
        assert_eq!(d.coeff_valuation(&a).unwrap(), Value::from_int(1));
        assert_eq!(d.base_valuation_at(&a, &GaussParam::integer(3)).unwrap(), Value::from_int(1));
        assert_eq!(d.reduce_mod_p(&a), Coefficient::x_pow(x(1, 1)));
    }

    #[test]
    fn padic_base_family() {
        let d = CoefficientDomain::padic(2, 32).unwrap();
        let twelve = Coefficient::constant(12);
        assert_eq!(d.base_valuation_at(&twelve, &GaussParam::ratio(1, 2)).unwrap(), Value::from_int(1));
        let d5 = CoefficientDomain::padic(5, 32).unwrap();
        for s in [GaussParam::ratio(1, 7), GaussParam::integer(9)] {
            assert_eq!(d5.base_valuation_at(&Coefficient::constant(3), &s).unwrap(), Value::zero());
        }
    }

    #[test]
    fn canonical_digit_tests() {
        let d = CoefficientDomain::padic(2, 32).unwrap();
        assert!(!d.is_canonical_digit(&Coefficient::constant(6)));
        assert!(d.is_canonical_digit(&Coefficient::constant(3)));
        let m = CoefficientDomain::mixed(3, 8).unwrap();
        let a = Coefficient::from_terms([(x(1, 1), 1.into()), (Exponent::zero(), 3.into())]);
        assert!(m.is_canonical_digit(&a));
    }

    #[test]
    fn denominators_checked() {
        let d = CoefficientDomain::perfect(2).unwrap();
        assert!(d.validate(&Coefficient::x_pow(x(1, 3))).is_err());
        assert!(CoefficientDomain::puiseux(2).unwrap().validate(&Coefficient::x_pow(x(1, 3))).is_ok());
        let pd = CoefficientDomain::padic(3, 4).unwrap();
        assert!(matches!(pd.validate(&Coefficient::x_pow(x(1, 1))), Err(DomainError::UnexpectedMonomial(_))));
    }

    #[test]
    fn rejects_non_prime() {
        assert_eq!(CoefficientDomain::perfect(4), Err(DomainError::NotPrime(4)));
        assert_eq!(CoefficientDomain::padic(3, 0), Err(DomainError::ZeroPrecision));
    }
}
