//! Truncated Mal'cev-Neumann series.
//!
//! A [`Series`] is a finite-support element `sum a_i r^i + O(r^prec)` where `r`
//! is the formal variable `t` ([`Mode::Formal`]) or the prime `p`
//! ([`Mode::Arithmetic`]). Arithmetic series are always kept in canonical digit
//! form; their frontier never exceeds the digit precision `N` of the domain.

mod arith;
mod gauss;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domains::{Coefficient, CoefficientDomain, DomainError};
use crate::value::{Exponent, Precision};

pub use arith::{canonicalize, CarryLink, CarryTrace, RawSeries};
pub use gauss::{
    argnorm, bar_witness, box_witness, gauss_valuation, localize, restrict, term_value, BoxWitness, GaussValue,
    Localization, Window,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// `t`-adic series; coefficients add and multiply without carrying.
    Formal,
    /// `p`-adic series; coset-wise carrying after every operation.
    Arithmetic,
}

impl Mode {
    /// Series variable letter used by the literal grammar.
    pub fn variable(self) -> char {
        match self {
            Mode::Formal => 't',
            Mode::Arithmetic => 'p',
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Formal => "formal",
            Mode::Arithmetic => "arithmetic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series modes differ ({0} vs {1})")]
    ModeMismatch(Mode, Mode),
    #[error("coefficient domains differ ({0} vs {1})")]
    DomainMismatch(String, String),
    #[error("{mode} series cannot use the {domain} domain")]
    IncompatibleMode { mode: Mode, domain: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("precision exhausted: carrying reaches p^{{{exponent}}} beyond the modulus p^{precision}")]
    PrecisionExhausted { exponent: String, precision: u32 },
    #[error("operation needs a nonzero series")]
    ZeroSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    domain: CoefficientDomain,
    mode: Mode,
    terms: BTreeMap<Exponent, Coefficient>,
    prec: Precision,
}

fn check_mode(domain: &CoefficientDomain, mode: Mode) -> Result<(), SeriesError> {
    let ok = match mode {
        Mode::Formal => !domain.is_arithmetic(),
        Mode::Arithmetic => domain.is_arithmetic(),
    };
    if ok {
        Ok(())
    } else {
        Err(SeriesError::IncompatibleMode { mode, domain: domain.name() })
    }
}

impl Series {
    pub fn zero(domain: CoefficientDomain, mode: Mode) -> Result<Self, SeriesError> {
        Series::new(domain, mode, std::iter::empty(), Precision::Infinite)
    }

    /// Builds a canonical series from arbitrary terms. Repeated indices are summed;
    /// arithmetic input is carried into digit form.
    pub fn new(
        domain: CoefficientDomain,
        mode: Mode,
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
        prec: Precision,
    ) -> Result<Self, SeriesError> {
        check_mode(&domain, mode)?;
        match mode {
            Mode::Formal => {
                let mut acc: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
                for (i, a) in terms {
                    let a = domain.normalize(&a)?;
                    if !prec.admits(&i) {
                        continue;
                    }
                    let slot = acc.entry(i).or_default();
                    *slot = domain.add(slot, &a);
                }
                acc.retain(|_, a| !a.is_zero());
                Ok(Series { domain, mode, terms: acc, prec })
            }
            Mode::Arithmetic => canonicalize(&RawSeries::new(domain, terms, prec)?),
        }
    }

    pub fn formal(
        domain: CoefficientDomain,
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
    ) -> Result<Self, SeriesError> {
        Series::new(domain, Mode::Formal, terms, Precision::Infinite)
    }

    pub fn arithmetic(
        domain: CoefficientDomain,
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
    ) -> Result<Self, SeriesError> {
        Series::new(domain, Mode::Arithmetic, terms, Precision::Infinite)
    }

    /// `a * r^i`.
    pub fn monomial(domain: CoefficientDomain, mode: Mode, a: Coefficient, i: Exponent) -> Result<Self, SeriesError> {
        Series::new(domain, mode, [(i, a)], Precision::Infinite)
    }

    pub(crate) fn from_canonical_parts(
        domain: CoefficientDomain,
        mode: Mode,
        terms: BTreeMap<Exponent, Coefficient>,
        prec: Precision,
    ) -> Self {
        Series { domain, mode, terms, prec }
    }

    pub fn domain(&self) -> &CoefficientDomain {
        &self.domain
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn prec(&self) -> &Precision {
        &self.prec
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Coefficient)> + '_ {
        self.terms.iter()
    }

    pub fn support(&self) -> impl DoubleEndedIterator<Item = &Exponent> + '_ {
        self.terms.keys()
    }

    pub fn coefficient(&self, i: &Exponent) -> Option<&Coefficient> {
        self.terms.get(i)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest support index, `+inf` for the zero series.
    pub fn order(&self) -> Precision {
        self.terms.keys().next().map(|e| Precision::Finite(e.clone())).unwrap_or(Precision::Infinite)
    }

    /// Lowers the frontier to `prec` (never raises it).
    pub fn truncate(&self, prec: &Precision) -> Series {
        let prec = self.prec.min_with(prec);
        let terms = self.terms.iter().filter(|(i, _)| prec.admits(i)).map(|(i, a)| (i.clone(), a.clone())).collect();
        Series { domain: self.domain.clone(), mode: self.mode, terms, prec }
    }

    /// Same domain and mode, fail otherwise.
    pub fn check_compatible(&self, other: &Series) -> Result<(), SeriesError> {
        if self.mode != other.mode {
            return Err(SeriesError::ModeMismatch(self.mode, other.mode));
        }
        if self.domain != other.domain {
            return Err(SeriesError::DomainMismatch(self.domain.name(), other.domain.name()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series, SeriesError> {
        arith::add(self, other)
    }

    pub fn mul(&self, other: &Series) -> Result<Series, SeriesError> {
        arith::mul(self, other).map(|(s, _)| s)
    }

    /// Product together with its carry provenance.
    pub fn mul_traced(&self, other: &Series) -> Result<(Series, CarryTrace), SeriesError> {
        arith::mul(self, other)
    }

    pub fn neg(&self) -> Result<Series, SeriesError> {
        arith::neg(self)
    }

    pub fn sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.add(&other.neg()?)
    }

    /// Multiplication by `r^e`.
    pub fn shift(&self, e: &Exponent) -> Series {
        let terms = self.terms.iter().map(|(i, a)| (i + e, a.clone())).collect();
        let prec = self.prec.shifted(&Precision::Finite(e.clone()));
        let out = Series { domain: self.domain.clone(), mode: self.mode, terms, prec };
        match (self.mode, self.domain.precision()) {
            (Mode::Arithmetic, Some(n)) => out.truncate(&Precision::Finite(Exponent::integer(n.into()))),
            _ => out,
        }
    }

    pub fn to_raw(&self) -> RawSeries {
        RawSeries::from_parts(self.domain.clone(), self.terms.clone(), self.prec.clone())
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, var: char, i: &Exponent, a: &Coefficient) -> fmt::Result {
    let one = Coefficient::one();
    let coeff = if a.len() > 1 { format!("({a})") } else { a.to_string() };
    if i.is_zero() {
        return f.write_str(&coeff);
    }
    if *a == one {
        write!(f, "{var}^{{{i}}}")
    } else {
        write!(f, "{coeff}*{var}^{{{i}}}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.mode.variable();
        let mut first = true;
        for (i, a) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            fmt_term(f, var, i, a)?;
        }
        if let Precision::Finite(p) = &self.prec {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "O({var}^{{{p}}})")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
