//! Ring operations: `t`-adic convolution and `p`-adic carrying.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, ToPrimitive, Zero};
use serde::Serialize;

use super::{check_mode, Mode, Series, SeriesError};
use crate::domains::{Coefficient, CoefficientDomain};
use crate::value::{Exponent, Precision};

/// Arithmetic-mode series before carrying: integer coefficients of any size
/// or sign, possibly divisible by `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSeries {
    domain: CoefficientDomain,
    terms: BTreeMap<Exponent, Coefficient>,
    prec: Precision,
}

impl RawSeries {
    pub fn new(
        domain: CoefficientDomain,
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
        prec: Precision,
    ) -> Result<Self, SeriesError> {
        check_mode(&domain, Mode::Arithmetic)?;
        let mut acc: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
        for (i, a) in terms {
            domain.validate(&a)?;
            let slot = acc.entry(i).or_default();
            *slot = &*slot + &a;
        }
        acc.retain(|_, a| !a.is_zero());
        Ok(RawSeries { domain, terms: acc, prec })
    }

    pub(crate) fn from_parts(
        domain: CoefficientDomain,
        terms: BTreeMap<Exponent, Coefficient>,
        prec: Precision,
    ) -> Self {
        RawSeries { domain, terms, prec }
    }

    pub fn domain(&self) -> &CoefficientDomain {
        &self.domain
    }

    pub fn prec(&self) -> &Precision {
        &self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Coefficient)> {
        self.terms.iter()
    }

    /// Coset-wise value `sum_n a_{gamma+n} p^n` for every x-exponent, keyed by
    /// the coset representative `gamma` in `[0, 1)`.
    pub fn coset_values(&self) -> BTreeMap<Exponent, BTreeMap<Exponent, BigInt>> {
        let p = BigInt::from(self.domain.p());
        let mut cosets: BTreeMap<Exponent, BTreeMap<Exponent, BigInt>> = BTreeMap::new();
        for (i, a) in &self.terms {
            let shift = i.floor().to_u32().expect("exponent fits in u32");
            let weight = Pow::pow(&p, shift);
            let slot = cosets.entry(i.fract()).or_default();
            for (e, c) in a.terms() {
                *slot.entry(e.clone()).or_insert_with(BigInt::zero) += c * &weight;
            }
        }
        cosets
    }
}

fn digit_slots(frontier: &Exponent, gamma: &Exponent) -> u32 {
    match frontier.checked_sub(gamma) {
        Some(room) => room.as_rational().ceil().to_integer().to_u32().expect("slot count fits"),
        None => 0,
    }
}

/// Carries a raw series into canonical digit form.
///
/// Each coset `gamma + Z` is evaluated as an integer (per x-exponent) and
/// re-expanded in base `p`. The result lives modulo `p^N`: its frontier is
/// `min(prec, N)`. A raw series that claims more precision than `N` and whose
/// carries spill past `p^N` is rejected rather than silently truncated.
pub fn canonicalize(raw: &RawSeries) -> Result<Series, SeriesError> {
    let domain = raw.domain.clone();
    let n = domain.precision().expect("arithmetic domain");
    let cap = Precision::Finite(Exponent::integer(n.into()));
    let strict = raw.prec > cap;
    let frontier = match raw.prec.min_with(&cap) {
        Precision::Finite(e) => e,
        Precision::Infinite => unreachable!("capped frontier"),
    };
    let p = BigInt::from(domain.p());
    let mut terms: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
    for (gamma, values) in raw.coset_values() {
        let slots = digit_slots(&frontier, &gamma);
        let modulus: BigInt = Pow::pow(&p, slots);
        for (e, v) in values {
            let mut rem = v.mod_floor(&modulus);
            if strict && rem != v {
                let spill = &gamma + &Exponent::integer(slots.into());
                return Err(SeriesError::PrecisionExhausted { exponent: spill.to_string(), precision: n });
            }
            let mut k = 0u64;
            while !rem.is_zero() {
                let (q, d) = rem.div_rem(&p);
                if !d.is_zero() {
                    let idx = &gamma + &Exponent::integer(k);
                    terms.entry(idx).or_default().add_monomial(e.clone(), d);
                }
                rem = q;
                k += 1;
            }
        }
    }
    Ok(Series::from_canonical_parts(domain, Mode::Arithmetic, terms, Precision::Finite(frontier)))
}

/// One pair of factor indices feeding product index `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CarryLink {
    pub i: Exponent,
    pub j: Exponent,
    pub k: Exponent,
}

/// Provenance of a product: for every index `k` of `fg`, the factor pairs
/// `(i, j)` whose products end up there after carrying.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CarryTrace {
    links: Vec<CarryLink>,
}

impl CarryTrace {
    pub fn links(&self) -> &[CarryLink] {
        &self.links
    }

    pub fn contributors<'a>(&'a self, k: &'a Exponent) -> impl Iterator<Item = &'a CarryLink> + 'a {
        self.links.iter().filter(move |l| &l.k == k)
    }

    /// Number of links feeding into indices `<= k`.
    pub fn cumulative(&self, k: &Exponent) -> usize {
        self.links.iter().filter(|l| &l.k <= k).count()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

fn arithmetic_cap(domain: &CoefficientDomain, prec: Precision) -> Precision {
    match domain.precision() {
        Some(n) => prec.min_with(&Precision::Finite(Exponent::integer(n.into()))),
        None => prec,
    }
}

pub(super) fn add(f: &Series, g: &Series) -> Result<Series, SeriesError> {
    f.check_compatible(g)?;
    let prec = f.prec.min_with(&g.prec);
    match f.mode {
        Mode::Formal => {
            let mut terms = f.terms.clone();
            for (i, b) in &g.terms {
                let slot = terms.entry(i.clone()).or_default();
                *slot = f.domain.add(slot, b);
            }
            terms.retain(|i, a| !a.is_zero() && prec.admits(i));
            Ok(Series::from_canonical_parts(f.domain.clone(), Mode::Formal, terms, prec))
        }
        Mode::Arithmetic => {
            let mut terms = f.terms.clone();
            for (i, b) in &g.terms {
                let slot = terms.entry(i.clone()).or_default();
                *slot = &*slot + b;
            }
            terms.retain(|i, a| !a.is_zero() && prec.admits(i));
            let prec = arithmetic_cap(&f.domain, prec);
            canonicalize(&RawSeries::from_parts(f.domain.clone(), terms, prec))
        }
    }
}

pub(super) fn neg(f: &Series) -> Result<Series, SeriesError> {
    let terms: BTreeMap<Exponent, Coefficient> = f.terms.iter().map(|(i, a)| (i.clone(), -a)).collect();
    match f.mode {
        Mode::Formal => {
            let p = BigInt::from(f.domain.p());
            let terms = terms.into_iter().map(|(i, a)| (i, a.map_coefficients(|c| c.mod_floor(&p)))).collect();
            Ok(Series::from_canonical_parts(f.domain.clone(), Mode::Formal, terms, f.prec.clone()))
        }
        Mode::Arithmetic => canonicalize(&RawSeries::from_parts(f.domain.clone(), terms, f.prec.clone())),
    }
}

/// Product frontier: what is known of `f` times what is known of `g`.
fn product_precision(f: &Series, g: &Series) -> Precision {
    let a = f.prec.shifted(&g.order());
    let b = g.prec.shifted(&f.order());
    let c = f.prec.shifted(&g.prec);
    a.min_with(&b).min_with(&c)
}

pub(super) fn mul(f: &Series, g: &Series) -> Result<(Series, CarryTrace), SeriesError> {
    f.check_compatible(g)?;
    let prec = product_precision(f, g);
    let mut acc: BTreeMap<Exponent, Coefficient> = BTreeMap::new();
    let mut pairs: Vec<(Exponent, Exponent, Exponent)> = Vec::new();
    for (i, a) in &f.terms {
        for (j, b) in &g.terms {
            let k = i + j;
            if !prec.admits(&k) {
                continue;
            }
            let slot = acc.entry(k.clone()).or_default();
            *slot = match f.mode {
                Mode::Formal => f.domain.add(slot, &f.domain.mul(a, b)),
                Mode::Arithmetic => &*slot + &(a * b),
            };
            pairs.push((i.clone(), j.clone(), k));
        }
    }
    acc.retain(|_, a| !a.is_zero());
    let product = match f.mode {
        Mode::Formal => Series::from_canonical_parts(f.domain.clone(), Mode::Formal, acc, prec),
        Mode::Arithmetic => {
            let prec = arithmetic_cap(&f.domain, prec);
            canonicalize(&RawSeries::from_parts(f.domain.clone(), acc, prec))?
        }
    };
    let mut links = Vec::new();
    for k in product.support() {
        for (i, j, base) in &pairs {
            let feeds = match f.mode {
                Mode::Formal => base == k,
                Mode::Arithmetic => k.checked_sub(base).map(|d| d.is_integer()).unwrap_or(false),
            };
            if feeds {
                links.push(CarryLink { i: i.clone(), j: j.clone(), k: k.clone() });
            }
        }
    }
    links.sort();
    Ok((product, CarryTrace { links }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::CoefficientDomain;

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d)
    }

    fn padic2() -> CoefficientDomain {
        CoefficientDomain::padic(2, 32).unwrap()
    }

    fn digits(s: &Series) -> Vec<(Exponent, BigInt)> {
        s.terms().map(|(i, a)| (i.clone(), a.constant_term())).collect()
    }

    #[test]
    fn one_plus_one_carries() {
        let one = Series::arithmetic(padic2(), [(e(0, 1), Coefficient::one())]).unwrap();
        let two = one.add(&one).unwrap();
        assert_eq!(digits(&two), vec![(e(1, 1), 1.into())]);
    }

    #[test]
    fn three_squared_is_nine() {
        let f = Series::arithmetic(padic2(), [(e(0, 1), Coefficient::one()), (e(1, 1), Coefficient::one())]).unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(digits(&sq), vec![(e(0, 1), 1.into()), (e(3, 1), 1.into())]);
    }

    #[test]
    fn half_exponent_square_carries_within_coset() {
        let f = Series::arithmetic(padic2(), [(e(0, 1), Coefficient::one()), (e(1, 2), Coefficient::one())]).unwrap();
        let (sq, trace) = f.mul_traced(&f).unwrap();
        assert_eq!(digits(&sq), vec![(e(0, 1), 1.into()), (e(1, 1), 1.into()), (e(3, 2), 1.into())]);
        // p^{3/2} is fed by both cross terms at p^{1/2}
        assert_eq!(trace.contributors(&e(3, 2)).count(), 2);
    }

    #[test]
    fn coset_canonical_form() {
        let raw = RawSeries::new(
            padic2(),
            [(e(1, 2), Coefficient::constant(3)), (e(0, 1), Coefficient::one())],
            Precision::Infinite,
        )
        .unwrap();
        let s = canonicalize(&raw).unwrap();
        assert_eq!(digits(&s), vec![(e(0, 1), 1.into()), (e(1, 2), 1.into()), (e(3, 2), 1.into())]);
        let again = canonicalize(&s.to_raw()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn carry_beyond_modulus_is_an_error() {
        let d = CoefficientDomain::padic(2, 4).unwrap();
        let raw = RawSeries::new(d, [(e(3, 1), Coefficient::constant(3))], Precision::Infinite).unwrap();
        assert!(matches!(canonicalize(&raw), Err(SeriesError::PrecisionExhausted { .. })));
    }

    #[test]
    fn formal_cancellation_keeps_precision() {
        let d = CoefficientDomain::perfect(3).unwrap();
        let x = Coefficient::x_pow(e(1, 1));
        let f = Series::new(d.clone(), Mode::Formal, [(e(1, 1), x.clone())], Precision::Finite(e(5, 1))).unwrap();
        let g = Series::formal(d, [(e(1, 1), x.scale(&2.into()))]).unwrap();
        let sum = f.add(&g).unwrap();
        assert!(sum.is_zero());
        assert_eq!(sum.prec(), &Precision::Finite(e(5, 1)));
    }

    #[test]
    fn mismatched_modes_rejected() {
        let f = Series::formal(CoefficientDomain::perfect(2).unwrap(), []).unwrap();
        let g = Series::arithmetic(padic2(), []).unwrap();
        assert!(matches!(f.add(&g), Err(SeriesError::ModeMismatch(..))));
        assert!(matches!(Series::formal(padic2(), []), Err(SeriesError::IncompatibleMode { .. })));
    }

    #[test]
    fn negation_is_additive_inverse() {
        let f = Series::arithmetic(padic2(), [(e(1, 3), Coefficient::one()), (e(2, 1), Coefficient::one())]).unwrap();
        let z = f.add(&f.neg().unwrap()).unwrap();
        assert!(z.is_zero());
    }
}
