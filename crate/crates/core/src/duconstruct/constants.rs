//! Inverse-Legendre constants of pure powers, with rigorous rational enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use serde::Serialize;

use super::DuError;
use crate::value::{fmt_rational, rational_to_f64, serialize_rational};

/// Bits of the dyadic grid used by root enclosures.
pub const ENCLOSURE_BITS: u64 = 128;

/// Closed interval `[lo, hi]` of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RationalInterval {
    #[serde(serialize_with = "serialize_rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn point(q: BigRational) -> Self {
        RationalInterval { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Rational with the smallest denominator in the interval, for `0 < lo <= hi`.
    pub fn simplest(&self) -> BigRational {
        simplest_between(&self.lo, &self.hi)
    }
}

fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if next <= *hi {
        return next;
    }
    fl.clone() + simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip()).recip()
}

/// Encloses `q^{1/n}` for `q >= 0` between consecutive multiples of `2^-bits`;
/// returns a point interval when the root is exact.
pub fn root_enclosure(q: &BigRational, n: u32, bits: u64) -> RationalInterval {
    assert!(!q.is_negative() && n > 0);
    if n == 1 {
        return RationalInterval::point(q.clone());
    }
    let (num, den) = (q.numer(), q.denom());
    let rn = num.nth_root(n);
    let rd = den.nth_root(n);
    if Pow::pow(&rn, n) == *num && Pow::pow(&rd, n) == *den {
        return RationalInterval::point(BigRational::new(rn, rd));
    }
    let scale = BigInt::one() << (bits * u64::from(n));
    let floor = (num * scale).div_floor(den);
    let root = floor.nth_root(n);
    let unit = BigInt::one() << bits;
    RationalInterval { lo: BigRational::new(root.clone(), unit.clone()), hi: BigRational::new(root + 1, unit) }
}

/// Enclosure of `q^{a/b}` for `q > 0`, `a, b > 0`.
pub fn power_enclosure(q: &RationalInterval, a: u32, b: u32, bits: u64) -> RationalInterval {
    let lo = root_enclosure(&Pow::pow(&q.lo, a), b, bits);
    let hi = root_enclosure(&Pow::pow(&q.hi, a), b, bits);
    RationalInterval { lo: lo.lo, hi: hi.hi }
}

/// A positive algebraic number: exact when rational, otherwise an enclosure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Algebraic {
    Exact(#[serde(serialize_with = "serialize_rational")] BigRational),
    Enclosed(RationalInterval),
}

impl Algebraic {
    fn from_interval(iv: RationalInterval) -> Self {
        if iv.is_point() {
            Algebraic::Exact(iv.lo)
        } else {
            Algebraic::Enclosed(iv)
        }
    }

    pub fn interval(&self) -> RationalInterval {
        match self {
            Algebraic::Exact(q) => RationalInterval::point(q.clone()),
            Algebraic::Enclosed(iv) => iv.clone(),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Algebraic::Exact(q) => Some(q),
            Algebraic::Enclosed(_) => None,
        }
    }

    /// Exact value or enclosure midpoint.
    pub fn approx(&self) -> BigRational {
        match self {
            Algebraic::Exact(q) => q.clone(),
            Algebraic::Enclosed(iv) => iv.midpoint(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.approx())
    }
}

impl std::fmt::Display for Algebraic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algebraic::Exact(q) => f.write_str(&fmt_rational(q)),
            Algebraic::Enclosed(iv) => write!(f, "~{:.12}", rational_to_f64(&iv.midpoint())),
        }
    }
}

/// `mu = a/b` split into `(a, b, d = b - a)` as machine integers.
pub(crate) fn split_mu(mu: &BigRational) -> Result<(u32, u32, u32), DuError> {
    if !mu.is_positive() || *mu >= BigRational::one() {
        return Err(DuError::MuOutOfRange(fmt_rational(mu)));
    }
    let a = mu.numer().to_u32().ok_or_else(|| DuError::MuOutOfRange(fmt_rational(mu)))?;
    let b = mu.denom().to_u32().ok_or_else(|| DuError::MuOutOfRange(fmt_rational(mu)))?;
    Ok((a, b, b - a))
}

/// `r / (r + 1)`.
pub fn mu_of_r(r: &BigRational) -> BigRational {
    r / (r + BigRational::one())
}

/// `mu / (1 - mu)`.
pub fn r_of_mu(mu: &BigRational) -> BigRational {
    mu / (BigRational::one() - mu)
}

/// `c_mu = mu^{r+1} / r`, the coefficient with `inf_x (c x^{-r} + s x) = s^mu`.
pub fn c_mu(mu: &BigRational) -> Result<Algebraic, DuError> {
    let (a, b, d) = split_mu(mu)?;
    // (a/b)^{b/d} * d/a
    let base = BigRational::new(a.into(), b.into());
    let root = root_enclosure(&Pow::pow(&base, b), d, ENCLOSURE_BITS);
    let k = BigRational::new(d.into(), a.into());
    Ok(Algebraic::from_interval(RationalInterval { lo: root.lo * &k, hi: root.hi * &k }))
}

/// Brute-force `inf_{x > 0} (c x^{-r} + s x)`: log-spaced scan, then golden-section refinement.
pub fn legendre_grid_min(c: f64, r: f64, s: f64) -> f64 {
    let phi = |x: f64| c * x.powf(-r) + s * x;
    let steps = 3600;
    let (lo_exp, hi_exp) = (-9.0_f64, 9.0_f64);
    let at = |k: usize| 10f64.powf(lo_exp + (hi_exp - lo_exp) * k as f64 / steps as f64);
    let best = (0..=steps)
        .map(|k| (k, phi(at(k))))
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(steps)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        }
    }
    f1.min(f2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSample {
    pub s: f64,
    pub oracle: f64,
    pub expected: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseLegendre {
    #[serde(serialize_with = "serialize_rational")]
    pub mu: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub r: BigRational,
    pub c: Algebraic,
    pub samples: Vec<OracleSample>,
    pub max_rel_err: f64,
}

/// Relative error the oracle must confirm before a constant is accepted.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// `(c_mu, r_mu)` with `L(c_mu x^{-r_mu}) = s^mu`, checked against the grid oracle
/// at `s = j/20`, `j = 1..20`.
pub fn inverse_legendre_power(mu: &BigRational) -> Result<InverseLegendre, DuError> {
    let c = c_mu(mu)?;
    let r = r_of_mu(mu);
    let (cf, rf, muf) = (c.to_f64(), rational_to_f64(&r), rational_to_f64(mu));
    let samples: Vec<_> = (1..=20)
        .map(|j| {
            let s = j as f64 / 20.0;
            let oracle = legendre_grid_min(cf, rf, s);
            let expected = s.powf(muf);
            OracleSample { s, oracle, expected, rel_err: ((oracle - expected) / expected).abs() }
        })
        .collect();
    let max_rel_err = samples.iter().map(|x| x.rel_err).fold(0.0, f64::max);
    if max_rel_err.is_nan() || max_rel_err > ORACLE_TOLERANCE {
        return Err(DuError::OracleRejected { mu: fmt_rational(mu), rel_err: max_rel_err });
    }
    Ok(InverseLegendre { mu: mu.clone(), r, c, samples, max_rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn half_and_two_thirds_are_rational() {
        let half = inverse_legendre_power(&q(1, 2)).unwrap();
        assert_eq!((half.c.exact().cloned(), half.r), (Some(q(1, 4)), q(1, 1)));
        let two_thirds = inverse_legendre_power(&q(2, 3)).unwrap();
        assert_eq!((two_thirds.c.exact().cloned(), two_thirds.r), (Some(q(4, 27)), q(2, 1)));
    }

    #[test]
    fn irrational_constants_are_enclosed() {
        let c = c_mu(&q(1, 4)).unwrap();
        let Algebraic::Enclosed(iv) = &c else { panic!("expected an enclosure") };
        // (1/4)^{4/3} * 3
        let want = 0.25f64.powf(4.0 / 3.0) * 3.0;
        assert!((rational_to_f64(&iv.midpoint()) - want).abs() < 1e-15);
        assert!(iv.width() < q(1, 1 << 40));
    }

    #[test]
    fn root_enclosure_brackets() {
        let iv = root_enclosure(&q(2, 1), 2, 64);
        assert!(&iv.lo * &iv.lo < q(2, 1) && &iv.hi * &iv.hi > q(2, 1));
        assert!(root_enclosure(&q(8, 27), 3, 64).is_point());
    }

    #[test]
    fn mu_range() {
        assert!(inverse_legendre_power(&q(1, 1)).is_err());
        assert!(inverse_legendre_power(&q(0, 1)).is_err());
        assert_eq!(mu_of_r(&r_of_mu(&q(3, 8))), q(3, 8));
    }
}
