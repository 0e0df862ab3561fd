//! Profile elements `g_mu`, power-law asymptotics and chain-separation reports.

mod approx;
mod constants;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::domains::{Coefficient, CoefficientDomain, Denominators};
use crate::polygon::{legendre_eval, newton_polygon};
use crate::series::{gauss_valuation, Mode, Series, SeriesError};
use crate::value::{fmt_rational, rational_to_f64, serialize_rational, Exponent, GaussParam, Precision, Value};

pub use approx::{
    discretely_approximate, materialize, materialize_certified, symbolic_LN, Certificate, DeviationRule, NodeApprox,
    ProfileElement,
};
pub use constants::{
    c_mu, inverse_legendre_power, legendre_grid_min, mu_of_r, r_of_mu, root_enclosure, Algebraic, InverseLegendre,
    OracleSample, RationalInterval, ORACLE_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DuError {
    #[error("mu must lie strictly between 0 and 1, got {0}")]
    MuOutOfRange(String),
    #[error("oracle rejected the constant for mu = {mu} (relative error {rel_err:e})")]
    OracleRejected { mu: String, rel_err: f64 },
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("not representable: {0}")]
    Unrepresentable(String),
    #[error("mu grid must be strictly increasing ({0} then {1})")]
    UnorderedGrid(String, String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `coeff * s^exponent` near `s -> 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PowerLaw {
    #[serde(serialize_with = "serialize_rational")]
    pub coeff: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub exponent: BigRational,
}

impl PowerLaw {
    pub fn new(coeff: BigRational, exponent: BigRational) -> Result<Self, DuError> {
        if !coeff.is_positive() {
            return Err(DuError::Rejected(format!(
                "power-law coefficient must be positive, got {}",
                fmt_rational(&coeff)
            )));
        }
        Ok(PowerLaw { coeff, exponent })
    }

    /// `s^exponent`.
    pub fn pure(exponent: BigRational) -> Self {
        PowerLaw { coeff: BigRational::one(), exponent }
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        rational_to_f64(&self.coeff) * s.powf(rational_to_f64(&self.exponent))
    }
}

impl fmt::Display for PowerLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.coeff.is_integer() || self.coeff.denom().bits() <= 32 {
            fmt_rational(&self.coeff)
        } else {
            format!("{:.9}", rational_to_f64(&self.coeff))
        };
        write!(f, "{c}*s^{{{}}}", fmt_rational(&self.exponent))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    /// `F / G -> 0`.
    LittleO,
    /// `F / G` bounded above and below.
    Theta,
    /// `F / G -> inf`.
    Omega,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LittleO => "o",
            Verdict::Theta => "Θ",
            Verdict::Omega => "ω",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AsymptoticClass {
    pub verdict: Verdict,
    pub in_o_sup: bool,
    pub in_omega_sup: bool,
}

/// Class of `F` relative to `G` as `s -> 0`, by exact exponent comparison.
pub fn classify(f: &PowerLaw, g: &PowerLaw) -> AsymptoticClass {
    use std::cmp::Ordering::*;
    let verdict = match f.exponent.cmp(&g.exponent) {
        Less => Verdict::Omega,
        Equal => Verdict::Theta,
        Greater => Verdict::LittleO,
    };
    AsymptoticClass { verdict, in_o_sup: verdict != Verdict::Omega, in_omega_sup: verdict == Verdict::Omega }
}

/// Every coefficient has positive valuation.
pub fn in_m(f: &Series) -> bool {
    let d = f.domain();
    f.terms().all(|(_, a)| d.coeff_valuation(a).expect("validated coefficients") > Value::zero())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSeparation {
    #[serde(serialize_with = "serialize_rational")]
    pub mu: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub lambda: BigRational,
    pub class: AsymptoticClass,
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSample {
    pub k: u32,
    pub s: String,
    #[serde(serialize_with = "serialize_value_str")]
    pub legendre: Value,
    pub ratio: f64,
}

fn serialize_value_str<S: serde::Serializer>(v: &Value, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    #[serde(serialize_with = "serialize_rational")]
    pub mu: BigRational,
    pub law: PowerLaw,
    pub depth: u64,
    pub samples: Vec<RatioSample>,
    pub within_band: bool,
    pub in_m: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub pairs: Vec<PairSeparation>,
    pub realizations: Vec<Realization>,
    pub band: (f64, f64),
    pub passed: bool,
}

/// Sampled `s = 2^{-k}` range and ratio band used by [`chain_report`].
pub const RATIO_KS: std::ops::RangeInclusive<u32> = 4..=10;
pub const RATIO_BAND: (f64, f64) = (0.95, 1.05);

/// Empirical `L(N(g_mu))(s) / (c s^mu)` on `s = 2^{-k}`, `k` in [`RATIO_KS`].
pub fn realize(domain: &CoefficientDomain, mu: &BigRational, depth: u64) -> Result<Realization, DuError> {
    let s_min = 2f64.powi(-(*RATIO_KS.end() as i32));
    let g = ProfileElement::for_mu(domain.clone(), mu, depth, s_min)?;
    let law = symbolic_LN(&g);
    let series = materialize(&g, depth)?;
    let np = newton_polygon(&series).map_err(|e| DuError::Rejected(e.to_string()))?;
    let samples: Vec<_> = RATIO_KS
        .map(|k| {
            let s = GaussParam::dyadic(k);
            let legendre = legendre_eval(&np, &s);
            let ratio = legendre.to_f64() / law.eval_f64(s.to_f64());
            RatioSample { k, s: s.to_string(), legendre, ratio }
        })
        .collect();
    let within_band = samples.iter().all(|x| RATIO_BAND.0 <= x.ratio && x.ratio <= RATIO_BAND.1);
    Ok(Realization { mu: mu.clone(), law, depth, samples, within_band, in_m: in_m(&series) })
}

/// Pairwise separation `LN(g_mu)` in `ω(s^lambda)` for `mu < lambda`, plus the
/// depth-`depth` realization of every `g_mu`.
pub fn chain_report(mu_grid: &[BigRational], depth: u64, domain: &CoefficientDomain) -> Result<ChainReport, DuError> {
    for w in mu_grid.windows(2) {
        if w[0] >= w[1] {
            return Err(DuError::UnorderedGrid(fmt_rational(&w[0]), fmt_rational(&w[1])));
        }
    }
    let mut laws = Vec::with_capacity(mu_grid.len());
    let mut realizations = Vec::with_capacity(mu_grid.len());
    for mu in mu_grid {
        let real = realize(domain, mu, depth)?;
        laws.push(real.law.clone());
        realizations.push(real);
    }
    let mut pairs = Vec::new();
    for (a, law) in laws.iter().enumerate() {
        for lambda in &mu_grid[a + 1..] {
            let class = classify(law, &PowerLaw::pure(lambda.clone()));
            let separated = class.verdict == Verdict::Omega && !class.in_o_sup;
            pairs.push(PairSeparation { mu: mu_grid[a].clone(), lambda: lambda.clone(), class, separated });
        }
    }
    let passed = pairs.iter().all(|p| p.separated) && realizations.iter().all(|r| r.within_band && r.in_m);
    Ok(ChainReport { pairs, realizations, band: RATIO_BAND, passed })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExampleSup {
    pub s: GaussParam,
    pub series: Series,
    /// Gauss valuations of the partial sums `f_1, ..., f_depth`.
    pub partial_values: Vec<Value>,
    /// `1 + 2 s`, approached but never attained.
    pub limit: Value,
}

/// Shift `delta_n = 1 / (2 n max(1, s))`.
pub fn example_delta(n: u64, s: &GaussParam) -> BigRational {
    let m = s.as_rational().clone().max(BigRational::one());
    (BigRational::from_integer(BigInt::from(2 * n)) * m).recip()
}

/// `f = sum_{n >= 1} x^{1 + 1/n} t^{2 - delta_n}`, whose Gauss valuation `1 + 2s`
/// is an infimum over the terms and not a minimum.
pub fn example_sup(s: &GaussParam, depth: u64) -> Result<ExampleSup, DuError> {
    if !s.as_rational().is_positive() {
        return Err(DuError::Rejected("the example needs s > 0".into()));
    }
    let domain = CoefficientDomain::PerfectPoly { p: 2, denominators: Denominators::Arbitrary };
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let index = |n: u64| Exponent::new(&two - example_delta(n, s)).expect("delta < 2");
    let terms: Vec<_> = (1..=depth)
        .map(|n| {
            let xe = Exponent::new(&one + BigRational::new(1.into(), n.into())).expect("positive");
            (index(n), Coefficient::x_pow(xe))
        })
        .collect();
    let series = Series::new(domain, Mode::Formal, terms, Precision::Infinite)?;
    let partial_values =
        (1..=depth).map(|n| gauss_valuation(&series.truncate(&Precision::Finite(index(n + 1))), s).value).collect();
    let limit = Value::Finite(one + two * s.as_rational());
    Ok(ExampleSup { s: s.clone(), series, partial_values, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_series;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn classify_examples() {
        let half = PowerLaw::pure(q(1, 2));
        let c = classify(&half, &PowerLaw::pure(q(3, 4)));
        assert_eq!(c, AsymptoticClass { verdict: Verdict::Omega, in_o_sup: false, in_omega_sup: true });
        assert_eq!(classify(&half, &half).verdict, Verdict::Theta);
        let two_s = PowerLaw::new(q(2, 1), q(1, 1)).unwrap();
        assert_eq!(classify(&two_s, &half).verdict, Verdict::LittleO);
    }

    #[test]
    fn chain_shapes() {
        let d = CoefficientDomain::perfect(2).unwrap();
        let r = chain_report(&[q(1, 4), q(1, 2), q(3, 4)], 64, &d).unwrap();
        assert_eq!(r.pairs.len(), 3);
        assert!(r.pairs.iter().all(|p| p.separated));
        assert!(chain_report(&[q(1, 2)], 8, &d).unwrap().pairs.is_empty());
        assert!(matches!(chain_report(&[q(1, 2), q(1, 2)], 8, &d), Err(DuError::UnorderedGrid(..))));
    }

    #[test]
    fn ideal_membership() {
        let d = CoefficientDomain::mixed(2, 32).unwrap();
        let pi = parse_series("p", &d, Mode::Arithmetic).unwrap();
        assert!(!in_m(&pi));
        let f = parse_series("x*p + x^{1/2}*p^{2}", &d, Mode::Arithmetic).unwrap();
        assert!(in_m(&f));
        let g = parse_series("x + p", &d, Mode::Arithmetic).unwrap();
        assert!(!in_m(&g));
    }

    #[test]
    fn example_at_unit_s() {
        let ex = example_sup(&GaussParam::integer(1), 4).unwrap();
        let want: Vec<_> = (1..=4).map(|n| Value::Finite(q(3, 1) + q(1, 2 * n))).collect();
        assert_eq!(ex.partial_values, want);
        assert_eq!(ex.limit, Value::from_int(3));
        let one = example_sup(&GaussParam::integer(1), 1).unwrap();
        assert_eq!(one.partial_values, vec![Value::ratio(7, 2)]);
        assert!(example_sup(&GaussParam::integer(0), 3).is_err());
    }
}
