//! Discrete approximation of convex decay profiles by `p`-adic lattice points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::constants::{c_mu, mu_of_r, power_enclosure, root_enclosure, RationalInterval, ENCLOSURE_BITS};
use super::{DuError, PowerLaw};
use crate::domains::{Coefficient, CoefficientDomain};
use crate::polygon::{newton_polygon, sup_distance, PLConvexFn};
use crate::series::{Mode, Series};
use crate::value::{fmt_rational, serialize_rational, Exponent, Precision, Value};

/// Allowed node deviation `|q_i - G(i)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DeviationRule {
    /// `min(G(i)/i, 1/i^2)`.
    Default,
    /// `G(i)/i`.
    RelativeToIndex,
    /// `1/i^2`.
    InverseSquare,
}

impl DeviationRule {
    pub fn bound(self, i: &BigRational, g: &BigRational) -> BigRational {
        let rel = g / i;
        let sq = (i * i).recip();
        match self {
            DeviationRule::Default => rel.min(sq),
            DeviationRule::RelativeToIndex => rel,
            DeviationRule::InverseSquare => sq,
        }
    }

    /// Rule actually used for a profile with decay exponent `r`.
    pub fn for_decay(self, r: &BigRational) -> DeviationRule {
        match self {
            DeviationRule::Default if *r >= BigRational::from_integer(2.into()) => DeviationRule::RelativeToIndex,
            other => other,
        }
    }
}

impl std::str::FromStr for DeviationRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(DeviationRule::Default),
            "relative" => Ok(DeviationRule::RelativeToIndex),
            "inverse-square" => Ok(DeviationRule::InverseSquare),
            _ => Err(format!("unknown deviation rule `{s}` (default|relative|inverse-square)")),
        }
    }
}

/// One approximated node: `q` lies on the lattice `p^{-k} Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeApprox {
    pub index: Exponent,
    /// Target value, or a lower bound within `2^-128` of it.
    #[serde(serialize_with = "serialize_rational")]
    pub target: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub q: BigRational,
    pub k: u32,
    /// Upper bound on `|q - G(i)|`.
    #[serde(serialize_with = "serialize_rational")]
    pub deviation: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub bound: BigRational,
}

fn is_p_power(mut d: BigInt, p: u32) -> Option<u32> {
    let p = BigInt::from(p);
    let mut k = 0;
    while d > BigInt::one() {
        let (quo, rem) = d.div_rem(&p);
        if !rem.is_zero() {
            return None;
        }
        d = quo;
        k += 1;
    }
    Some(k)
}

fn round_half_up(q: &BigRational) -> BigInt {
    (q + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

/// Coarsest lattice `p^{-k}` whose nearest point is positive and within `bound`.
/// Lattice-valued targets are kept exactly.
fn approximate_node(
    index: &Exponent,
    target: &RationalInterval,
    p: u32,
    rule: DeviationRule,
) -> Result<NodeApprox, DuError> {
    let g = &target.lo;
    let slack = target.width();
    let bound = rule.bound(index.as_rational(), g);
    if slack >= bound {
        return Err(DuError::Unrepresentable(format!("target at i = {index} is not resolved finely enough")));
    }
    if target.is_point() {
        if let Some(k) = is_p_power(g.denom().clone(), p) {
            return Ok(NodeApprox {
                index: index.clone(),
                target: g.clone(),
                q: g.clone(),
                k,
                deviation: BigRational::zero(),
                bound,
            });
        }
    }
    let pb = BigInt::from(p);
    let mut scale = BigInt::one();
    for k in 0..=4096u32 {
        let n = round_half_up(&(g * BigRational::from_integer(scale.clone())));
        if n.is_positive() {
            let q = BigRational::new(n, scale.clone());
            let deviation = (&q - g).abs() + &slack;
            if deviation <= bound {
                return Ok(NodeApprox { index: index.clone(), target: g.clone(), q, k, deviation, bound });
            }
        }
        scale *= &pb;
    }
    Err(DuError::Unrepresentable(format!("no lattice point found for i = {index}")))
}

/// Evidence that a series discretely approximates the targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub nodes: Vec<NodeApprox>,
    #[serde(serialize_with = "serialize_rational")]
    pub max_deviation: BigRational,
    /// Sup-distance between the Newton polygon and the target interpolation.
    pub hull_deviation: Value,
    /// Largest `|secant slope of q - secant slope of G|` over consecutive nodes.
    #[serde(serialize_with = "serialize_rational")]
    pub max_secant_deviation: BigRational,
    pub holds: bool,
}

fn certify(nodes: Vec<NodeApprox>, target: Option<&PLConvexFn>, series: &Series) -> Certificate {
    let max_deviation = nodes.iter().map(|n| n.deviation.clone()).max().unwrap_or_else(BigRational::zero);
    let hull_deviation = match (target, newton_polygon(series)) {
        (Some(t), Ok(np)) => sup_distance(&np, t),
        _ => Value::Infinite,
    };
    let mut max_secant_deviation = BigRational::zero();
    let mut secants_ok = true;
    for w in nodes.windows(2) {
        let dx = w[1].index.as_rational() - w[0].index.as_rational();
        let dq = (&w[1].q - &w[0].q) / &dx;
        let dg = (&w[1].target - &w[0].target) / &dx;
        let dev = (dq - dg).abs();
        secants_ok &= dev <= (&w[0].deviation + &w[1].deviation) / &dx;
        max_secant_deviation = max_secant_deviation.max(dev);
    }
    let nodes_ok = nodes.iter().all(|n| n.deviation <= n.bound);
    let hull_ok = target.is_none() || hull_deviation <= Value::Finite(max_deviation.clone());
    Certificate { holds: nodes_ok && hull_ok && secants_ok, nodes, max_deviation, hull_deviation, max_secant_deviation }
}

fn mode_for(domain: &CoefficientDomain) -> Mode {
    if domain.is_arithmetic() {
        Mode::Arithmetic
    } else {
        Mode::Formal
    }
}

fn build_series(domain: &CoefficientDomain, nodes: &[NodeApprox], prec: Precision) -> Result<Series, DuError> {
    if let CoefficientDomain::PadicDigits { .. } = domain {
        return Err(DuError::Unrepresentable(format!("{} has no x-power coefficients", domain.name())));
    }
    let terms = nodes.iter().map(|n| {
        let e = Exponent::new(n.q.clone()).expect("positive node value");
        (n.index.clone(), Coefficient::x_pow(e))
    });
    Ok(Series::new(domain.clone(), mode_for(domain), terms, prec)?)
}

fn reject(reason: &str, pts: &[&(Exponent, BigRational)]) -> DuError {
    let pts: Vec<_> = pts.iter().map(|(i, g)| format!("({i}, {})", fmt_rational(g))).collect();
    DuError::Rejected(format!("{reason} at {}", pts.join(", ")))
}

/// Approximates convex nonincreasing positive targets `(i, G(i))` by `sum x^{q_i} r^i`.
pub fn discretely_approximate(
    targets: &[(Exponent, BigRational)],
    domain: &CoefficientDomain,
    rule: DeviationRule,
) -> Result<(Series, Certificate), DuError> {
    if targets.is_empty() {
        return Err(DuError::Rejected("no targets".into()));
    }
    for t in targets {
        if t.0.is_zero() || !t.1.is_positive() {
            return Err(reject("targets need positive index and value", &[t]));
        }
    }
    for w in targets.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(reject("indices must increase", &[&w[0], &w[1]]));
        }
        if w[1].1 > w[0].1 {
            return Err(reject("targets increase", &[&w[0], &w[1]]));
        }
    }
    let target_fn = PLConvexFn::from_nodes(targets.to_vec()).map_err(|_| {
        let w = targets
            .windows(3)
            .find(|w| {
                let s1 = (&w[1].1 - &w[0].1) / (w[1].0.as_rational() - w[0].0.as_rational());
                let s2 = (&w[2].1 - &w[1].1) / (w[2].0.as_rational() - w[1].0.as_rational());
                s1 > s2
            })
            .expect("the only remaining failure is convexity");
        reject("targets are not convex", &[&w[0], &w[1], &w[2]])
    })?;
    let nodes = targets
        .iter()
        .map(|(i, g)| approximate_node(i, &RationalInterval::point(g.clone()), domain.p(), rule))
        .collect::<Result<Vec<_>, _>>()?;
    let series = build_series(domain, &nodes, Precision::Infinite)?;
    let cert = certify(nodes, Some(&target_fn), &series);
    Ok((series, cert))
}

/// The element `g = sum_i x^{q_i} r^i` with `q_i ~ c i^{-r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileElement {
    pub domain: CoefficientDomain,
    #[serde(serialize_with = "serialize_rational")]
    pub c: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub r: BigRational,
    pub rule: DeviationRule,
}

/// Fraction of the depth the continuous minimizer may reach at the smallest sampled `s`.
const MINIMIZER_REACH: f64 = 0.8;

impl ProfileElement {
    pub fn new(
        domain: CoefficientDomain,
        c: BigRational,
        r: BigRational,
        rule: DeviationRule,
    ) -> Result<Self, DuError> {
        if !c.is_positive() || !r.is_positive() {
            return Err(DuError::Rejected(format!(
                "profile needs c > 0 and r > 0, got c = {}, r = {}",
                fmt_rational(&c),
                fmt_rational(&r)
            )));
        }
        let rule = rule.for_decay(&r);
        Ok(ProfileElement { domain, c, r, rule })
    }

    /// `g_mu` scaled so its Legendre transform is `lambda s^mu`, with `lambda` the
    /// largest power of two keeping the minimizer below the depth at `s_min`.
    pub fn for_mu(domain: CoefficientDomain, mu: &BigRational, depth: u64, s_min: f64) -> Result<Self, DuError> {
        let c = c_mu(mu)?;
        let r = super::constants::r_of_mu(mu);
        let muf = crate::value::rational_to_f64(mu);
        let unit_minimizer = muf * s_min.powf(muf - 1.0);
        let reach = MINIMIZER_REACH * depth as f64;
        let mut lambda_exp: i32 = -8;
        while lambda_exp < 64 && 2f64.powi(lambda_exp + 1) * unit_minimizer <= reach {
            lambda_exp += 1;
        }
        let lambda = if lambda_exp >= 0 {
            BigRational::from_integer(BigInt::one() << lambda_exp as u32)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-lambda_exp) as u32)
        };
        // c_mu * lambda^{r+1}; r + 1 = b/d
        let rp1 = &r + BigRational::one();
        let (a, b) = (rp1.numer().to_u32().expect("small"), rp1.denom().to_u32().expect("small"));
        let scale = power_enclosure(&RationalInterval::point(lambda), a, b, ENCLOSURE_BITS);
        let cprof = c.approx() * scale.midpoint();
        ProfileElement::new(domain, cprof, r, DeviationRule::Default)
    }

    pub fn mu(&self) -> BigRational {
        mu_of_r(&self.r)
    }

    /// Enclosure of `c i^{-r}`.
    pub fn target(&self, i: u64) -> RationalInterval {
        let (a, d) = (self.r.numer().to_u32().expect("small"), self.r.denom().to_u32().expect("small"));
        // (c^d / i^a)^{1/d}
        let inner = Pow::pow(&self.c, d) / BigRational::from_integer(Pow::pow(BigInt::from(i), a));
        root_enclosure(&inner, d, ENCLOSURE_BITS)
    }

    /// Digit choices `q_1..q_n`.
    pub fn nodes(&self, n: u64) -> Result<Vec<NodeApprox>, DuError> {
        (1..=n).map(|i| approximate_node(&Exponent::integer(i), &self.target(i), self.domain.p(), self.rule)).collect()
    }
}

/// `sum_{i=1}^{n} x^{q_i} r^i + O(r^{n+1})`.
pub fn materialize(g: &ProfileElement, n: u64) -> Result<Series, DuError> {
    if n == 0 {
        return Err(DuError::Rejected("materialization depth must be at least 1".into()));
    }
    let nodes = g.nodes(n)?;
    let prec = Precision::Finite(Exponent::integer(n + 1));
    if let Some(cap) = g.domain.precision() {
        if u64::from(cap) < n + 1 {
            return Err(DuError::Unrepresentable(format!("depth {n} exceeds the digit precision {cap}")));
        }
    }
    build_series(&g.domain, &nodes, prec)
}

/// Materialization together with its certificate against the exact profile nodes.
pub fn materialize_certified(g: &ProfileElement, n: u64) -> Result<(Series, Certificate), DuError> {
    let series = materialize(g, n)?;
    let nodes = g.nodes(n)?;
    let target = PLConvexFn::from_nodes(nodes.iter().map(|a| (a.index.clone(), a.target.clone())).collect()).ok();
    let cert = certify(nodes, target.as_ref(), &series);
    Ok((series, cert))
}

/// Asymptotic Legendre transform `c_norm s^mu` of the profile, `c_norm = (c / c_mu)^{1 - mu}`.
#[allow(non_snake_case)]
pub fn symbolic_LN(g: &ProfileElement) -> PowerLaw {
    let mu = g.mu();
    let cm = c_mu(&mu).expect("mu in (0, 1) for r > 0").interval();
    let ratio = RationalInterval { lo: &g.c / &cm.hi, hi: &g.c / &cm.lo };
    // 1 - mu = d / b
    let one_minus = BigRational::one() - &mu;
    let (d, b) = (one_minus.numer().to_u32().expect("small"), one_minus.denom().to_u32().expect("small"));
    let coeff = power_enclosure(&ratio, d, b, ENCLOSURE_BITS);
    PowerLaw { coeff: coeff.simplest(), exponent: mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::legendre_eval;
    use crate::value::GaussParam;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn f2() -> CoefficientDomain {
        CoefficientDomain::perfect(2).unwrap()
    }

    #[test]
    fn minimal_denominator_search() {
        let a =
            approximate_node(&Exponent::integer(3), &RationalInterval::point(q(1, 3)), 2, DeviationRule::InverseSquare)
                .unwrap();
        assert_eq!((a.k, a.q.clone(), a.deviation.clone()), (2, q(1, 4), q(1, 12)));
        let exact =
            approximate_node(&Exponent::integer(5), &RationalInterval::point(q(3, 8)), 2, DeviationRule::Default)
                .unwrap();
        assert_eq!((exact.q, exact.deviation), (q(3, 8), q(0, 1)));
    }

    #[test]
    fn half_profile_two_terms() {
        let g = ProfileElement::new(f2(), q(1, 4), q(1, 1), DeviationRule::Default).unwrap();
        let s = materialize(&g, 2).unwrap();
        let qs: Vec<_> = s.terms().map(|(_, a)| a.min_exponent().unwrap().as_rational().clone()).collect();
        assert_eq!(qs, vec![q(1, 4), q(1, 8)]);
        assert_eq!(s.prec(), &Precision::Finite(Exponent::integer(3)));
        assert_eq!(materialize(&g, 1).unwrap().len(), 1);
        assert!(materialize(&g, 0).is_err());
    }

    #[test]
    fn symbolic_exponents() {
        let g = ProfileElement::new(f2(), q(1, 4), q(1, 1), DeviationRule::Default).unwrap();
        assert_eq!(symbolic_LN(&g), PowerLaw { coeff: q(1, 1), exponent: q(1, 2) });
        let h = ProfileElement::new(f2(), q(1, 1), q(2, 1), DeviationRule::Default).unwrap();
        assert_eq!(symbolic_LN(&h).exponent, q(2, 3));
        assert_eq!(h.rule, DeviationRule::RelativeToIndex);
        assert!(ProfileElement::new(f2(), q(1, 1), q(0, 1), DeviationRule::Default).is_err());
    }

    #[test]
    fn harmonic_targets_certificate() {
        let targets: Vec<_> = (1..=8).map(|i| (Exponent::integer(i), q(1, i as i64))).collect();
        let (series, cert) = discretely_approximate(&targets, &f2(), DeviationRule::Default).unwrap();
        assert_eq!(series.len(), 8);
        assert!(cert.holds);
        assert!(cert.max_deviation <= q(1, 1));
        assert!(cert.hull_deviation <= Value::Finite(cert.max_deviation.clone()));
    }

    #[test]
    fn bad_targets_rejected() {
        let up = vec![(Exponent::integer(1), q(1, 2)), (Exponent::integer(2), q(1, 1))];
        assert!(matches!(discretely_approximate(&up, &f2(), DeviationRule::Default), Err(DuError::Rejected(_))));
        let concave =
            vec![(Exponent::integer(1), q(3, 1)), (Exponent::integer(2), q(5, 2)), (Exponent::integer(3), q(1, 1))];
        let err = discretely_approximate(&concave, &f2(), DeviationRule::Default).unwrap_err();
        assert!(err.to_string().contains("(2, 5/2)"), "{err}");
    }

    #[test]
    fn scaled_profile_tracks_power_law() {
        let mu = q(1, 2);
        let g = ProfileElement::for_mu(f2(), &mu, 256, 2f64.powi(-8)).unwrap();
        let law = symbolic_LN(&g);
        let np = newton_polygon(&materialize(&g, 256).unwrap()).unwrap();
        let s = GaussParam::dyadic(5);
        let got = legendre_eval(&np, &s).to_f64();
        let ratio = got / law.eval_f64(s.to_f64());
        assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    }
}
