//! Gauss valuations `v_s(f) = min_i (v(a_i) + s i)` and the restriction,
//! witness and localization machinery around `argnorm`.

use std::ops::Bound;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{Series, SeriesError};
use crate::value::{serialize_rational, Exponent, GaussParam, Precision, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussValue {
    pub value: Value,
    /// False when unrepresented terms beyond the frontier could still lower the value.
    pub exact: bool,
}

/// `v(a_i) + s i` for one stored term.
pub fn term_value(f: &Series, i: &Exponent, s: &GaussParam) -> Value {
    let a = f.coefficient(i).expect("index in support");
    let base = f.domain().base_valuation_at(a, s).expect("series coefficients are validated on construction");
    &base + &Value::Finite(s.scale(i))
}

fn term_values<'a>(f: &'a Series, s: &'a GaussParam) -> impl Iterator<Item = (&'a Exponent, Value)> + 'a {
    f.support().map(move |i| (i, term_value(f, i, s)))
}

pub fn gauss_valuation(f: &Series, s: &GaussParam) -> GaussValue {
    let value = term_values(f, s).map(|(_, v)| v).min().unwrap_or(Value::Infinite);
    let exact = match f.prec() {
        Precision::Infinite => true,
        // anything beyond the frontier is worth at least s * prec
        Precision::Finite(p) => Value::Finite(s.scale(p)) >= value,
    };
    GaussValue { value, exact }
}

/// Smallest index attaining the Gauss valuation.
pub fn argnorm(f: &Series, s: &GaussParam) -> Result<Exponent, SeriesError> {
    let mut best: Option<(&Exponent, Value)> = None;
    for (i, v) in term_values(f, s) {
        match &best {
            Some((_, b)) if v >= *b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i.clone()).ok_or(SeriesError::ZeroSeries)
}

/// Index window with arbitrary open/closed ends.
pub type Window = (Bound<Exponent>, Bound<Exponent>);

fn in_window(w: &Window, i: &Exponent) -> bool {
    let lo = match &w.0 {
        Bound::Included(a) => i >= a,
        Bound::Excluded(a) => i > a,
        Bound::Unbounded => true,
    };
    let hi = match &w.1 {
        Bound::Included(b) => i <= b,
        Bound::Excluded(b) => i < b,
        Bound::Unbounded => true,
    };
    lo && hi
}

/// Terms with index in `window` whose value `v(a_i) + s i` is at most `threshold`.
pub fn restrict(f: &Series, window: &Window, threshold: &Value, s: &GaussParam) -> Series {
    let terms: Vec<_> = f
        .terms()
        .filter(|(i, _)| in_window(window, i))
        .filter(|(i, _)| term_value(f, i, s) <= *threshold)
        .map(|(i, a)| (i.clone(), a.clone()))
        .collect();
    Series::from_canonical_parts(f.domain().clone(), f.mode(), terms.into_iter().collect(), f.prec().clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxWitness {
    pub argnorm: Exponent,
    pub epsilon: Exponent,
    #[serde(serialize_with = "serialize_rational")]
    pub delta: BigRational,
}

fn half(q: BigRational) -> BigRational {
    q / BigRational::from_integer(2.into())
}

/// Box window `(argnorm, argnorm + epsilon)` that is empty at threshold `v + delta`.
pub fn box_witness(f: &Series, s: &GaussParam) -> Result<BoxWitness, SeriesError> {
    let arg = argnorm(f, s)?;
    let v = gauss_valuation(f, s).value;
    let epsilon =
        f.support().find(|i| **i > arg).and_then(|next| next.checked_sub(&arg)).unwrap_or_else(|| Exponent::integer(1));
    let next_value = term_values(f, s).map(|(_, tv)| tv).filter(|tv| *tv > v).min();
    let delta = match (next_value, &v) {
        (Some(Value::Finite(n)), Value::Finite(v)) => half(n - v),
        _ => BigRational::one(),
    };
    Ok(BoxWitness { argnorm: arg, epsilon, delta })
}

/// `delta_b` clearing the bar window `[0, argnorm - epsilon)` at threshold `v + delta_b`.
pub fn bar_witness(f: &Series, s: &GaussParam, epsilon: &Exponent) -> Result<BigRational, SeriesError> {
    let arg = argnorm(f, s)?;
    let v = gauss_valuation(f, s).value;
    let Some(edge) = arg.checked_sub(epsilon) else {
        return Ok(BigRational::one());
    };
    let window_min = term_values(f, s).filter(|(i, _)| **i < edge).map(|(_, tv)| tv).min();
    Ok(match (window_min, v) {
        (Some(Value::Finite(m)), Value::Finite(v)) => half(m - v),
        _ => BigRational::one(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Localization {
    pub f_local: Series,
    pub g_local: Series,
    pub epsilon_f: Exponent,
    pub epsilon_g: Exponent,
    #[serde(serialize_with = "serialize_rational")]
    pub delta: BigRational,
    /// `v_s(f) + v_s(g)`, the value the product must take.
    pub prediction: Value,
}

fn near_argnorm(f: &Series, s: &GaussParam, epsilon: &Exponent, threshold: &Value) -> Result<Series, SeriesError> {
    let arg = argnorm(f, s)?;
    let lo = match arg.checked_sub(epsilon) {
        Some(e) => Bound::Excluded(e),
        None => Bound::Unbounded,
    };
    Ok(restrict(f, &(lo, Bound::Included(arg)), threshold, s))
}

/// Cuts `f` and `g` down to boxes around their argnorms: box widths come from
/// the Box witnesses, bar widths are chosen strictly inside the partner's box,
/// and `delta` is half the smallest of the four height witnesses.
pub fn localize(f: &Series, g: &Series, s: &GaussParam) -> Result<Localization, SeriesError> {
    f.check_compatible(g)?;
    let box_f = box_witness(f, s)?;
    let box_g = box_witness(g, s)?;
    let two = BigRational::from_integer(2.into());
    let epsilon_f = Exponent::new(box_g.epsilon.as_rational() / &two).expect("positive");
    let epsilon_g = Exponent::new(box_f.epsilon.as_rational() / &two).expect("positive");
    let bar_f = bar_witness(f, s, &epsilon_f)?;
    let bar_g = bar_witness(g, s, &epsilon_g)?;
    let smallest =
        [&box_f.delta, &bar_f, &box_g.delta, &bar_g].into_iter().min().cloned().unwrap_or_else(BigRational::one);
    let delta = half(smallest);
    debug_assert!(delta > BigRational::zero());
    let vf = gauss_valuation(f, s).value;
    let vg = gauss_valuation(g, s).value;
    let f_local = near_argnorm(f, s, &epsilon_f, &(&vf + &Value::Finite(delta.clone())))?;
    let g_local = near_argnorm(g, s, &epsilon_g, &(&vg + &Value::Finite(delta.clone())))?;
    Ok(Localization { f_local, g_local, epsilon_f, epsilon_g, delta, prediction: &vf + &vg })
}
