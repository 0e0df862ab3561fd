//! Values checked against independent brute-force computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use proptest::prelude::*;

use npf_core::duconstruct::{example_sup, inverse_legendre_power, symbolic_LN, DeviationRule, ProfileElement};
use npf_core::literal::parse_series;
use npf_core::polygon::{legendre_eval, newton_polygon, verify_npf};
use npf_core::series::{gauss_valuation, Mode};
use npf_core::{Coefficient, CoefficientDomain, Exponent, GaussParam, Precision, Series, Value};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn digits(f: &Series, len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    for (i, a) in f.terms() {
        out[usize::try_from(i.floor()).unwrap()] = i64::try_from(a.constant_term()).unwrap();
    }
    out
}

fn base_p(mut n: BigInt, p: u32, len: u32) -> Vec<i64> {
    let pb = BigInt::from(p);
    n = n.mod_floor(&Pow::pow(&pb, len));
    (0..len)
        .map(|_| {
            let (qq, r) = n.div_mod_floor(&pb);
            n = qq;
            i64::try_from(r).unwrap()
        })
        .collect()
}

fn int_series(p: u32, n: u32, terms: &[(u32, i64)]) -> Series {
    let d = CoefficientDomain::padic(p, n).unwrap();
    let t = terms.iter().map(|(i, c)| (Exponent::integer((*i).into()), Coefficient::constant(*c)));
    Series::new(d, Mode::Arithmetic, t, Precision::Finite(Exponent::integer(n.into()))).unwrap()
}

fn int_value(p: u32, terms: &[(u32, i64)]) -> BigInt {
    terms.iter().map(|(i, c)| BigInt::from(*c) * Pow::pow(BigInt::from(p), *i)).sum()
}

proptest! {
    #[test]
    fn product_digits_match_integer_product(
        p in prop::sample::select(vec![2u32, 3, 5]),
        f in prop::collection::vec((0u32..32, -200i64..200), 1..6),
        g in prop::collection::vec((0u32..32, -200i64..200), 1..6),
    ) {
        let (sf, sg) = (int_series(p, 32, &f), int_series(p, 32, &g));
        let prod = sf.mul(&sg).unwrap();
        prop_assert_eq!(digits(&prod, 32), base_p(int_value(p, &f) * int_value(p, &g), p, 32));
    }

    #[test]
    fn sum_digits_match_integer_sum(
        p in prop::sample::select(vec![2u32, 3, 5]),
        f in prop::collection::vec((0u32..32, -200i64..200), 1..6),
        g in prop::collection::vec((0u32..32, -200i64..200), 1..6),
    ) {
        let sum = int_series(p, 32, &f).add(&int_series(p, 32, &g)).unwrap();
        prop_assert_eq!(digits(&sum, 32), base_p(int_value(p, &f) + int_value(p, &g), p, 32));
    }
}

#[test]
fn coset_oracle_for_half_exponents() {
    // 3 p^{1/2} + 1 in base 2: coset 1/2 holds 3 = 1 + 2, coset 0 holds 1.
    let d = CoefficientDomain::padic(2, 32).unwrap();
    let f = parse_series("3*p^{1/2} + 1", &d, Mode::Arithmetic).unwrap();
    let support: Vec<String> = f.support().map(|e| e.to_string()).collect();
    assert_eq!(support, vec!["0", "1/2", "3/2"]);
}

/// Nonincreasing lower convex hull by exhaustion: the least value at `x` over
/// points left of `x` and chords spanning `x`.
fn hull_oracle(points: &[(BigRational, BigRational)], x: &BigRational) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    let mut offer = |v: BigRational| {
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    };
    for (xi, yi) in points {
        if xi <= x {
            offer(yi.clone());
        }
        for (xj, yj) in points {
            if xi < x && x < xj {
                offer(yi + (yj - yi) * (x - xi) / (xj - xi));
            }
        }
    }
    best
}

proptest! {
    #[test]
    fn polygon_matches_exhaustive_hull(
        pts in prop::collection::btree_map(0i64..24, 0i64..24, 1..8),
    ) {
        // exponents in quarters over F_2
        let d = CoefficientDomain::perfect(2).unwrap();
        let terms = pts.iter().map(|(i, v)| (Exponent::ratio(*i, 4), Coefficient::x_pow(Exponent::ratio(*v, 4))));
        let f = Series::formal(d, terms).unwrap();
        let np = newton_polygon(&f).unwrap();
        let raw: Vec<(BigRational, BigRational)> = pts.iter().map(|(i, v)| (q(*i, 4), q(*v, 4))).collect();
        for k in 0..=2 * 24 {
            let x = q(k, 8);
            let want = hull_oracle(&raw, &x).map(Value::Finite).unwrap_or(Value::Infinite);
            prop_assert_eq!(np.eval(&x), want, "x = {}", x);
        }
    }
}

#[test]
fn hull_examples_by_oracle() {
    let d = CoefficientDomain::perfect(3).unwrap();
    let f = parse_series("x^{2} + x*t + t^{2}", &d, Mode::Formal).unwrap();
    let nodes: Vec<_> = newton_polygon(&f).unwrap().nodes().to_vec();
    assert_eq!(nodes, vec![(Exponent::zero(), q(2, 1)), (Exponent::integer(2), q(0, 1))]);
    let raw = [(q(0, 1), q(2, 1)), (q(1, 1), q(1, 1)), (q(2, 1), q(0, 1))];
    assert_eq!(hull_oracle(&raw, &q(1, 1)), Some(q(1, 1)));

    let g = parse_series("x + x^{2}*t", &d, Mode::Formal).unwrap();
    let np = newton_polygon(&g).unwrap();
    assert_eq!(np.nodes(), &[(Exponent::zero(), q(1, 1))]);
    assert_eq!(hull_oracle(&[(q(0, 1), q(1, 1)), (q(1, 1), q(2, 1))], &q(1, 1)), Some(q(1, 1)));
}

#[test]
fn npf_example_against_direct_expansion() {
    // (x + t)(x + 2t) = x^2 + 3xt + 2t^2 = x^2 + 2t^2 over F_3
    let d = CoefficientDomain::perfect(3).unwrap();
    let f = parse_series("x + t", &d, Mode::Formal).unwrap();
    let g = parse_series("x + 2*t", &d, Mode::Formal).unwrap();
    let expanded = parse_series("x^{2} + 2*t^{2}", &d, Mode::Formal).unwrap();
    assert_eq!(f.mul(&g).unwrap(), expanded);
    let grid = [GaussParam::ratio(1, 2), GaussParam::integer(1), GaussParam::integer(2)];
    for s in &grid {
        // min(2, 2s) by hand
        let direct = Value::Finite(q(2, 1).min(s.as_rational() * q(2, 1)));
        assert_eq!(gauss_valuation(&expanded, s).value, direct);
        assert_eq!(legendre_eval(&newton_polygon(&expanded).unwrap(), s), direct);
    }
    assert!(verify_npf(&f, &g, &grid).unwrap().passed());
}

/// Plain geometric-grid minimum of `c x^{-r} + s x`, no refinement.
fn dense_min(c: f64, r: f64, s: f64) -> f64 {
    let n = 400_000;
    (0..=n)
        .map(|k| {
            let x = 10f64.powf(-6.0 + 12.0 * k as f64 / n as f64);
            c * x.powf(-r) + s * x
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn legendre_constants_against_dense_grid() {
    for (num, den) in [(1, 2), (2, 3), (1, 4), (3, 8), (7, 8)] {
        let mu = q(num, den);
        let inv = inverse_legendre_power(&mu).unwrap();
        let (c, r, m) = (inv.c.to_f64(), num as f64 / (den - num) as f64, num as f64 / den as f64);
        for j in [1, 5, 13, 20] {
            let s = j as f64 / 20.0;
            let got = dense_min(c, r, s);
            assert!(((got - s.powf(m)) / s.powf(m)).abs() < 1e-6, "mu = {mu}, s = {s}: {got}");
        }
    }
    let half = inverse_legendre_power(&q(1, 2)).unwrap();
    assert_eq!(half.c.exact(), Some(&q(1, 4)));
    assert!((dense_min(0.25, 1.0, 0.3) - 0.3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn profile_legendre_exponent() {
    let d = CoefficientDomain::perfect(2).unwrap();
    let g = ProfileElement::new(d, q(1, 4), q(1, 1), DeviationRule::Default).unwrap();
    assert_eq!(symbolic_LN(&g).exponent, q(1, 2));
}

#[test]
fn example_sup_limit_and_monotonicity() {
    for s in [GaussParam::integer(1), GaussParam::ratio(1, 3), GaussParam::integer(5)] {
        let ex = example_sup(&s, 40).unwrap();
        let limit = Value::Finite(BigRational::from_integer(1.into()) + s.as_rational() * q(2, 1));
        assert_eq!(ex.limit, limit);
        assert!(ex.partial_values.iter().all(|v| *v > limit));
        assert!(ex.partial_values.windows(2).all(|w| w[1] < w[0]));
        // every term value is (1 + 1/n) + s (2 - delta_n)
        let last = ex.partial_values.last().unwrap().finite().unwrap().clone();
        assert!(last - limit.finite().unwrap() > BigRational::zero());
    }
}
