//! Seeded property suites. Every suite draws from its own ChaCha stream derived
//! from the run seed, so reports are byte-identical across runs and platforms.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::domains::{Coefficient, CoefficientDomain};
use crate::duconstruct::{
    chain_report, classify, discretely_approximate, in_m, materialize, DeviationRule, PowerLaw, ProfileElement, Verdict,
};
use crate::literal::parse_series;
use crate::polygon::{legendre_eval, newton_polygon, sup_distance};
use crate::series::{
    argnorm, bar_witness, box_witness, canonicalize, gauss_valuation, localize, term_value, Mode, Series,
};
use crate::value::{Exponent, GaussParam, Precision, Value};

/// Suite names accepted by [`run_verify`], in `all` order.
pub const SUITES: &[&str] = &[
    "domains",
    "multiplicativity",
    "triangle",
    "submultiplicativity",
    "support",
    "canonicalize",
    "carrying",
    "concavity",
    "commutation",
    "hull-stability",
    "legendre-monotone",
    "legendre-translate",
    "polygon-product",
    "witnesses",
    "localize",
    "approx",
    "classify",
    "chain",
    "ideal",
    "roundtrip",
];

/// Digit precision of arithmetic domains drawn by the suites.
pub const SUITE_PRECISION: u32 = 32;

const PRIMES: [u32; 3] = [2, 3, 5];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}` (expected one of: all, {list})", list = SUITES.join(", "))]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub f: String,
    pub g: String,
    pub s: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub witness: Option<Witness>,
    #[serde(skip)]
    witness_size: usize,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), checked: 0, skipped: 0, witness: None, witness_size: usize::MAX }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    /// Records one check; among failures the one with the fewest terms is kept.
    fn check(&mut self, ok: bool, size: usize, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok && size < self.witness_size {
            self.witness_size = size;
            self.witness = Some(witness());
        }
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "suite {}: {status} (checked {}, skipped {})", self.name, self.checked, self.skipped)?;
        if let Some(w) = &self.witness {
            write!(f, "\n  witness f = {}\n  witness g = {}\n  witness s = {}\n  detail: {}", w.f, w.g, w.s, w.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub cases: usize,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify {} cases={} seed={}", self.suite, self.cases, self.seed)?;
        for s in &self.suites {
            writeln!(f, "{s}")?;
        }
        let failed = self.suites.iter().filter(|s| !s.passed()).count();
        let status = if failed == 0 { "PASS" } else { "FAIL" };
        write!(f, "result: {status} ({} suites, {failed} failed)", self.suites.len())
    }
}

fn suite_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs one suite (or `all`) with `cases` random instances per primary check.
pub fn run_verify(suite: &str, cases: usize, seed: u64) -> Result<VerifyReport, VerifyError> {
    let selected: Vec<usize> = if suite == "all" {
        (0..SUITES.len()).collect()
    } else {
        vec![SUITES.iter().position(|s| *s == suite).ok_or_else(|| VerifyError::UnknownSuite(suite.to_string()))?]
    };
    let suites = selected
        .into_iter()
        .map(|idx| {
            let mut rng = suite_rng(seed, idx);
            let mut rep = SuiteReport::new(SUITES[idx]);
            let run: fn(&mut ChaCha8Rng, usize, &mut SuiteReport) = match SUITES[idx] {
                "domains" => suite_domains,
                "multiplicativity" => suite_multiplicativity,
                "triangle" => suite_triangle,
                "submultiplicativity" => suite_submultiplicativity,
                "support" => suite_support,
                "canonicalize" => suite_canonicalize,
                "carrying" => suite_carrying,
                "concavity" => suite_concavity,
                "commutation" => suite_commutation,
                "hull-stability" => suite_hull_stability,
                "legendre-monotone" => suite_legendre_monotone,
                "legendre-translate" => suite_legendre_translate,
                "polygon-product" => suite_polygon_product,
                "witnesses" => suite_witnesses,
                "localize" => suite_localize,
                "approx" => suite_approx,
                "classify" => suite_classify,
                "chain" => suite_chain,
                "ideal" => suite_ideal,
                "roundtrip" => suite_roundtrip,
                other => unreachable!("suite table out of sync: {other}"),
            };
            run(&mut rng, cases, &mut rep);
            rep
        })
        .collect();
    Ok(VerifyReport { suite: suite.to_string(), cases, seed, suites })
}

// ---------------------------------------------------------------- generators

fn half(cases: usize) -> usize {
    cases.div_ceil(2)
}

fn prime(rng: &mut ChaCha8Rng) -> u32 {
    *PRIMES.choose(rng).expect("nonempty")
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `num / p^e` with `0 <= num / p^e <= max`.
fn p_adic_fraction(rng: &mut ChaCha8Rng, p: u32, max_e: u32, max: i64) -> Exponent {
    let den = i64::from(p).pow(rng.gen_range(0..=max_e));
    Exponent::ratio(rng.gen_range(0..=max * den), den)
}

fn gauss_param(rng: &mut ChaCha8Rng) -> GaussParam {
    GaussParam::ratio(rng.gen_range(1..=16), rng.gen_range(1..=8))
}

fn gauss_grid(rng: &mut ChaCha8Rng, n: usize) -> Vec<GaussParam> {
    (0..n).map(|_| gauss_param(rng)).collect()
}

fn perfect_coeff(rng: &mut ChaCha8Rng, p: u32) -> Coefficient {
    let mut a = Coefficient::zero();
    while a.is_zero() {
        for _ in 0..rng.gen_range(1..=2) {
            a.add_monomial(p_adic_fraction(rng, p, 2, 3), BigInt::from(rng.gen_range(1..p)));
        }
        a = a.map_coefficients(|c| c.mod_floor(&BigInt::from(p)));
    }
    a
}

fn formal_series(rng: &mut ChaCha8Rng, p: u32) -> Series {
    let d = CoefficientDomain::perfect(p).expect("prime");
    let n = rng.gen_range(1..=4);
    let terms: Vec<_> = (0..n).map(|_| (p_adic_fraction(rng, p, 2, 4), perfect_coeff(rng, p))).collect();
    let f = Series::formal(d, terms).expect("valid terms");
    if f.is_zero() {
        return formal_series(rng, p);
    }
    f
}

/// Indices stay below half the digit precision so products remain exact.
fn arith_index(rng: &mut ChaCha8Rng) -> Exponent {
    let den = rng.gen_range(1..=3);
    Exponent::ratio(rng.gen_range(0..(i64::from(SUITE_PRECISION) / 2) * den), den)
}

fn padic_series(rng: &mut ChaCha8Rng, p: u32) -> Series {
    let d = CoefficientDomain::padic(p, SUITE_PRECISION).expect("prime");
    let bound = i64::from(p * p);
    let n = rng.gen_range(1..=4);
    let terms: Vec<_> =
        (0..n).map(|_| (arith_index(rng), Coefficient::constant(rng.gen_range(-bound..=bound)))).collect();
    let f = Series::new(d, Mode::Arithmetic, terms, Precision::Finite(Exponent::integer(SUITE_PRECISION.into())))
        .expect("indices below the modulus");
    if f.is_zero() {
        return padic_series(rng, p);
    }
    f
}

/// Nonnegative integer coefficients; negative ones would expand to all `N` digits.
fn mixed_coeff(rng: &mut ChaCha8Rng, p: u32) -> Coefficient {
    let bound = i64::from(p * p);
    let mut a = Coefficient::zero();
    for _ in 0..rng.gen_range(1..=3) {
        a.add_monomial(p_adic_fraction(rng, p, 1, 3), BigInt::from(rng.gen_range(0..=bound)));
    }
    a
}

fn mixed_series(rng: &mut ChaCha8Rng, p: u32) -> Series {
    let d = CoefficientDomain::mixed(p, SUITE_PRECISION).expect("prime");
    let n = rng.gen_range(1..=3);
    let terms: Vec<_> = (0..n).map(|_| (arith_index(rng), mixed_coeff(rng, p))).collect();
    let f = Series::new(d, Mode::Arithmetic, terms, Precision::Finite(Exponent::integer(SUITE_PRECISION.into())))
        .expect("indices below the modulus");
    if f.is_zero() {
        return mixed_series(rng, p);
    }
    f
}

#[derive(Clone, Copy)]
enum Family {
    Formal,
    Padic,
    Mixed,
}

/// Nonzero pair drawn from one family with a shared prime.
fn pair(rng: &mut ChaCha8Rng, family: Family) -> (Series, Series) {
    let p = prime(rng);
    let draw = |rng: &mut ChaCha8Rng| match family {
        Family::Formal => formal_series(rng, p),
        Family::Padic => padic_series(rng, p),
        Family::Mixed => mixed_series(rng, p),
    };
    let f = draw(rng);
    let g = draw(rng);
    (f, g)
}

fn witness(f: &Series, g: Option<&Series>, s: Option<&GaussParam>, detail: String) -> Witness {
    Witness {
        f: f.to_string(),
        g: g.map(|g| g.to_string()).unwrap_or_else(|| "-".into()),
        s: s.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
        detail,
    }
}

// ---------------------------------------------------------------- suites

fn suite_domains(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let perfect = CoefficientDomain::perfect(p).expect("prime");
        let (a, b) = (perfect_coeff(rng, p), perfect_coeff(rng, p));
        let va = perfect.coeff_valuation(&a).expect("valid");
        let vb = perfect.coeff_valuation(&b).expect("valid");
        let vab = perfect.coeff_valuation(&perfect.mul(&a, &b)).expect("valid");
        rep.check(vab == &va + &vb, a.len() + b.len(), || Witness {
            f: a.to_string(),
            g: b.to_string(),
            s: "-".into(),
            detail: format!("v(ab) = {vab}, v(a) + v(b) = {}", &va + &vb),
        });

        let mixed = CoefficientDomain::mixed(p, SUITE_PRECISION).expect("prime");
        let digit = mixed.reduce_mod_p(&mixed_coeff(rng, p));
        if !digit.is_zero() {
            let values: BTreeSet<Value> =
                (0..10).map(|_| mixed.base_valuation_at(&digit, &gauss_param(rng)).expect("valid")).collect();
            rep.check(values.len() == 1, digit.len(), || Witness {
                f: digit.to_string(),
                g: "-".into(),
                s: "10 samples".into(),
                detail: format!("digit valuation varies with s: {values:?}"),
            });
        }

        let padic = CoefficientDomain::padic(p, SUITE_PRECISION).expect("prime");
        let n = BigInt::from(rng.gen_range(1..=1000i64));
        let s = gauss_param(rng);
        let plain = padic.base_valuation_at(&Coefficient::constant(n.clone()), &s).expect("valid");
        let shifted = padic.base_valuation_at(&Coefficient::constant(&n * BigInt::from(p)), &s).expect("valid");
        rep.check(shifted == &plain + &Value::Finite(s.as_rational().clone()), 1, || Witness {
            f: n.to_string(),
            g: "-".into(),
            s: s.to_string(),
            detail: format!("v(p a) = {shifted}, v(a) = {plain}"),
        });

        let (m1, m2) = (mixed_coeff(rng, p), mixed_coeff(rng, p));
        let r = perfect.clone();
        let sum_ok = mixed.reduce_mod_p(&(&m1 + &m2)) == r.add(&mixed.reduce_mod_p(&m1), &mixed.reduce_mod_p(&m2));
        let mul_ok = mixed.reduce_mod_p(&(&m1 * &m2)) == r.mul(&mixed.reduce_mod_p(&m1), &mixed.reduce_mod_p(&m2));
        rep.check(sum_ok && mul_ok, m1.len() + m2.len(), || Witness {
            f: m1.to_string(),
            g: m2.to_string(),
            s: "-".into(),
            detail: format!("reduction mod p: additive {sum_ok}, multiplicative {mul_ok}"),
        });
    }
}

fn multiplicative_checks(rng: &mut ChaCha8Rng, family: Family, pairs: usize, equality: bool, rep: &mut SuiteReport) {
    for _ in 0..pairs {
        let (f, g) = pair(rng, family);
        let fg = f.mul(&g).expect("compatible");
        for s in gauss_grid(rng, 5) {
            let (vf, vg, vfg) = (gauss_valuation(&f, &s), gauss_valuation(&g, &s), gauss_valuation(&fg, &s));
            if !(vf.exact && vg.exact && vfg.exact) {
                rep.skip();
                continue;
            }
            let sum = &vf.value + &vg.value;
            let ok = if equality { vfg.value == sum } else { vfg.value >= sum };
            rep.check(ok, f.len() + g.len(), || {
                witness(&f, Some(&g), Some(&s), format!("v_s(fg) = {}, v_s(f) + v_s(g) = {sum}", vfg.value))
            });
        }
    }
}

fn suite_multiplicativity(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    multiplicative_checks(rng, Family::Formal, cases, true, rep);
    multiplicative_checks(rng, Family::Padic, half(cases), true, rep);
}

fn suite_submultiplicativity(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    multiplicative_checks(rng, Family::Formal, cases, false, rep);
    multiplicative_checks(rng, Family::Padic, half(cases), false, rep);
    multiplicative_checks(rng, Family::Mixed, half(cases), false, rep);
}

fn suite_triangle(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for (family, n) in [(Family::Formal, cases), (Family::Padic, half(cases)), (Family::Mixed, half(cases))] {
        for _ in 0..n {
            let (f, g) = pair(rng, family);
            let sum = f.add(&g).expect("compatible");
            for s in gauss_grid(rng, 5) {
                let (vf, vg, vs) = (gauss_valuation(&f, &s), gauss_valuation(&g, &s), gauss_valuation(&sum, &s));
                if !(vf.exact && vg.exact && vs.exact) {
                    rep.skip();
                    continue;
                }
                let lo = vf.value.min_with(&vg.value);
                let ok = vs.value >= lo && (vf.value == vg.value || vs.value == lo);
                rep.check(ok, f.len() + g.len(), || {
                    witness(&f, Some(&g), Some(&s), format!("v_s(f+g) = {}, min = {lo}", vs.value))
                });
            }
        }
    }
}

fn suite_support(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for (family, n) in [(Family::Formal, cases), (Family::Padic, half(cases))] {
        for _ in 0..n {
            let (f, g) = pair(rng, family);
            let (fg, trace) = f.mul_traced(&g).expect("compatible");
            let sums: Vec<Exponent> = f.support().flat_map(|i| g.support().map(move |j| i + j)).collect();
            let arithmetic = matches!(family, Family::Padic);
            let reachable = |k: &Exponent| {
                sums.iter().any(|b| match k.checked_sub(b) {
                    Some(d) => d.is_zero() || (arithmetic && d.is_integer()),
                    None => false,
                })
            };
            let stray = fg.support().find(|k| !reachable(k)).cloned();
            rep.check(stray.is_none(), f.len() + g.len(), || {
                witness(&f, Some(&g), None, format!("product index {} outside supp f + supp g", stray.clone().unwrap()))
            });
            let support: BTreeSet<&Exponent> = fg.support().collect();
            let links_ok = trace.links().iter().all(|l| {
                let d = l.k.checked_sub(&(&l.i + &l.j));
                support.contains(&l.k)
                    && match d {
                        Some(d) => d.is_zero() || (arithmetic && d.is_integer()),
                        None => false,
                    }
            });
            let fed = fg.support().all(|k| trace.contributors(k).next().is_some());
            rep.check(links_ok && fed, f.len() + g.len(), || {
                witness(&f, Some(&g), None, format!("carry trace: links valid {links_ok}, every digit fed {fed}"))
            });
        }
    }
}

/// Base-`p` digits of `n mod p^len`, least significant first.
fn digits_mod(n: &BigInt, p: u32, len: u32) -> Vec<u32> {
    let pb = BigInt::from(p);
    let mut n = n.mod_floor(&Pow::pow(&pb, len));
    (0..len)
        .map(|_| {
            let (q, r) = n.div_mod_floor(&pb);
            n = q;
            u32::try_from(r).expect("digit")
        })
        .collect()
}

fn integer_series(rng: &mut ChaCha8Rng, p: u32) -> (Vec<(u32, i64)>, BigInt) {
    let bound = i64::from(p).pow(3);
    let terms: Vec<(u32, i64)> =
        (0..rng.gen_range(1..=5)).map(|_| (rng.gen_range(0..SUITE_PRECISION), rng.gen_range(-bound..=bound))).collect();
    let value = terms.iter().map(|(i, c)| BigInt::from(*c) * Pow::pow(BigInt::from(p), *i)).sum();
    (terms, value)
}

fn series_digits(f: &Series) -> Vec<u32> {
    let mut out = vec![0; SUITE_PRECISION as usize];
    for (i, a) in f.terms() {
        assert!(i.is_integer());
        let idx = usize::try_from(i.floor()).expect("small index");
        out[idx] = u32::try_from(a.constant_term()).expect("digit");
    }
    out
}

fn build_integer(p: u32, terms: &[(u32, i64)]) -> Series {
    let d = CoefficientDomain::padic(p, SUITE_PRECISION).expect("prime");
    let terms = terms.iter().map(|(i, c)| (Exponent::integer((*i).into()), Coefficient::constant(*c)));
    Series::new(d, Mode::Arithmetic, terms, Precision::Finite(Exponent::integer(SUITE_PRECISION.into())))
        .expect("indices below the modulus")
}

fn suite_canonicalize(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let f = if rng.gen_bool(0.5) { padic_series(rng, p) } else { mixed_series(rng, p) };
        let again = canonicalize(&f.to_raw());
        let ok = again.as_ref() == Ok(&f);
        rep.check(ok, f.len(), || witness(&f, None, None, format!("re-canonicalized to {again:?}")));

        let (terms, value) = integer_series(rng, p);
        let g = build_integer(p, &terms);
        let want = digits_mod(&value, p, SUITE_PRECISION);
        let got = series_digits(&g);
        rep.check(got == want, terms.len(), || {
            witness(&g, None, None, format!("digits {got:?} but base-{p} expansion of {value} is {want:?}"))
        });
    }
}

fn suite_carrying(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..half(cases) {
        let p = prime(rng);
        let (tf, vf) = integer_series(rng, p);
        let (tg, vg) = integer_series(rng, p);
        let (f, g) = (build_integer(p, &tf), build_integer(p, &tg));
        let fg = f.mul(&g).expect("compatible");
        let want = digits_mod(&(&vf * &vg), p, SUITE_PRECISION);
        let got = series_digits(&fg);
        rep.check(got == want, tf.len() + tg.len(), || {
            witness(&f, Some(&g), None, format!("product digits {got:?}, expected {want:?}"))
        });
    }
}

fn suite_concavity(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let f = if rng.gen_bool(0.5) { formal_series(rng, p) } else { padic_series(rng, p) };
        if f.is_zero() {
            rep.skip();
            continue;
        }
        let mut s: Vec<GaussParam> = gauss_grid(rng, 3);
        s.sort();
        s.dedup();
        if s.len() < 3 {
            rep.skip();
            continue;
        }
        let v: Vec<BigRational> =
            s.iter().map(|x| gauss_valuation(&f, x).value.finite().cloned().expect("nonzero")).collect();
        let (a, b, c) = (s[0].as_rational(), s[1].as_rational(), s[2].as_rational());
        let chord = ((c - b) * &v[0] + (b - a) * &v[2]) / (c - a);
        rep.check(v[1] >= chord, f.len(), || {
            witness(&f, None, Some(&s[1]), format!("v_s = {} below chord {chord}", v[1]))
        });
    }
}

fn suite_commutation(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for k in 0..cases + half(cases) {
        let p = prime(rng);
        let f = if k < cases { formal_series(rng, p) } else { padic_series(rng, p) };
        let Ok(np) = newton_polygon(&f) else {
            rep.skip();
            continue;
        };
        for s in gauss_grid(rng, 5) {
            let (l, v) = (legendre_eval(&np, &s), gauss_valuation(&f, &s).value);
            rep.check(l == v, f.len(), || witness(&f, None, Some(&s), format!("L(N(f)) = {l}, v_s(f) = {v}")));
        }
    }
}

/// `sum x^{v_i} t^i` from explicit point values.
fn point_series(p: u32, points: &[(Exponent, BigRational)]) -> Series {
    let d = CoefficientDomain::perfect(p).expect("prime");
    let terms =
        points.iter().map(|(i, v)| (i.clone(), Coefficient::x_pow(Exponent::new(v.clone()).expect("nonnegative"))));
    Series::formal(d, terms).expect("p-power denominators")
}

fn random_points(rng: &mut ChaCha8Rng, p: u32, n: std::ops::RangeInclusive<usize>) -> Vec<(Exponent, BigRational)> {
    let n = rng.gen_range(n);
    let mut idx: Vec<Exponent> = (0..n).map(|_| p_adic_fraction(rng, p, 1, 6)).collect();
    idx.sort();
    idx.dedup();
    idx.into_iter().map(|i| (i, p_adic_fraction(rng, p, 2, 5).into_rational() + BigRational::one())).collect()
}

fn suite_hull_stability(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let points = random_points(rng, p, 1..=6);
        let eps = ratio(1, i64::from(p).pow(rng.gen_range(0..=2)));
        let scale = i64::from(p).pow(3);
        let moved: Vec<_> = points
            .iter()
            .map(|(i, v)| {
                let d = ratio(rng.gen_range(-scale..=scale), scale) * &eps;
                (i.clone(), v + d)
            })
            .collect();
        let (f, g) = (point_series(p, &points), point_series(p, &moved));
        let dist = sup_distance(&newton_polygon(&f).expect("nonzero"), &newton_polygon(&g).expect("nonzero"));
        rep.check(dist <= Value::Finite(eps.clone()), points.len(), || {
            witness(&f, Some(&g), None, format!("polygon distance {dist} exceeds node perturbation {eps}"))
        });
    }
}

fn suite_legendre_monotone(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let points = random_points(rng, p, 1..=4);
        let used: BTreeSet<Exponent> = points.iter().map(|(i, _)| i.clone()).collect();
        let mut more = points.clone();
        more.extend(random_points(rng, p, 3..=3).into_iter().filter(|(i, _)| !used.contains(i)));
        more.sort();
        let (g, f) = (point_series(p, &points), point_series(p, &more));
        let (ng, nf) = (newton_polygon(&g).expect("nonzero"), newton_polygon(&f).expect("nonzero"));
        rep.check(nf.le(&ng), more.len(), || witness(&f, Some(&g), None, "extra points raised the polygon".into()));
        for s in gauss_grid(rng, 5) {
            let (lf, lg) = (legendre_eval(&nf, &s), legendre_eval(&ng, &s));
            rep.check(lf <= lg, more.len(), || witness(&f, Some(&g), Some(&s), format!("L(F) = {lf} > L(G) = {lg}")));
        }
    }
}

fn suite_legendre_translate(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let p = prime(rng);
        let f = point_series(p, &random_points(rng, p, 1..=5));
        let np = newton_polygon(&f).expect("nonzero");
        let dx = p_adic_fraction(rng, p, 2, 3);
        let dy = ratio(rng.gen_range(-20..=20), rng.gen_range(1..=6));
        let moved = np.translate(&dx, &dy);
        for s in gauss_grid(rng, 5) {
            let want = &legendre_eval(&np, &s) + &Value::Finite(&dy + s.scale(&dx));
            let got = legendre_eval(&moved, &s);
            rep.check(got == want, f.len(), || {
                witness(&f, None, Some(&s), format!("translate by ({dx}, {dy}): {got} != {want}"))
            });
        }
    }
}

fn suite_polygon_product(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let (f, g) = pair(rng, Family::Formal);
        let (Ok(nf), Ok(ng)) = (newton_polygon(&f), newton_polygon(&g)) else {
            rep.skip();
            continue;
        };
        let nfg = newton_polygon(&f.mul(&g).expect("compatible")).expect("a domain has no zero divisors");
        for s in gauss_grid(rng, 5) {
            let lhs = legendre_eval(&nfg, &s);
            let rhs = &legendre_eval(&nf, &s) + &legendre_eval(&ng, &s);
            rep.check(lhs == rhs, f.len() + g.len(), || {
                witness(&f, Some(&g), Some(&s), format!("L(N(fg)) = {lhs}, L(N f) + L(N g) = {rhs}"))
            });
        }
    }
}

/// Terms in `window` whose value is at most `threshold`, by a plain scan.
fn scan(f: &Series, s: &GaussParam, lo: Bound<&Exponent>, hi: &Exponent, threshold: &Value) -> usize {
    f.support()
        .filter(|i| match lo {
            Bound::Excluded(a) => *i > a,
            Bound::Included(a) => *i >= a,
            Bound::Unbounded => true,
        })
        .filter(|i| *i < hi)
        .filter(|i| term_value(f, i, s) <= *threshold)
        .count()
}

fn suite_witnesses(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for k in 0..cases {
        let p = prime(rng);
        let f = if k % 2 == 0 { formal_series(rng, p) } else { padic_series(rng, p) };
        if f.is_zero() {
            rep.skip();
            continue;
        }
        let s = gauss_param(rng);
        let v = gauss_valuation(&f, &s).value;
        let b = box_witness(&f, &s).expect("nonzero");
        let top = &b.argnorm + &b.epsilon;
        let hits = scan(&f, &s, Bound::Excluded(&b.argnorm), &top, &(&v + &Value::Finite(b.delta.clone())));
        let positive = b.delta.is_positive() && !b.epsilon.is_zero();
        rep.check(hits == 0 && positive, f.len(), || {
            witness(&f, None, Some(&s), format!("box ({}, {top}) at height {}: {hits} terms", b.argnorm, b.delta))
        });

        let arg = argnorm(&f, &s).expect("nonzero");
        let eps = Exponent::new(b.epsilon.as_rational() * ratio(1, rng.gen_range(1..=4))).expect("positive");
        let delta = bar_witness(&f, &s, &eps).expect("nonzero");
        let hits = match arg.checked_sub(&eps) {
            Some(edge) => scan(&f, &s, Bound::Unbounded, &edge, &(&v + &Value::Finite(delta.clone()))),
            None => 0,
        };
        rep.check(hits == 0 && delta.is_positive(), f.len(), || {
            witness(&f, None, Some(&s), format!("bar [0, {arg} - {eps}) at height {delta}: {hits} terms"))
        });
    }
}

fn suite_localize(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for k in 0..half(cases) {
        let family = if k % 2 == 0 { Family::Formal } else { Family::Padic };
        let (f, g) = pair(rng, family);
        if f.is_zero() || g.is_zero() {
            rep.skip();
            continue;
        }
        let s = gauss_param(rng);
        let loc = localize(&f, &g, &s).expect("nonzero");
        let fg = f.mul(&g).expect("compatible");
        let direct = gauss_valuation(&fg, &s);
        if !direct.exact {
            rep.skip();
            continue;
        }
        rep.check(loc.prediction == direct.value, f.len() + g.len(), || {
            witness(&f, Some(&g), Some(&s), format!("prediction {} but v_s(fg) = {}", loc.prediction, direct.value))
        });
        if matches!(family, Family::Formal) {
            let local = gauss_valuation(&loc.f_local.mul(&loc.g_local).expect("compatible"), &s).value;
            rep.check(local == loc.prediction, f.len() + g.len(), || {
                witness(&f, Some(&g), Some(&s), format!("localized product has value {local}"))
            });
        }
    }
}

fn suite_approx(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    let rules = [DeviationRule::Default, DeviationRule::RelativeToIndex, DeviationRule::InverseSquare];
    for _ in 0..cases.div_ceil(4) {
        let p = prime(rng);
        let n = rng.gen_range(1..=8);
        // decreasing slope magnitudes keep the targets convex
        let mut slopes: Vec<BigRational> = (0..n).map(|_| ratio(rng.gen_range(0..=12), rng.gen_range(1..=7))).collect();
        slopes.sort_by(|a, b| b.cmp(a));
        let mut g = ratio(rng.gen_range(1..=6), rng.gen_range(1..=5)) + slopes.iter().sum::<BigRational>();
        let mut targets = Vec::new();
        for (i, m) in (1..=n as u64).zip(&slopes) {
            targets.push((Exponent::integer(i), g.clone()));
            g -= m;
        }
        let rule = *rules.choose(rng).expect("nonempty");
        let domain = CoefficientDomain::perfect(p).expect("prime");
        let (series, cert) = discretely_approximate(&targets, &domain, rule).expect("convex targets");
        let lattice_ok = cert
            .nodes
            .iter()
            .all(|a| a.q.is_positive() && &Pow::pow(BigInt::from(p), a.k) % a.q.denom() == BigInt::zero());
        let bound_ok =
            cert.nodes.iter().zip(&targets).all(|(a, (i, t))| (&a.q - t).abs() <= rule.bound(i.as_rational(), t));
        let hull_ok = cert.hull_deviation <= Value::Finite(cert.max_deviation.clone());
        let size = targets.len();
        rep.check(cert.holds && lattice_ok && bound_ok && hull_ok && series.len() == size, size, || {
            witness(&series, None, None, format!("certificate {cert:?}"))
        });
    }
}

fn power_law(rng: &mut ChaCha8Rng) -> PowerLaw {
    PowerLaw::new(ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)), ratio(rng.gen_range(-4..=8), rng.gen_range(1..=4)))
        .expect("positive coefficient")
}

fn suite_classify(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    let rank = |v: Verdict| match v {
        Verdict::Omega => -1,
        Verdict::Theta => 0,
        Verdict::LittleO => 1,
    };
    for _ in 0..cases {
        let (f, g, h) = (power_law(rng), power_law(rng), power_law(rng));
        let (fg, gh, fh) = (classify(&f, &g), classify(&g, &h), classify(&f, &h));
        let flags = [fg, gh, fh].iter().all(|c| match c.verdict {
            Verdict::Omega => !c.in_o_sup && c.in_omega_sup,
            Verdict::LittleO => c.in_o_sup && !c.in_omega_sup,
            Verdict::Theta => c.in_o_sup && !c.in_omega_sup,
        });
        let (a, b, c) = (rank(fg.verdict), rank(gh.verdict), rank(fh.verdict));
        let composes = if a == b || b == 0 {
            c == a
        } else if a == 0 {
            c == b
        } else {
            true
        };
        rep.check(flags && composes, 3, || Witness {
            f: f.to_string(),
            g: g.to_string(),
            s: h.to_string(),
            detail: format!("verdicts {} {} {}", fg.verdict, gh.verdict, fh.verdict),
        });
    }
}

fn suite_chain(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    let domain = CoefficientDomain::perfect(2).expect("prime");
    for _ in 0..cases.div_ceil(20) {
        let den = rng.gen_range(2..=12);
        let mut grid: Vec<BigRational> = (0..rng.gen_range(1..=4)).map(|_| ratio(rng.gen_range(1..den), den)).collect();
        grid.sort();
        grid.dedup();
        let report = chain_report(&grid, 16, &domain).expect("strictly increasing grid");
        let n = grid.len();
        let ok = report.pairs.len() == n * (n - 1) / 2 && report.pairs.iter().all(|p| p.separated);
        let names: Vec<String> = grid.iter().map(crate::value::fmt_rational).collect();
        rep.check(ok, n, || Witness {
            f: names.join(","),
            g: "-".into(),
            s: "-".into(),
            detail: format!("pairs {:?}", report.pairs),
        });
    }
}

fn positive_coeff(rng: &mut ChaCha8Rng, p: u32) -> Coefficient {
    let mut a = mixed_coeff(rng, p);
    a = a.shift(&p_adic_fraction(rng, p, 1, 2));
    a.shift(&Exponent::ratio(1, i64::from(p)))
}

fn suite_ideal(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    let precision = Precision::Finite(Exponent::integer(SUITE_PRECISION.into()));
    for _ in 0..cases {
        let p = prime(rng);
        let d = CoefficientDomain::mixed(p, SUITE_PRECISION).expect("prime");
        let in_ideal = |rng: &mut ChaCha8Rng| {
            let terms: Vec<_> = (0..rng.gen_range(1..=3)).map(|_| (arith_index(rng), positive_coeff(rng, p))).collect();
            Series::new(d.clone(), Mode::Arithmetic, terms, precision.clone()).expect("valid")
        };
        let (f, g) = (in_ideal(rng), in_ideal(rng));
        let h = mixed_series(rng, p);
        let members = in_m(&f) && in_m(&g);
        let sum = in_m(&f.add(&g).expect("compatible"));
        let prod = in_m(&f.mul(&h).expect("compatible"));
        rep.check(members && sum && prod, f.len() + g.len() + h.len(), || {
            witness(&f, Some(&g), None, format!("members {members}, f+g {sum}, f*h {prod} with h = {h}"))
        });
    }
    let f2 = CoefficientDomain::perfect(2).expect("prime");
    for k in 1..8 {
        let g = ProfileElement::for_mu(f2.clone(), &ratio(k, 8), 32, 1.0 / 64.0).expect("valid mu");
        let series = materialize(&g, 32).expect("representable");
        rep.check(in_m(&series), series.len(), || witness(&series, None, None, format!("g_{k}/8 not in m")));
    }
    let pi = Series::monomial(
        CoefficientDomain::mixed(2, SUITE_PRECISION).expect("prime"),
        Mode::Arithmetic,
        Coefficient::one(),
        Exponent::integer(1),
    )
    .expect("valid");
    rep.check(!in_m(&pi), 1, || witness(&pi, None, None, "pi reported in m".into()));
}

fn suite_roundtrip(rng: &mut ChaCha8Rng, cases: usize, rep: &mut SuiteReport) {
    for k in 0..cases {
        let p = prime(rng);
        let f = match k % 3 {
            0 => formal_series(rng, p),
            1 => padic_series(rng, p),
            _ => mixed_series(rng, p),
        };
        let f = if k % 5 == 0 { f.truncate(&Precision::Finite(Exponent::integer(3))) } else { f };
        let text = f.to_string();
        let back = parse_series(&text, f.domain(), f.mode());
        rep.check(back.as_ref() == Ok(&f), f.len(), || {
            witness(&f, None, None, format!("`{text}` reparsed as {back:?}"))
        });
    }
}
