//! Acceptance criteria, one PASS/FAIL line each.

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;

use npf_core::duconstruct::{chain_report, example_delta, example_sup, in_m, inverse_legendre_power, ChainReport};
use npf_core::literal::parse_series;
use npf_core::verify::{run_verify, VerifyReport};
use npf_core::{CoefficientDomain, GaussParam, Mode, Value};

const CASES: usize = 1000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

struct Tally {
    failed: usize,
}

impl Tally {
    fn record(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        println!("criterion {id:>2} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn suite(name: &str) -> (VerifyReport, Duration) {
    let start = Instant::now();
    let rep = run_verify(name, CASES, 0).expect("known suite");
    (rep, start.elapsed())
}

fn summary(rep: &VerifyReport) -> String {
    rep.suites
        .iter()
        .map(|s| format!("{} checked {} skipped {}", s.name, s.checked, s.skipped))
        .collect::<Vec<_>>()
        .join("; ")
}

fn failures(rep: &VerifyReport) -> Option<String> {
    rep.suites.iter().find(|s| !s.passed()).map(|s| s.to_string())
}

fn suite_criterion(t: &mut Tally, id: u32, name: &str, suites: &[&str], min_checks: &[usize], limit: Option<Duration>) {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for (s, min) in suites.iter().zip(min_checks) {
        let (rep, elapsed) = suite(s);
        total += elapsed;
        let checked: usize = rep.suites.iter().map(|x| x.checked).sum();
        ok &= rep.passed() && checked >= *min;
        if let Some(f) = failures(&rep) {
            parts.push(f);
        }
        parts.push(summary(&rep));
    }
    if let Some(limit) = limit {
        ok &= total < limit;
    }
    parts.push(format!("{:.2}s", total.as_secs_f64()));
    t.record(id, name, ok, parts.join("; "));
}

fn example_criterion(t: &mut Tally) {
    let s = GaussParam::integer(1);
    let ex = example_sup(&s, 100).expect("example builds");
    let three = Value::Finite(q(3, 1));
    let deltas_ok = (1..=100).all(|n| example_delta(n, &s) == q(1, 2 * n as i64));
    let above = ex.partial_values.iter().all(|v| *v > three);
    let decreasing = ex.partial_values.windows(2).all(|w| w[1] < w[0]);
    let limit_ok = ex.limit == Value::Finite(BigRational::one() + q(2, 1) * s.as_rational());
    let ok = ex.partial_values.len() == 100 && deltas_ok && above && decreasing && limit_ok;
    let last = ex.partial_values.last().map(|v| v.to_string()).unwrap_or_default();
    t.record(
        5,
        "example-sup",
        ok,
        format!("limit {}, last partial {last}, above {above}, decreasing {decreasing}", ex.limit),
    );
}

fn constants_criterion(t: &mut Tally) {
    let inv = inverse_legendre_power(&q(1, 2)).expect("mu = 1/2 accepted");
    let exact = inv.c.exact() == Some(&q(1, 4)) && inv.r == q(1, 1);
    // the grid minimum of 1/(4x) + s x against sqrt(s) directly
    let max_err = (1..=20)
        .map(|j| {
            let s = j as f64 / 20.0;
            let m = npf_core::duconstruct::legendre_grid_min(0.25, 1.0, s);
            ((m - s.sqrt()) / s.sqrt()).abs()
        })
        .fold(0.0, f64::max);
    let ok = exact && inv.samples.len() == 20 && inv.max_rel_err <= 1e-6 && max_err <= 1e-6;
    t.record(6, "inverse-legendre", ok, format!("c = {}, r = {}, max relative error {max_err:.2e}", inv.c, inv.r));
}

fn chain(depth: u64) -> (ChainReport, Duration) {
    let grid: Vec<_> = (1..8).map(|k| q(k, 8)).collect();
    let domain = CoefficientDomain::perfect(2).expect("prime");
    let start = Instant::now();
    let rep = chain_report(&grid, depth, &domain).expect("grid accepted");
    (rep, start.elapsed())
}

fn realization_criterion(t: &mut Tally, rep: &ChainReport, elapsed: Duration) {
    let all = rep.realizations.iter().all(|r| r.within_band && r.samples.len() == 7);
    let (lo, hi) = rep
        .realizations
        .iter()
        .flat_map(|r| r.samples.iter().map(|x| x.ratio))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let ok = all && rep.realizations.len() == 7 && elapsed < Duration::from_secs(60);
    t.record(7, "realization", ok, format!("ratios in [{lo:.6}, {hi:.6}], {:.2}s", elapsed.as_secs_f64()));
}

fn separation_criterion(t: &mut Tally, rep: &ChainReport) {
    let separated = rep.pairs.iter().filter(|p| p.separated).count();
    let members = rep.realizations.iter().filter(|r| r.in_m).count();
    let formal = parse_series("t", &CoefficientDomain::perfect(2).expect("prime"), Mode::Formal).expect("literal");
    let arith = parse_series("p", &CoefficientDomain::mixed(2, 32).expect("prime"), Mode::Arithmetic).expect("literal");
    let uniformizer_outside = !in_m(&formal) && !in_m(&arith);
    let ok = rep.pairs.len() == 21 && separated == 21 && members == 7 && uniformizer_outside;
    t.record(
        8,
        "chain-separation",
        ok,
        format!("{separated}/21 pairs separated, {members}/7 in m, uniformizer outside m: {uniformizer_outside}"),
    );
}

fn determinism_criterion(t: &mut Tally) {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_npf")).args(["verify", "all", "--seed", "0"]).output().expect("binary runs")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    t.record(10, "determinism", ok, format!("{} bytes, exit {:?}", a.stdout.len(), a.status.code()));
}

fn main() {
    let mut t = Tally { failed: 0 };
    let pairs = 5 * (CASES + CASES / 2);
    suite_criterion(&mut t, 1, "multiplicativity", &["multiplicativity"], &[pairs], Some(Duration::from_secs(30)));
    suite_criterion(
        &mut t,
        2,
        "triangle/submultiplicativity",
        &["triangle", "submultiplicativity"],
        &[pairs, pairs],
        None,
    );
    suite_criterion(&mut t, 3, "commutation", &["commutation"], &[5 * CASES], None);
    suite_criterion(&mut t, 4, "carrying", &["carrying"], &[CASES / 2], None);
    example_criterion(&mut t);
    constants_criterion(&mut t);
    let (rep, elapsed) = chain(1024);
    realization_criterion(&mut t, &rep, elapsed);
    separation_criterion(&mut t, &rep);
    suite_criterion(&mut t, 9, "witnesses/localize", &["witnesses", "localize"], &[CASES, CASES / 2], None);
    determinism_criterion(&mut t);
    println!("acceptance: {} of 10 criteria failed", t.failed);
    if t.failed > 0 {
        std::process::exit(1);
    }
}
