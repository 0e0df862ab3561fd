//! Command-line front end for the `npf` toolkit.
//!
//! [`run`] parses arguments, validates flag combinations, dispatches one
//! command and returns the process outcome without touching the real
//! stdout, so the binary and the tests share one code path.

mod render;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use npf_core::duconstruct::{
    chain_report, discretely_approximate, example_delta, example_sup, ChainReport, DeviationRule,
};
use npf_core::literal::{parse_nodes, parse_raw, parse_series};
use npf_core::polygon::{legendre_eval, newton_polygon};
use npf_core::series::{canonicalize, gauss_valuation};
use npf_core::value::fmt_rational;
use npf_core::verify::run_verify;
use npf_core::{CoefficientDomain, GaussParam, Mode, Series, Value};

pub use render::CSV_HEADER;
use render::{Curve, Plot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_SUITE_FAILURE: i32 = 2;

const DEFAULT_P: u32 = 2;
const DEFAULT_PREC_N: u32 = 32;
const DEFAULT_CHAIN_DEPTH: u64 = 1024;
const DEFAULT_EXAMPLE_DEPTH: u64 = 100;
const DEFAULT_S_GRID: [&str; 5] = ["1/4", "1/2", "1", "2", "4"];

#[derive(Debug, Parser)]
#[command(name = "npf", version, about = "Newton polygons, Gauss valuations and Legendre transforms on exact series")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Series variable: `t` (formal) or `p` (arithmetic).
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Residue characteristic.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Digit precision of arithmetic domains.
    #[arg(long = "prec-N", global = true)]
    prec_n: Option<u32>,
    /// Coefficient domain.
    #[arg(long, global = true, value_enum)]
    domain: Option<DomainArg>,
    /// Gauss parameter (repeatable).
    #[arg(long = "s", global = true, allow_hyphen_values = true)]
    s: Vec<String>,
    /// Chain exponent in (0, 1) (repeatable).
    #[arg(long, global = true)]
    mu: Vec<String>,
    /// Materialization or example depth.
    #[arg(long, global = true)]
    depth: Option<u64>,
    /// Seed of the property-suite generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Newton polygon of a series.
    Np { series: String },
    /// Legendre transform of the Newton polygon on the `--s` grid.
    Leg { series: String },
    /// Gauss valuations on the `--s` grid.
    Gauss { series: String },
    /// Product of two series.
    Mul { f: String, g: String },
    /// Sum of two series.
    Add { f: String, g: String },
    /// Canonical form of a series literal.
    Canon { series: String },
    /// Discrete approximation of a convex target polygon.
    Approx {
        /// Target nodes `i:y`, comma separated, e.g. `1:1, 2:1/2`.
        #[arg(long)]
        nodes: String,
        /// Deviation rule: default, relative or inverse-square.
        #[arg(long, default_value = "default")]
        rule: String,
    },
    /// Pairwise separation and realization report over the `--mu` grid.
    Chain,
    /// Series whose Gauss valuation is an infimum and not a minimum.
    ExampleSup,
    /// Run a property suite, or `all`.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Render a polygon, a Legendre curve or a chain report.
    Plot {
        #[arg(long, value_enum)]
        object: PlotObject,
        series: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Formal,
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Perfect,
    Padic,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Svg,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotObject {
    Polygon,
    Legendre,
    Chain,
}

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<(String, i32), Failure>;

/// Flags each command consumes; any other flag is rejected.
struct Uses {
    domain: bool,
    s: bool,
    mu: bool,
    depth: bool,
    seed: bool,
    formats: &'static [Format],
}

const TEXT_JSON: &[Format] = &[Format::Text, Format::Json];
const CURVES: &[Format] = &[Format::Text, Format::Csv, Format::Svg, Format::Json];

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Np { .. } => "np",
            Command::Leg { .. } => "leg",
            Command::Gauss { .. } => "gauss",
            Command::Mul { .. } => "mul",
            Command::Add { .. } => "add",
            Command::Canon { .. } => "canon",
            Command::Approx { .. } => "approx",
            Command::Chain => "chain",
            Command::ExampleSup => "example-sup",
            Command::Verify { .. } => "verify",
            Command::Plot { .. } => "plot",
        }
    }

    fn uses(&self) -> Uses {
        let base = Uses { domain: true, s: false, mu: false, depth: false, seed: false, formats: TEXT_JSON };
        match self {
            Command::Np { .. } => Uses { formats: CURVES, ..base },
            Command::Leg { .. } => Uses { s: true, formats: CURVES, ..base },
            Command::Gauss { .. } => Uses { s: true, ..base },
            Command::Mul { .. } | Command::Add { .. } | Command::Canon { .. } | Command::Approx { .. } => base,
            Command::Chain => Uses { mu: true, depth: true, ..base },
            Command::ExampleSup => Uses {
                domain: false,
                s: true,
                depth: true,
                formats: &[Format::Text, Format::Csv, Format::Json],
                ..base
            },
            Command::Verify { .. } => Uses { domain: false, seed: true, ..base },
            Command::Plot { object, .. } => {
                let formats = &[Format::Csv, Format::Svg, Format::Json];
                match object {
                    PlotObject::Polygon => Uses { formats, ..base },
                    PlotObject::Legendre => Uses { s: true, formats, ..base },
                    PlotObject::Chain => Uses { mu: true, depth: true, formats, ..base },
                }
            }
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Plot { .. } => Format::Svg,
            _ => Format::Text,
        }
    }
}

impl Cli {
    fn validate(&self) -> Result<Format, Failure> {
        let cmd = self.command.name();
        let uses = self.command.uses();
        let reject = |flag: &str| Failure(format!("flag --{flag} does not apply to `{cmd}`"));
        if !uses.domain {
            for (given, flag) in [
                (self.mode.is_some(), "mode"),
                (self.p.is_some(), "p"),
                (self.prec_n.is_some(), "prec-N"),
                (self.domain.is_some(), "domain"),
            ] {
                if given {
                    return Err(reject(flag));
                }
            }
        }
        if !uses.s && !self.s.is_empty() {
            return Err(reject("s"));
        }
        if !uses.mu && !self.mu.is_empty() {
            return Err(reject("mu"));
        }
        if !uses.depth && self.depth.is_some() {
            return Err(reject("depth"));
        }
        if !uses.seed && self.seed.is_some() {
            return Err(reject("seed"));
        }
        let format = self.format.unwrap_or(self.command.default_format());
        if !uses.formats.contains(&format) {
            let name = format.to_possible_value().expect("plain variant").get_name().to_string();
            return Err(Failure(format!("format `{name}` is not available for `{cmd}`")));
        }
        Ok(format)
    }

    /// Domain and mode from the flags; the mode follows the domain when only
    /// the domain is given.
    fn domain(&self) -> Result<(CoefficientDomain, Mode), Failure> {
        let mode = match (self.mode, self.domain) {
            (Some(m), _) => m,
            (None, Some(DomainArg::Padic | DomainArg::Mixed)) => ModeArg::Arithmetic,
            (None, _) => ModeArg::Formal,
        };
        let p = self.p.unwrap_or(DEFAULT_P);
        let domain = match (mode, self.domain) {
            (ModeArg::Formal, None | Some(DomainArg::Perfect)) => {
                if self.prec_n.is_some() {
                    return Err(Failure("--prec-N applies to arithmetic domains only".into()));
                }
                CoefficientDomain::perfect(p)?
            }
            (ModeArg::Formal, Some(d)) => {
                return Err(Failure(format!("domain {d:?} needs --mode arithmetic").to_lowercase()));
            }
            (ModeArg::Arithmetic, Some(DomainArg::Perfect)) => {
                return Err(Failure("domain perfect needs --mode formal".into()));
            }
            (ModeArg::Arithmetic, None | Some(DomainArg::Padic)) => {
                CoefficientDomain::padic(p, self.prec_n.unwrap_or(DEFAULT_PREC_N))?
            }
            (ModeArg::Arithmetic, Some(DomainArg::Mixed)) => {
                CoefficientDomain::mixed(p, self.prec_n.unwrap_or(DEFAULT_PREC_N))?
            }
        };
        let mode = if mode == ModeArg::Formal { Mode::Formal } else { Mode::Arithmetic };
        Ok((domain, mode))
    }

    fn s_grid(&self, default: &[&str]) -> Result<Vec<GaussParam>, Failure> {
        let parse = |t: &str| t.parse::<GaussParam>().map_err(|e| Failure(format!("--s {t}: {e}")));
        if self.s.is_empty() {
            default.iter().map(|t| parse(t)).collect()
        } else {
            self.s.iter().map(|t| parse(t)).collect()
        }
    }

    fn mu_grid(&self) -> Result<Vec<BigRational>, Failure> {
        if self.mu.is_empty() {
            return Ok((1..8).map(|k| BigRational::new(k.into(), 8.into())).collect());
        }
        self.mu
            .iter()
            .map(|t| npf_core::value::parse_rational(t).map_err(|e| Failure(format!("--mu {t}: {e}"))))
            .collect()
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: text },
            };
        }
    };
    let result = cli.validate().and_then(|format| dispatch(&cli, format));
    match result {
        Ok((body, code)) => match &cli.out {
            Some(path) => match std::fs::write(path, &body) {
                Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
                Err(e) => error(format!("cannot write {}: {e}", path.display())),
            },
            None => Outcome { code, stdout: body, stderr: String::new() },
        },
        Err(Failure(msg)) => error(msg),
    }
}

fn error(msg: String) -> Outcome {
    Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn status(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_SUITE_FAILURE
    }
}

fn dispatch(cli: &Cli, format: Format) -> CmdResult {
    match &cli.command {
        Command::Np { series } => cmd_np(cli, series, format),
        Command::Leg { series } => cmd_leg(cli, series, format),
        Command::Gauss { series } => cmd_gauss(cli, series, format),
        Command::Mul { f, g } => cmd_binary(cli, f, g, format, Series::mul),
        Command::Add { f, g } => cmd_binary(cli, f, g, format, Series::add),
        Command::Canon { series } => cmd_canon(cli, series, format),
        Command::Approx { nodes, rule } => cmd_approx(cli, nodes, rule, format),
        Command::Chain => cmd_chain(cli, format),
        Command::ExampleSup => cmd_example_sup(cli, format),
        Command::Verify { suite, cases } => cmd_verify(cli, suite, *cases, format),
        Command::Plot { object, series } => cmd_plot(cli, *object, series.as_deref(), format),
    }
}

fn read_series(cli: &Cli, text: &str) -> Result<Series, Failure> {
    let (domain, mode) = cli.domain()?;
    Ok(parse_series(text, &domain, mode)?)
}

fn polygon_points(cli: &Cli, text: &str) -> Result<Vec<(BigRational, BigRational)>, Failure> {
    let f = read_series(cli, text)?;
    let np = newton_polygon(&f)?;
    Ok(np.nodes().iter().map(|(x, y)| (x.as_rational().clone(), y.clone())).collect())
}

fn legendre_points(cli: &Cli, text: &str, default: &[&str]) -> Result<Vec<(BigRational, BigRational)>, Failure> {
    let f = read_series(cli, text)?;
    let np = newton_polygon(&f)?;
    cli.s_grid(default)?
        .iter()
        .map(|s| match legendre_eval(&np, s) {
            Value::Finite(v) => Ok((s.as_rational().clone(), v)),
            Value::Infinite => Err(Failure(format!("Legendre transform is infinite at s = {s}"))),
        })
        .collect()
}

/// Polygon with its constant tail drawn up to one unit past the last node.
fn polygon_curve(points: &[(BigRational, BigRational)]) -> Curve {
    let mut pts = points.to_vec();
    if let Some((x, y)) = points.last().cloned() {
        pts.push((x + BigRational::one(), y));
    }
    Curve { label: "newton polygon".into(), points: pts }
}

fn cmd_np(cli: &Cli, text: &str, format: Format) -> CmdResult {
    let pts = polygon_points(cli, text)?;
    let body = match format {
        Format::Text => {
            let f = read_series(cli, text)?;
            let np = newton_polygon(&f)?;
            let slopes: Vec<_> = np.slopes().iter().map(fmt_rational).collect();
            format!("nodes: {np}\nslopes: [{}]\n", slopes.join(", "))
        }
        Format::Csv => render::csv(&pts),
        Format::Svg => render::svg(&Plot {
            title: "Newton polygon",
            x_label: "exponent",
            y_label: "coefficient valuation",
            curves: vec![polygon_curve(&pts)],
        }),
        Format::Json => json(&newton_polygon(&read_series(cli, text)?)?)?,
    };
    Ok((body, EXIT_OK))
}

#[derive(Serialize)]
struct SValue {
    s: String,
    value: String,
}

fn cmd_leg(cli: &Cli, text: &str, format: Format) -> CmdResult {
    let pts = legendre_points(cli, text, &DEFAULT_S_GRID)?;
    let body = match format {
        Format::Text => pts.iter().fold(String::new(), |mut out, (s, v)| {
            let _ = writeln!(out, "L(s = {}) = {}", fmt_rational(s), fmt_rational(v));
            out
        }),
        Format::Csv => render::csv(&pts),
        Format::Svg => render::svg(&Plot {
            title: "Legendre transform",
            x_label: "s",
            y_label: "value",
            curves: vec![Curve { label: "legendre".into(), points: pts }],
        }),
        Format::Json => {
            let rows: Vec<_> = pts.iter().map(|(s, v)| SValue { s: fmt_rational(s), value: fmt_rational(v) }).collect();
            json(&rows)?
        }
    };
    Ok((body, EXIT_OK))
}

fn cmd_gauss(cli: &Cli, text: &str, format: Format) -> CmdResult {
    let f = read_series(cli, text)?;
    let grid = cli.s_grid(&["1"])?;
    let values: Vec<_> = grid.iter().map(|s| gauss_valuation(&f, s)).collect();
    let body = match format {
        Format::Json => json(&values)?,
        _ => grid.iter().zip(&values).fold(String::new(), |mut out, (s, v)| {
            let kind = if v.exact { "exact" } else { "lower bound" };
            let _ = writeln!(out, "v(s = {s}) = {} ({kind})", v.value);
            out
        }),
    };
    Ok((body, EXIT_OK))
}

fn cmd_binary(
    cli: &Cli,
    f: &str,
    g: &str,
    format: Format,
    op: fn(&Series, &Series) -> Result<Series, npf_core::SeriesError>,
) -> CmdResult {
    let (f, g) = (read_series(cli, f)?, read_series(cli, g)?);
    let h = op(&f, &g)?;
    let body = match format {
        Format::Json => json(&h)?,
        _ => format!("{h}\n"),
    };
    Ok((body, EXIT_OK))
}

fn cmd_canon(cli: &Cli, text: &str, format: Format) -> CmdResult {
    let (domain, mode) = cli.domain()?;
    let h = match mode {
        Mode::Arithmetic => canonicalize(&parse_raw(text, &domain)?)?,
        Mode::Formal => parse_series(text, &domain, mode)?,
    };
    let body = match format {
        Format::Json => json(&h)?,
        _ => format!("{h}\n"),
    };
    Ok((body, EXIT_OK))
}

fn cmd_approx(cli: &Cli, nodes: &str, rule: &str, format: Format) -> CmdResult {
    let (domain, _) = cli.domain()?;
    let rule: DeviationRule = rule.parse()?;
    let targets = parse_nodes(nodes)?;
    let (series, cert) = discretely_approximate(&targets, &domain, rule)?;
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                series: &'a Series,
                certificate: &'a npf_core::duconstruct::Certificate,
            }
            json(&Out { series: &series, certificate: &cert })?
        }
        _ => {
            let mut out = format!("series: {series}\n");
            for n in &cert.nodes {
                let _ = writeln!(
                    out,
                    "node {}: target {} -> {} (k = {}, deviation {} <= {})",
                    n.index,
                    fmt_rational(&n.target),
                    fmt_rational(&n.q),
                    n.k,
                    fmt_rational(&n.deviation),
                    fmt_rational(&n.bound)
                );
            }
            let _ = writeln!(out, "max deviation: {}", fmt_rational(&cert.max_deviation));
            let _ = writeln!(out, "hull deviation: {}", cert.hull_deviation);
            let _ = writeln!(out, "certificate: {}", if cert.holds { "holds" } else { "fails" });
            out
        }
    };
    Ok((body, status(cert.holds)))
}

fn run_chain(cli: &Cli) -> Result<ChainReport, Failure> {
    let (domain, _) = cli.domain()?;
    Ok(chain_report(&cli.mu_grid()?, cli.depth.unwrap_or(DEFAULT_CHAIN_DEPTH), &domain)?)
}

fn cmd_chain(cli: &Cli, format: Format) -> CmdResult {
    let report = run_chain(cli)?;
    let body = match format {
        Format::Json => json(&report)?,
        _ => {
            let mut out = String::new();
            for p in &report.pairs {
                let _ = writeln!(
                    out,
                    "pair mu={} lambda={}: {} in_o_sup={} in_omega_sup={} separated={}",
                    fmt_rational(&p.mu),
                    fmt_rational(&p.lambda),
                    p.class.verdict,
                    p.class.in_o_sup,
                    p.class.in_omega_sup,
                    p.separated
                );
            }
            for r in &report.realizations {
                let ratios: Vec<_> = r.samples.iter().map(|x| format!("{:.6}", x.ratio)).collect();
                let _ = writeln!(
                    out,
                    "realization mu={} depth={} law={} in_m={} within_band={} ratios=[{}]",
                    fmt_rational(&r.mu),
                    r.depth,
                    r.law,
                    r.in_m,
                    r.within_band,
                    ratios.join(", ")
                );
            }
            let _ = writeln!(out, "result: {}", if report.passed { "PASS" } else { "FAIL" });
            out
        }
    };
    Ok((body, status(report.passed)))
}

fn cmd_example_sup(cli: &Cli, format: Format) -> CmdResult {
    let depth = cli.depth.unwrap_or(DEFAULT_EXAMPLE_DEPTH);
    let grid = cli.s_grid(&["1"])?;
    let mut passed = true;
    let mut reports = Vec::new();
    for s in &grid {
        let ex = example_sup(s, depth)?;
        let above = ex.partial_values.iter().all(|v| *v > ex.limit);
        let decreasing = ex.partial_values.windows(2).all(|w| w[1] < w[0]);
        passed &= above && decreasing;
        reports.push((ex, above, decreasing));
    }
    let body = match format {
        Format::Json => {
            let exs: Vec<_> = reports.iter().map(|r| &r.0).collect();
            json(&exs)?
        }
        Format::Csv => {
            let pts: Vec<_> = reports
                .iter()
                .flat_map(|(ex, ..)| {
                    ex.partial_values.iter().enumerate().filter_map(|(n, v)| {
                        v.finite().map(|v| (BigRational::from_integer((n as u64 + 1).into()), v.clone()))
                    })
                })
                .collect();
            render::csv(&pts)
        }
        _ => {
            let mut out = String::new();
            for (ex, above, decreasing) in &reports {
                let _ = writeln!(out, "example s={} depth={depth} limit={}", ex.s, ex.limit);
                let _ = writeln!(out, "delta_1={}", fmt_rational(&example_delta(1, &ex.s)));
                for (n, v) in ex.partial_values.iter().enumerate() {
                    let _ = writeln!(out, "n={} value={v}", n + 1);
                }
                let _ = writeln!(out, "above_limit={above} strictly_decreasing={decreasing}");
            }
            out
        }
    };
    Ok((body, status(passed)))
}

fn cmd_verify(cli: &Cli, suite: &str, cases: usize, format: Format) -> CmdResult {
    let report = run_verify(suite, cases, cli.seed.unwrap_or(0))?;
    let body = match format {
        Format::Json => json(&report)?,
        _ => format!("{report}\n"),
    };
    Ok((body, status(report.passed())))
}

fn cmd_plot(cli: &Cli, object: PlotObject, series: Option<&str>, format: Format) -> CmdResult {
    let need = |name: &str| series.ok_or_else(|| Failure(format!("plot --object {name} needs a series argument")));
    if object == PlotObject::Chain && series.is_some() {
        return Err(Failure("plot --object chain takes no series argument".into()));
    }
    let (plot, flat) = match object {
        PlotObject::Polygon => {
            let pts = polygon_points(cli, need("polygon")?)?;
            let curve = polygon_curve(&pts);
            (
                Plot {
                    title: "Newton polygon",
                    x_label: "exponent",
                    y_label: "coefficient valuation",
                    curves: vec![curve],
                },
                Some(pts),
            )
        }
        PlotObject::Legendre => {
            let grid: Vec<String> = (1..=32).map(|j| format!("{j}/8")).collect();
            let grid: Vec<&str> = grid.iter().map(String::as_str).collect();
            let pts = legendre_points(cli, need("legendre")?, &grid)?;
            let curve = Curve { label: "legendre".into(), points: pts.clone() };
            (Plot { title: "Legendre transform", x_label: "s", y_label: "value", curves: vec![curve] }, Some(pts))
        }
        PlotObject::Chain => {
            let report = run_chain(cli)?;
            let curves = report
                .realizations
                .iter()
                .map(|r| Curve {
                    label: format!("mu={}", fmt_rational(&r.mu)),
                    points: r
                        .samples
                        .iter()
                        .filter_map(|x| {
                            let s = npf_core::value::parse_rational(&x.s).ok()?;
                            Some((s, x.legendre.finite()?.clone()))
                        })
                        .collect(),
                })
                .collect();
            (Plot { title: "Legendre transforms of the chain", x_label: "s", y_label: "value", curves }, None)
        }
    };
    let body = match (format, flat) {
        (Format::Csv, Some(pts)) => render::csv(&pts),
        (Format::Csv, None) => render::csv_labelled(&plot.curves),
        (Format::Json, _) => {
            #[derive(Serialize)]
            struct JsonCurve {
                label: String,
                points: Vec<(String, String)>,
            }
            let curves: Vec<_> = plot
                .curves
                .iter()
                .map(|c| JsonCurve {
                    label: c.label.clone(),
                    points: c.points.iter().map(|(x, y)| (fmt_rational(x), fmt_rational(y))).collect(),
                })
                .collect();
            json(&curves)?
        }
        _ => render::svg(&plot),
    };
    Ok((body, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn npf(args: &[&str]) -> Outcome {
        run(std::iter::once("npf").chain(args.iter().copied()))
    }

    #[test]
    fn domain_flags_pair_with_modes() {
        assert_eq!(npf(&["np", "x + t", "--domain", "padic", "--mode", "formal"]).code, EXIT_ERROR);
        assert_eq!(npf(&["np", "1 + p", "--domain", "perfect", "--mode", "arithmetic"]).code, EXIT_ERROR);
        assert_eq!(npf(&["np", "1 + p", "--domain", "padic"]).code, EXIT_OK);
        assert_eq!(npf(&["np", "x + t", "--prec-N", "8"]).code, EXIT_ERROR);
    }

    #[test]
    fn foreign_flags_are_rejected() {
        let out = npf(&["mul", "x", "t", "--s", "1"]);
        assert_eq!(out.code, EXIT_ERROR);
        assert!(out.stderr.contains("--s"));
        assert_eq!(npf(&["np", "x", "--seed", "3"]).code, EXIT_ERROR);
        assert_eq!(npf(&["verify", "classify", "--p", "3"]).code, EXIT_ERROR);
        assert_eq!(npf(&["gauss", "x", "--format", "svg"]).code, EXIT_ERROR);
    }

    #[test]
    fn help_and_bad_usage() {
        assert_eq!(npf(&["--help"]).code, EXIT_OK);
        assert_eq!(npf(&["frobnicate"]).code, EXIT_ERROR);
    }

    #[test]
    fn gauss_reports_exactness() {
        let out = npf(&["gauss", "x + t^{2}", "--s", "1/2", "--s", "2"]);
        assert_eq!(out.stdout, "v(s = 1/2) = 1 (exact)\nv(s = 2) = 1 (exact)\n");
        let out = npf(&["gauss", "1 + O(p^{4})", "--mode", "arithmetic", "--s", "0"]);
        assert!(out.stdout.contains("(exact)"), "{}", out.stdout);
    }

    #[test]
    fn polygon_tail_extends_right() {
        let c = polygon_curve(&[(BigRational::zero(), BigRational::one())]);
        assert_eq!(c.points.len(), 2);
    }
}
