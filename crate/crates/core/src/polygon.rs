//! Newton polygons and the infimum Legendre transform.
//!
//! A polygon is stored by its nodes. It is `+inf` to the left of the first node,
//! piecewise linear between nodes and constant after the last one.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::series::{gauss_valuation, Series, SeriesError};
use crate::value::{fmt_rational, Exponent, GaussParam, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("a polygon needs at least one node")]
    Empty,
    #[error("node abscissae must increase strictly ({0} then {1})")]
    Unordered(String, String),
    #[error("polygon increases between x = {0} and x = {1}")]
    Increasing(String, String),
    #[error("polygon is not convex at x = {0}")]
    NotConvex(String),
    #[error("the zero series has no Newton polygon")]
    ZeroSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLConvexFn {
    nodes: Vec<(Exponent, BigRational)>,
}

fn slope(a: &(Exponent, BigRational), b: &(Exponent, BigRational)) -> BigRational {
    (&b.1 - &a.1) / (b.0.as_rational() - a.0.as_rational())
}

impl PLConvexFn {
    /// Validates ordering, monotonicity and convexity of the nodes.
    pub fn from_nodes(nodes: Vec<(Exponent, BigRational)>) -> Result<Self, PolygonError> {
        if nodes.is_empty() {
            return Err(PolygonError::Empty);
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PolygonError::Unordered(w[0].0.to_string(), w[1].0.to_string()));
            }
            if w[1].1 > w[0].1 {
                return Err(PolygonError::Increasing(w[0].0.to_string(), w[1].0.to_string()));
            }
        }
        for w in nodes.windows(3) {
            if slope(&w[0], &w[1]) > slope(&w[1], &w[2]) {
                return Err(PolygonError::NotConvex(w[1].0.to_string()));
            }
        }
        Ok(PLConvexFn { nodes })
    }

    /// Constant function `c` on `[0, inf)`.
    pub fn constant(c: BigRational) -> Self {
        PLConvexFn { nodes: vec![(Exponent::zero(), c)] }
    }

    pub fn nodes(&self) -> &[(Exponent, BigRational)] {
        &self.nodes
    }

    pub fn first_x(&self) -> &Exponent {
        &self.nodes[0].0
    }

    /// Slopes of consecutive segments, nondecreasing and nonpositive.
    pub fn slopes(&self) -> Vec<BigRational> {
        self.nodes.windows(2).map(|w| slope(&w[0], &w[1])).collect()
    }

    pub fn eval(&self, x: &BigRational) -> Value {
        if x < self.first_x().as_rational() {
            return Value::Infinite;
        }
        let k = self.nodes.partition_point(|(xi, _)| xi.as_rational() <= x);
        let (x0, y0) = &self.nodes[k - 1];
        let Some(next) = self.nodes.get(k) else {
            return Value::Finite(y0.clone());
        };
        let m = slope(&self.nodes[k - 1], next);
        Value::Finite(y0 + m * (x - x0.as_rational()))
    }

    /// Graph translated by `(dx, dy)`.
    pub fn translate(&self, dx: &Exponent, dy: &BigRational) -> PLConvexFn {
        let nodes = self.nodes.iter().map(|(x, y)| (x + dx, y + dy)).collect();
        PLConvexFn { nodes }
    }

    /// Abscissae where either function can change slope, from `from` onwards.
    fn breakpoints(&self, other: &PLConvexFn, from: &BigRational) -> Vec<BigRational> {
        let mut xs: Vec<BigRational> =
            self.nodes.iter().chain(&other.nodes).map(|(x, _)| x.as_rational().clone()).filter(|x| x >= from).collect();
        xs.push(from.clone());
        xs.sort();
        xs.dedup();
        xs
    }

    /// `self <= other` everywhere on `[0, inf)`.
    pub fn le(&self, other: &PLConvexFn) -> bool {
        if self.first_x() > other.first_x() {
            return false;
        }
        self.breakpoints(other, other.first_x().as_rational()).iter().all(|x| self.eval(x) <= other.eval(x))
    }
}

/// Both functions are linear between merged breakpoints and constant past them,
/// so the supremum of `|F - G|` is attained at a breakpoint.
pub fn sup_distance(f: &PLConvexFn, g: &PLConvexFn) -> Value {
    if f.first_x() != g.first_x() {
        return Value::Infinite;
    }
    f.breakpoints(g, f.first_x().as_rational())
        .iter()
        .map(|x| match (f.eval(x), g.eval(x)) {
            (Value::Finite(a), Value::Finite(b)) => (a - b).abs(),
            _ => unreachable!("both finite right of the common first node"),
        })
        .max()
        .map(Value::Finite)
        .unwrap_or_else(Value::zero)
}

impl fmt::Display for PLConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.nodes.iter().map(|(x, y)| format!("({x}, {})", fmt_rational(y))).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for PLConvexFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.nodes.len()))?;
        for (x, y) in &self.nodes {
            seq.serialize_element(&(x.to_string(), fmt_rational(y)))?;
        }
        seq.end()
    }
}

fn cross(o: &(Exponent, BigRational), a: &(Exponent, BigRational), b: &(Exponent, BigRational)) -> BigRational {
    let (ox, ax, bx) = (o.0.as_rational(), a.0.as_rational(), b.0.as_rational());
    (ax - ox) * (&b.1 - &o.1) - (&a.1 - &o.1) * (bx - ox)
}

/// Lower hull of the points `(i, v(a_i))` after discarding points that do not
/// undercut every point to their left.
pub fn newton_polygon(f: &Series) -> Result<PLConvexFn, PolygonError> {
    let domain = f.domain();
    let mut envelope: Vec<(Exponent, BigRational)> = Vec::new();
    for (i, a) in f.terms() {
        let v = domain.coeff_valuation(a).expect("validated coefficients");
        let Value::Finite(y) = v else { continue };
        if envelope.last().is_none_or(|(_, last)| y < *last) {
            envelope.push((i.clone(), y));
        }
    }
    if envelope.is_empty() {
        return Err(PolygonError::ZeroSeries);
    }
    let mut hull: Vec<(Exponent, BigRational)> = Vec::with_capacity(envelope.len());
    for pt in envelope {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt).is_positive() {
            hull.pop();
        }
        hull.push(pt);
    }
    Ok(PLConvexFn { nodes: hull })
}

/// `inf_x (F(x) + s x)`, attained at a node.
pub fn legendre_eval(f: &PLConvexFn, s: &GaussParam) -> Value {
    f.nodes.iter().map(|(x, y)| y + s.scale(x)).min().map(Value::Finite).expect("nonempty")
}

/// Legendre-side function sampled on a grid of Gauss parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegendreCurve {
    pub samples: Vec<(GaussParam, Value)>,
}

impl LegendreCurve {
    pub fn of_polygon(f: &PLConvexFn, grid: &[GaussParam]) -> Self {
        LegendreCurve { samples: grid.iter().map(|s| (s.clone(), legendre_eval(f, s))).collect() }
    }

    /// Polygon curve of `h`, with the zero series mapped to the constant `+inf`.
    pub fn of_series(h: &Series, grid: &[GaussParam]) -> Self {
        match newton_polygon(h) {
            Ok(np) => LegendreCurve::of_polygon(&np, grid),
            Err(_) => LegendreCurve { samples: grid.iter().map(|s| (s.clone(), Value::Infinite)).collect() },
        }
    }

    /// Gauss valuations of `h` on the grid.
    pub fn of_gauss(h: &Series, grid: &[GaussParam]) -> Self {
        LegendreCurve { samples: grid.iter().map(|s| (s.clone(), gauss_valuation(h, s).value)).collect() }
    }

    fn zip_with(&self, other: &LegendreCurve, op: impl Fn(&Value, &Value) -> Value) -> LegendreCurve {
        assert_eq!(self.samples.len(), other.samples.len(), "curves sampled on different grids");
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|((s, a), (t, b))| {
                assert_eq!(s, t, "curves sampled on different grids");
                (s.clone(), op(a, b))
            })
            .collect();
        LegendreCurve { samples }
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.samples.iter().map(|(_, v)| v)
    }
}

/// Pointwise minimum, the tropical sum.
pub fn tropical_min(f: &LegendreCurve, g: &LegendreCurve) -> LegendreCurve {
    f.zip_with(g, |a, b| a.min_with(b))
}

/// Pointwise sum, the tropical product.
pub fn tropical_add(f: &LegendreCurve, g: &LegendreCurve) -> LegendreCurve {
    f.zip_with(g, |a, b| a + b)
}

/// Concrete counterexample to one formalism check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NpfWitness {
    pub f: String,
    pub g: String,
    pub s: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub checked: usize,
    /// Grid points left out because a valuation was not exact.
    pub skipped: usize,
    pub witness: Option<NpfWitness>,
}

impl CheckOutcome {
    fn new() -> Self {
        CheckOutcome { passed: true, checked: 0, skipped: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> NpfWitness) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NPFReport {
    pub commutation: CheckOutcome,
    pub superadditivity: CheckOutcome,
    pub multiplicativity: CheckOutcome,
}

impl NPFReport {
    pub fn passed(&self) -> bool {
        self.commutation.passed && self.superadditivity.passed && self.multiplicativity.passed
    }
}

/// Polygon-side value `L(N(h))(s)`, `+inf` for the zero series.
fn ln_value(h: &Series, s: &GaussParam) -> Value {
    newton_polygon(h).map(|np| legendre_eval(&np, s)).unwrap_or(Value::Infinite)
}

/// Checks `L(N(h)) = v_s(h)` for `h` in `{f, g, f+g, fg}`, then superadditivity
/// and multiplicativity of `L o N` on every grid point where the valuations are exact.
pub fn verify_npf(f: &Series, g: &Series, grid: &[GaussParam]) -> Result<NPFReport, SeriesError> {
    let sum = f.add(g)?;
    let prod = f.mul(g)?;
    let mut report = NPFReport {
        commutation: CheckOutcome::new(),
        superadditivity: CheckOutcome::new(),
        multiplicativity: CheckOutcome::new(),
    };
    let witness =
        |s: &GaussParam, detail: String| NpfWitness { f: f.to_string(), g: g.to_string(), s: s.to_string(), detail };
    for s in grid {
        for (name, h) in [("f", f), ("g", g), ("f+g", &sum), ("fg", &prod)] {
            let lhs = ln_value(h, s);
            let rhs = gauss_valuation(h, s).value;
            report
                .commutation
                .record(lhs == rhs, || witness(s, format!("L(N({name})) = {lhs} but v_s({name}) = {rhs}")));
        }
        let gf = gauss_valuation(f, s);
        let gg = gauss_valuation(g, s);
        let gsum = gauss_valuation(&sum, s);
        let gprod = gauss_valuation(&prod, s);
        let (lf, lg) = (ln_value(f, s), ln_value(g, s));
        if gf.exact && gg.exact && gsum.exact {
            let lo = lf.min_with(&lg);
            let ls = ln_value(&sum, s);
            report.superadditivity.record(lo <= ls, || witness(s, format!("min(LN f, LN g) = {lo} > LN(f+g) = {ls}")));
        } else {
            report.superadditivity.skipped += 1;
        }
        if gf.exact && gg.exact && gprod.exact {
            let both = &lf + &lg;
            let lp = ln_value(&prod, s);
            report
                .multiplicativity
                .record(both == lp, || witness(s, format!("LN f + LN g = {both} but LN(fg) = {lp}")));
        } else {
            report.multiplicativity.skipped += 1;
        }
    }
    Ok(report)
}

/// Exact comparison helper: `true` when every sample of `f` is at most that of `g`.
pub fn curve_le(f: &LegendreCurve, g: &LegendreCurve) -> bool {
    f.values().zip(g.values()).all(|(a, b)| a <= b)
}

/// Sup-distance of two node lists sharing abscissae, used for approximation certificates.
pub fn node_deviation(a: &[(Exponent, BigRational)], b: &[(Exponent, BigRational)]) -> BigRational {
    a.iter().zip(b).map(|((_, x), (_, y))| (x - y).abs()).max().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{Coefficient, CoefficientDomain};

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn x(n: i64) -> Coefficient {
        Coefficient::x_pow(e(n, 1))
    }

    fn f3() -> CoefficientDomain {
        CoefficientDomain::perfect(3).unwrap()
    }

    #[test]
    fn middle_point_on_edge_is_dropped() {
        let f = Series::formal(f3(), [(e(0, 1), x(2)), (e(1, 1), x(1)), (e(2, 1), Coefficient::one())]).unwrap();
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.nodes(), &[(e(0, 1), q(2, 1)), (e(2, 1), q(0, 1))]);
        assert_eq!(np.eval(&q(5, 1)), Value::zero());
        assert_eq!(np.eval(&q(1, 2)), Value::ratio(3, 2));
    }

    #[test]
    fn single_node_and_increasing_points() {
        let f = Series::formal(f3(), [(e(1, 1), x(1))]).unwrap();
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.nodes(), &[(e(1, 1), q(1, 1))]);
        assert_eq!(np.eval(&q(1, 2)), Value::Infinite);

        let g = Series::formal(f3(), [(e(0, 1), x(1)), (e(1, 1), x(2))]).unwrap();
        assert_eq!(newton_polygon(&g).unwrap().nodes(), &[(e(0, 1), q(1, 1))]);

        assert_eq!(newton_polygon(&Series::formal(f3(), []).unwrap()), Err(PolygonError::ZeroSeries));
    }

    #[test]
    fn legendre_of_nodes() {
        let single = PLConvexFn::from_nodes(vec![(e(1, 1), q(2, 1))]).unwrap();
        assert_eq!(legendre_eval(&single, &GaussParam::ratio(1, 3)), Value::ratio(7, 3));
        let two = PLConvexFn::from_nodes(vec![(e(0, 1), q(2, 1)), (e(2, 1), q(0, 1))]).unwrap();
        assert_eq!(legendre_eval(&two, &GaussParam::ratio(1, 2)), Value::from_int(1));
        assert_eq!(legendre_eval(&two, &GaussParam::integer(3)), Value::from_int(2));
        let c = PLConvexFn::constant(q(5, 2));
        assert_eq!(legendre_eval(&c, &GaussParam::integer(7)), Value::ratio(5, 2));
    }

    #[test]
    fn node_validation() {
        assert_eq!(PLConvexFn::from_nodes(vec![]), Err(PolygonError::Empty));
        assert!(matches!(
            PLConvexFn::from_nodes(vec![(e(0, 1), q(0, 1)), (e(1, 1), q(1, 1))]),
            Err(PolygonError::Increasing(..))
        ));
        assert!(matches!(
            PLConvexFn::from_nodes(vec![(e(0, 1), q(2, 1)), (e(1, 1), q(2, 1)), (e(2, 1), q(0, 1))]),
            Err(PolygonError::NotConvex(_))
        ));
    }

    #[test]
    fn tropical_operations() {
        let grid = [GaussParam::integer(1)];
        let a = LegendreCurve::of_polygon(&PLConvexFn::from_nodes(vec![(e(1, 1), q(2, 1))]).unwrap(), &grid);
        let b = LegendreCurve::of_polygon(&PLConvexFn::from_nodes(vec![(e(2, 1), q(0, 1))]).unwrap(), &grid);
        assert_eq!(tropical_min(&a, &b).samples[0].1, Value::from_int(2));
        assert_eq!(tropical_min(&a, &a), a);

        let t = Series::formal(f3(), [(e(1, 1), Coefficient::one())]).unwrap();
        let grid = [GaussParam::ratio(1, 2), GaussParam::integer(3)];
        let lt = LegendreCurve::of_series(&t, &grid);
        assert_eq!(tropical_add(&lt, &lt), LegendreCurve::of_series(&t.mul(&t).unwrap(), &grid));
    }

    #[test]
    fn sup_distance_and_order() {
        let a = PLConvexFn::from_nodes(vec![(e(0, 1), q(2, 1)), (e(2, 1), q(0, 1))]).unwrap();
        let b = PLConvexFn::from_nodes(vec![(e(0, 1), q(2, 1)), (e(1, 1), q(1, 2)), (e(2, 1), q(0, 1))]).unwrap();
        assert_eq!(sup_distance(&a, &b), Value::ratio(1, 2));
        assert!(b.le(&a) && !a.le(&b));
        let shifted = a.translate(&e(1, 1), &q(0, 1));
        assert_eq!(sup_distance(&a, &shifted), Value::Infinite);
    }

    #[test]
    fn npf_examples() {
        let grid = [GaussParam::ratio(1, 2), GaussParam::integer(1), GaussParam::integer(2)];
        let t = |c: i64| (e(1, 1), Coefficient::constant(c));
        let f = Series::formal(f3(), [(e(0, 1), x(1)), t(1)]).unwrap();
        let g = Series::formal(f3(), [(e(0, 1), x(1)), t(2)]).unwrap();
        assert!(verify_npf(&f, &g, &grid).unwrap().passed());

        let one = Series::formal(f3(), [(e(0, 1), Coefficient::one())]).unwrap();
        let r = verify_npf(&one, &one, &grid).unwrap();
        assert!(r.passed());

        let h = Series::formal(f3(), [(e(0, 1), Coefficient::monomial(2, e(1, 1))), t(2)]).unwrap();
        let r = verify_npf(&f, &h, &grid).unwrap();
        assert!(r.passed());
        assert_eq!(r.superadditivity.checked, 3);
    }
}
