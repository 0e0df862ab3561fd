//! Python bindings: series parsing and arithmetic, Gauss valuations, Newton
//! polygons, Legendre transforms, the chain report and the property suites.

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use npf_core::duconstruct;
use npf_core::literal::parse_series;
use npf_core::polygon::{legendre_eval, newton_polygon};
use npf_core::series::gauss_valuation;
use npf_core::value::{fmt_rational, parse_rational};
use npf_core::{CoefficientDomain, GaussParam, Mode};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<BigRational> {
    parse_rational(text).map_err(err)
}

fn gauss_param(text: &str) -> PyResult<GaussParam> {
    text.parse().map_err(err)
}

/// Domain for a mode name and optional domain name.
fn domain_for(mode: &str, domain: Option<&str>, p: u32, prec_n: u32) -> Result<(CoefficientDomain, Mode), String> {
    let dom = match (mode, domain) {
        ("formal", None | Some("perfect")) => CoefficientDomain::perfect(p),
        ("arithmetic", None | Some("padic")) => CoefficientDomain::padic(p, prec_n),
        ("arithmetic", Some("mixed")) => CoefficientDomain::mixed(p, prec_n),
        (m, d) => return Err(format!("unsupported mode/domain pair {m}/{}", d.unwrap_or("-"))),
    }
    .map_err(|e| e.to_string())?;
    let mode = if mode == "formal" { Mode::Formal } else { Mode::Arithmetic };
    Ok((dom, mode))
}

/// A truncated series over a fixed coefficient domain.
#[pyclass(name = "Series", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: npf_core::Series,
}

#[pymethods]
impl PySeries {
    #[new]
    #[pyo3(signature = (text, mode = "formal", p = 2, prec_n = 32, domain = None))]
    fn new(text: &str, mode: &str, p: u32, prec_n: u32, domain: Option<&str>) -> PyResult<Self> {
        let (dom, mode) = domain_for(mode, domain, p, prec_n).map_err(err)?;
        Ok(PySeries { inner: parse_series(text, &dom, mode).map_err(err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Series('{}')", self.inner)
    }

    fn __eq__(&self, other: &PySeries) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: &PySeries) -> PyResult<PySeries> {
        Ok(PySeries { inner: self.inner.add(&other.inner).map_err(err)? })
    }

    fn __mul__(&self, other: &PySeries) -> PyResult<PySeries> {
        Ok(PySeries { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(value, exact)` with `value` as `num/den` or `inf`.
    fn gauss(&self, s: &str) -> PyResult<(String, bool)> {
        let v = gauss_valuation(&self.inner, &gauss_param(s)?);
        Ok((v.value.to_string(), v.exact))
    }

    /// Polygon nodes as `(x, y)` string pairs.
    fn newton_polygon(&self) -> PyResult<Vec<(String, String)>> {
        let np = newton_polygon(&self.inner).map_err(err)?;
        Ok(np.nodes().iter().map(|(x, y)| (x.to_string(), fmt_rational(y))).collect())
    }

    fn legendre(&self, s: &str) -> PyResult<String> {
        let np = newton_polygon(&self.inner).map_err(err)?;
        Ok(legendre_eval(&np, &gauss_param(s)?).to_string())
    }

    /// Every coefficient has positive valuation.
    fn in_m(&self) -> bool {
        duconstruct::in_m(&self.inner)
    }
}

/// `{"mu", "r", "c", "exact", "max_rel_err"}` for `L(c x^{-r}) = s^mu`.
#[pyfunction]
fn inverse_legendre_power<'py>(py: Python<'py>, mu: &str) -> PyResult<Bound<'py, PyDict>> {
    let inv = duconstruct::inverse_legendre_power(&rational(mu)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mu", fmt_rational(&inv.mu))?;
    d.set_item("r", fmt_rational(&inv.r))?;
    d.set_item("c", inv.c.to_string())?;
    d.set_item("c_float", inv.c.to_f64())?;
    d.set_item("exact", inv.c.exact().is_some())?;
    d.set_item("max_rel_err", inv.max_rel_err)?;
    Ok(d)
}

/// `"o"`, `"Θ"` or `"ω"` for `s^a` against `s^b`.
#[pyfunction]
fn classify(a: &str, b: &str) -> PyResult<String> {
    let f = duconstruct::PowerLaw::pure(rational(a)?);
    let g = duconstruct::PowerLaw::pure(rational(b)?);
    Ok(duconstruct::classify(&f, &g).verdict.to_string())
}

/// Chain report over `mus` as a dictionary of plain values.
#[pyfunction]
#[pyo3(signature = (mus, depth = 1024, p = 2))]
fn chain_report<'py>(py: Python<'py>, mus: Vec<String>, depth: u64, p: u32) -> PyResult<Bound<'py, PyDict>> {
    let grid = mus.iter().map(|m| rational(m)).collect::<PyResult<Vec<_>>>()?;
    let dom = CoefficientDomain::perfect(p).map_err(err)?;
    let rep = duconstruct::chain_report(&grid, depth, &dom).map_err(err)?;
    let pairs: Vec<_> = rep
        .pairs
        .iter()
        .map(|x| (fmt_rational(&x.mu), fmt_rational(&x.lambda), x.class.verdict.to_string(), x.separated))
        .collect();
    let realizations = rep
        .realizations
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("mu", fmt_rational(&r.mu))?;
            d.set_item("law", r.law.to_string())?;
            d.set_item("in_m", r.in_m)?;
            d.set_item("within_band", r.within_band)?;
            d.set_item("ratios", r.samples.iter().map(|x| x.ratio).collect::<Vec<_>>())?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let d = PyDict::new(py);
    d.set_item("pairs", pairs)?;
    d.set_item("realizations", realizations)?;
    d.set_item("passed", rep.passed)?;
    Ok(d)
}

/// `(limit, partial_values)` of the infimum-not-attained example.
#[pyfunction]
#[pyo3(signature = (s = "1", depth = 100))]
fn example_sup(s: &str, depth: u64) -> PyResult<(String, Vec<String>)> {
    let ex = duconstruct::example_sup(&gauss_param(s)?, depth).map_err(err)?;
    Ok((ex.limit.to_string(), ex.partial_values.iter().map(ToString::to_string).collect()))
}

/// `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", cases = 200, seed = 0))]
fn run_verify(py: Python<'_>, suite: &str, cases: usize, seed: u64) -> PyResult<(bool, String)> {
    let rep = py.detach(|| npf_core::verify::run_verify(suite, cases, seed)).map_err(err)?;
    Ok((rep.passed(), rep.to_string()))
}

#[pymodule]
fn npf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(inverse_legendre_power, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(chain_report, m)?)?;
    m.add_function(wrap_pyfunction!(example_sup, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("SUITES", npf_core::verify::SUITES.to_vec())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_domain_pairs() {
        assert!(domain_for("formal", None, 2, 32).is_ok());
        assert!(domain_for("arithmetic", Some("mixed"), 3, 16).is_ok());
        assert!(domain_for("formal", Some("padic"), 2, 32).is_err());
        assert!(domain_for("arithmetic", Some("perfect"), 2, 32).is_err());
        assert!(domain_for("formal", None, 4, 32).is_err());
    }
}
