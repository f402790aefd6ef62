//! Python bindings for the `tdpoly` engine.
//!
//! Exact values cross the boundary as `fractions.Fraction` (or `int` for
//! integer sequences). Rational inputs accept anything whose `str()` is
//! `"p"` or `"p/q"`: ints, `Fraction`s, and strings.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::sync::PyOnceLock;
use pyo3::types::PyDict;

use tdpoly::identities::{check_bernoulli_stirling_form, check_kellner, check_reductions, check_worpitzky_classic};
use tdpoly::triangles::global_cache;
use tdpoly::quadrature::{improper_integral_theorem4_f64, tanny_dowling_egf_closed_form};
use tdpoly::{Error, IdentityCheck, Integer, Polynomial, Rational, Selection, SweepGrid};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::InvalidParameter(_) | Error::ParseRational(_) => PyValueError::new_err(e.to_string()),
        Error::ZeroDenominator | Error::DivisionByZero => PyArithmeticError::new_err(e.to_string()),
        Error::Divergent(_) | Error::Convergence(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_rational(text: &str) -> Result<Rational, Error> {
    text.trim().parse()
}

fn extract_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(PyValueError::new_err("floats are not exact; pass an int, Fraction or \"p/q\" string"));
    }
    parse_rational(&obj.str()?.to_cow()?).map_err(to_py_err)
}

fn params(m: i64, a: &Bound<'_, PyAny>) -> PyResult<tdpoly::WhitneyParams> {
    tdpoly::WhitneyParams::new(m, extract_rational(a)?).map_err(to_py_err)
}

fn whitney_entry(p: &tdpoly::WhitneyParams, n: usize, k: i64) -> Rational {
    global_cache().get(p, n).get(n, k)
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    static FRACTION: PyOnceLock<Py<PyAny>> = PyOnceLock::new();
    let cls = FRACTION.import(py, "fractions", "Fraction")?;
    cls.call1((q.to_string(),))
}

fn int<'py>(py: Python<'py>, v: &Integer) -> PyResult<Bound<'py, PyAny>> {
    py.get_type::<pyo3::types::PyInt>().call1((v.to_string(),))
}

fn fractions<'py>(py: Python<'py>, qs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    qs.iter().map(|q| fraction(py, q)).collect()
}

fn coefficients<'py>(py: Python<'py>, p: &Polynomial, n: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    fractions(py, &(0..=n.max(p.degree().unwrap_or(0))).map(|k| p.coeff(k)).collect::<Vec<_>>())
}

fn from_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn check_dict<'py>(py: Python<'py>, check: &IdentityCheck) -> PyResult<Bound<'py, PyAny>> {
    from_json(py, check)
}

/// Noncentral Whitney parameters `(m, a)` with `m >= 1`.
#[pyclass(frozen, name = "WhitneyParams", module = "tdpoly")]
struct PyWhitneyParams {
    inner: tdpoly::WhitneyParams,
}

#[pymethods]
impl PyWhitneyParams {
    #[new]
    #[pyo3(signature = (m=1, a=None))]
    fn new(m: i64, a: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let a = a.map(extract_rational).transpose()?.unwrap_or_else(Rational::zero);
        Ok(PyWhitneyParams { inner: tdpoly::WhitneyParams::new(m, a).map_err(to_py_err)? })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn a<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.a())
    }

    fn whitney2<'py>(&self, py: Python<'py>, n: usize, k: i64) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &whitney_entry(&self.inner, n, k))
    }

    fn table<'py>(&self, py: Python<'py>, nmax: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        tdpoly::whitney2_table(&self.inner, nmax).rows().iter().map(|r| fractions(py, r)).collect()
    }

    fn dowling<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
        coefficients(py, &tdpoly::dowling_poly(&self.inner, n), n)
    }

    fn tanny_dowling<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
        coefficients(py, &tdpoly::tanny_dowling_poly(&self.inner, n), n)
    }

    fn __repr__(&self) -> String {
        format!("WhitneyParams(m={}, a={})", self.inner.m(), self.inner.a())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (self.inner.m(), self.inner.a().to_string()).hash(&mut h);
        h.finish()
    }
}

#[pyfunction]
fn stirling2<'py>(py: Python<'py>, n: usize, k: i64) -> PyResult<Bound<'py, PyAny>> {
    int(py, &tdpoly::stirling2(n, k))
}

#[pyfunction]
fn whitney2<'py>(py: Python<'py>, m: i64, a: &Bound<'py, PyAny>, n: usize, k: i64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &whitney_entry(&params(m, a)?, n, k))
}

/// Explicit-sum route, independent of the recurrence behind `whitney2`.
#[pyfunction]
fn whitney2_explicit<'py>(py: Python<'py>, m: i64, a: &Bound<'py, PyAny>, n: usize, k: i64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &tdpoly::whitney2_explicit(&params(m, a)?, n, k))
}

#[pyfunction]
fn whitney2_table<'py>(py: Python<'py>, m: i64, a: &Bound<'py, PyAny>, nmax: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    tdpoly::whitney2_table(&params(m, a)?, nmax).rows().iter().map(|r| fractions(py, r)).collect()
}

#[pyfunction]
fn dowling_poly<'py>(py: Python<'py>, m: i64, a: &Bound<'py, PyAny>, n: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    coefficients(py, &tdpoly::dowling_poly(&params(m, a)?, n), n)
}

#[pyfunction]
fn tanny_dowling_poly<'py>(py: Python<'py>, m: i64, a: &Bound<'py, PyAny>, n: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    coefficients(py, &tdpoly::tanny_dowling_poly(&params(m, a)?, n), n)
}

#[pyfunction]
fn exponential_poly(py: Python<'_>, n: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    coefficients(py, &tdpoly::exponential_poly(n), n)
}

#[pyfunction]
fn geometric_poly(py: Python<'_>, n: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    coefficients(py, &tdpoly::geometric_poly(n), n)
}

#[pyfunction]
fn bernoulli_number(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &tdpoly::bernoulli_number(n))
}

#[pyfunction]
fn bernoulli_poly(py: Python<'_>, n: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    coefficients(py, &tdpoly::bernoulli_poly(n), n)
}

#[pyfunction]
fn bernoulli_poly_eval<'py>(py: Python<'py>, n: usize, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &tdpoly::bernoulli_poly_eval(n, &extract_rational(x)?))
}

/// Evaluates a coefficient list exactly at `x`.
#[pyfunction]
fn poly_eval<'py>(py: Python<'py>, coeffs: Vec<Bound<'py, PyAny>>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let p = Polynomial::new(coeffs.iter().map(extract_rational).collect::<PyResult<_>>()?);
    fraction(py, &p.eval(&extract_rational(x)?))
}

/// Runs one named identity at `(m, a, n)` and returns its record as a dict.
#[pyfunction]
#[pyo3(signature = (identity, n, m=1, a=None))]
fn check_identity<'py>(
    py: Python<'py>,
    identity: &str,
    n: usize,
    m: i64,
    a: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let a = a.map(extract_rational).transpose()?.unwrap_or_else(Rational::zero);
    let p = tdpoly::WhitneyParams::new(m, a).map_err(to_py_err)?;
    let check = match identity.to_ascii_uppercase().as_str() {
        "THEOREM1" => tdpoly::check_theorem1(&p, n),
        "COROLLARY2" => tdpoly::check_corollary2(&p, n),
        "WORPITZKY_GENERAL" => tdpoly::check_worpitzky_general(&p, n),
        "THEOREM3_EXACT" => tdpoly::check_theorem3_exact(&p, n),
        "KELLNER" => check_kellner(n),
        "WORPITZKY_CLASSIC" => check_worpitzky_classic(n),
        "BERNOULLI_STIRLING" => check_bernoulli_stirling_form(n).map_err(to_py_err)?,
        "REDUCTION" => {
            let checks = check_reductions(n);
            return checks.iter().map(|c| check_dict(py, c)).collect::<PyResult<Vec<_>>>().map(|v| {
                pyo3::types::PyList::new(py, v).map(Bound::into_any)
            })?;
        }
        other => return Err(PyValueError::new_err(format!("unknown identity {other:?}"))),
    };
    check_dict(py, &check)
}

/// Exact sweep over a parameter grid; returns the JSON report as a dict.
#[pyfunction]
#[pyo3(signature = (kind="all", mmin=1, mmax=5, amin=None, amax=None, astep=None, nmax=25))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    kind: &str,
    mmin: i64,
    mmax: i64,
    amin: Option<&Bound<'py, PyAny>>,
    amax: Option<&Bound<'py, PyAny>>,
    astep: Option<&Bound<'py, PyAny>>,
    nmax: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let selection: Selection = kind.parse().map_err(to_py_err)?;
    let or = |v: Option<&Bound<'py, PyAny>>, d: i64, den: i64| -> PyResult<Rational> {
        v.map(extract_rational).transpose()?.map_or_else(|| Rational::new(d, den).map_err(to_py_err), Ok)
    };
    let grid = SweepGrid::from_ranges(mmin, mmax, &or(amin, -3, 1)?, &or(amax, 3, 1)?, &or(astep, 1, 2)?, nmax)
        .map_err(to_py_err)?;
    let report = py.detach(|| tdpoly::verify_sweep(&grid, selection));
    from_json(py, &report)
}

/// `(nodes, weights)` of the Gauss-Laguerre rule of the given order.
#[pyfunction]
fn laguerre_rule(order: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let rule = tdpoly::laguerre_rule(order).map_err(to_py_err)?;
    Ok((rule.nodes().to_vec(), rule.weights().to_vec()))
}

/// `(computed, target)` for the Gauss-Laguerre transform of `D̃(n; x λ)`.
#[pyfunction]
#[pyo3(signature = (m, a, n, x, order=64))]
fn laguerre_transform_check(m: i64, a: &Bound<'_, PyAny>, n: usize, x: f64, order: usize) -> PyResult<(f64, f64)> {
    let r = tdpoly::check_theorem3_numeric(&params(m, a)?, n, x, order).map_err(to_py_err)?;
    Ok((r.computed, r.target))
}

/// `(computed, target)` for `∫_{-1}^{0} F̃(n; m x) dx` by adaptive Simpson.
#[pyfunction]
#[pyo3(signature = (m, a, n, tol=1e-10))]
fn bernoulli_integral_check(m: i64, a: &Bound<'_, PyAny>, n: usize, tol: f64) -> PyResult<(f64, f64)> {
    let r = tdpoly::check_theorem1_numeric(&params(m, a)?, n, tol).map_err(to_py_err)?;
    Ok((r.computed, r.target))
}

/// Truncated EGF series, closed form and improper integral at `(x, z)`.
#[pyfunction]
#[pyo3(signature = (m, a, x, z, terms=40))]
fn egf_check<'py>(
    py: Python<'py>,
    m: i64,
    a: &Bound<'py, PyAny>,
    x: &Bound<'py, PyAny>,
    z: &Bound<'py, PyAny>,
    terms: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = tdpoly::check_theorem4_series(&params(m, a)?, &extract_rational(x)?, &extract_rational(z)?, terms)
        .map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("series", r.series)?;
    d.set_item("closed_form", r.closed_form)?;
    d.set_item("integral", r.integral)?;
    d.set_item("residual", r.residual)?;
    Ok(d.into_any())
}

/// Closed-form EGF `m e^{-az} / (m - x(e^{mz} - 1))` for real parameters.
#[pyfunction]
fn egf_closed_form(m: f64, a: f64, x: f64, z: f64) -> PyResult<f64> {
    tanny_dowling_egf_closed_form(m, a, x, z).map_err(to_py_err)
}

/// The improper `λ`-integral form of the EGF for real (possibly irrational) `a`.
#[pyfunction]
fn egf_integral(m: f64, a: f64, x: f64, z: f64) -> PyResult<f64> {
    improper_integral_theorem4_f64(m, a, x, z).map_err(to_py_err)
}

#[pymodule]
#[pyo3(name = "tdpoly")]
fn tdpoly_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWhitneyParams>()?;
    m.add_function(wrap_pyfunction!(stirling2, m)?)?;
    m.add_function(wrap_pyfunction!(whitney2, m)?)?;
    m.add_function(wrap_pyfunction!(whitney2_explicit, m)?)?;
    m.add_function(wrap_pyfunction!(whitney2_table, m)?)?;
    m.add_function(wrap_pyfunction!(dowling_poly, m)?)?;
    m.add_function(wrap_pyfunction!(tanny_dowling_poly, m)?)?;
    m.add_function(wrap_pyfunction!(exponential_poly, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_poly, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_number, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_poly, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_poly_eval, m)?)?;
    m.add_function(wrap_pyfunction!(poly_eval, m)?)?;
    m.add_function(wrap_pyfunction!(check_identity, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_rule, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_transform_check, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_integral_check, m)?)?;
    m.add_function(wrap_pyfunction!(egf_check, m)?)?;
    m.add_function(wrap_pyfunction!(egf_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(egf_integral, m)?)?;
    Ok(())
}
