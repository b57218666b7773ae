//! Python bindings for `ratlog-core`.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use ratlog_core::aak::{self, AakOptions, DistanceSeries, Solver};
use ratlog_core::asymptotics;
use ratlog_core::fourier::{make_series, MethodPolicy, SeriesSide};
use ratlog_core::hankel::{self, HankelOperator};
use ratlog_core::symbol::{make_model_symbol, AnalyticSymbolSpec, CutoffSpec, Evaluation, SymbolSpec, DEFAULT_TAYLOR_DEGREE};
use ratlog_core::verify::{self, VerifyContext};
use ratlog_core::C64;

fn err(e: ratlog_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn options(tol: f64, seed: u64, solver: &str) -> PyResult<AakOptions> {
    let solver = match solver {
        "auto" => Solver::Auto,
        "dense" => Solver::Dense,
        "iterative" => Solver::Iterative,
        other => return Err(PyValueError::new_err(format!("unknown solver {other:?}"))),
    };
    Ok(AakOptions {
        tol,
        seed,
        solver,
        ..AakOptions::default()
    })
}

fn side(name: &str) -> PyResult<SeriesSide> {
    match name {
        "minus" => Ok(SeriesSide::Minus),
        "plus" => Ok(SeriesSide::Plus),
        other => Err(PyValueError::new_err(format!("side must be 'minus' or 'plus', got {other:?}"))),
    }
}

/// A validated symbol on the unit circle.
#[pyclass(name = "Symbol", module = "ratlog", frozen)]
struct Symbol {
    spec: SymbolSpec,
}

#[pymethods]
impl Symbol {
    /// Parses the JSON form used by config files.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|spec| Symbol { spec })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Localizes an analytic symbol (JSON with `singularities` and `alpha`).
    #[staticmethod]
    #[pyo3(signature = (text, c1 = 0.25, c = 0.5))]
    fn from_analytic_json(text: &str, c1: f64, c: f64) -> PyResult<Self> {
        let a: AnalyticSymbolSpec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let cutoff = CutoffSpec::new(c1, c).map_err(err)?;
        let spec = a.to_symbol_spec(cutoff, DEFAULT_TAYLOR_DEGREE).map_err(err)?;
        Ok(Symbol { spec })
    }

    /// `v0 omega_0 + v_plus omega_+ + v_minus omega_-` with one singularity at 1.
    #[staticmethod]
    #[pyo3(signature = (v0, v_plus, v_minus, alpha, c1 = 0.25, c = 0.5))]
    fn model(v0: C64, v_plus: C64, v_minus: C64, alpha: f64, c1: f64, c: f64) -> PyResult<Self> {
        let cutoff = CutoffSpec::new(c1, c).map_err(err)?;
        make_model_symbol(v0, v_plus, v_minus, alpha, cutoff)
            .map(|spec| Symbol { spec })
            .map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("symbol specs always serialize")
    }

    /// Value at angle `theta`, or `None` on a singularity.
    fn evaluate(&self, theta: f64) -> Option<C64> {
        match self.spec.evaluate(theta) {
            Evaluation::Finite(z) => Some(z),
            Evaluation::Singular { .. } => None,
        }
    }

    fn conjugate(&self) -> Self {
        Symbol {
            spec: self.spec.conjugate(),
        }
    }

    #[getter]
    fn alpha(&self) -> Option<f64> {
        self.spec.alpha()
    }

    fn __repr__(&self) -> String {
        format!("Symbol({})", self.to_json())
    }
}

/// Predicted limits of `n^gamma rho_n`.
#[pyclass(name = "Prediction", module = "ratlog", frozen, get_all)]
struct Prediction {
    alpha: f64,
    decay_exponent: f64,
    compact: bool,
    kappa: f64,
    a_plus: f64,
    a_minus: f64,
    a_merged: f64,
    b_minus: Vec<C64>,
    b_plus: Vec<C64>,
}

#[pymethods]
impl Prediction {
    fn __repr__(&self) -> String {
        format!(
            "Prediction(alpha={}, kappa={}, a_minus={}, a_plus={}, a_merged={})",
            self.alpha, self.kappa, self.a_minus, self.a_plus, self.a_merged
        )
    }
}

impl From<asymptotics::Prediction> for Prediction {
    fn from(p: asymptotics::Prediction) -> Self {
        Prediction {
            alpha: p.alpha,
            decay_exponent: p.decay_exponent,
            compact: p.compact,
            kappa: p.kappa,
            a_plus: p.a_plus,
            a_minus: p.a_minus,
            a_merged: p.a_merged,
            b_minus: p.b_minus,
            b_plus: p.b_plus,
        }
    }
}

/// Measured distances for one side.
#[pyclass(name = "Distances", module = "ratlog", frozen, get_all)]
struct Distances {
    side: String,
    values: Vec<f64>,
    residuals: Vec<f64>,
    converged_count: usize,
    n_used: usize,
    tail_proxy: f64,
}

impl From<&DistanceSeries> for Distances {
    fn from(s: &DistanceSeries) -> Self {
        Distances {
            side: s.side.as_str().to_string(),
            values: s.values.clone(),
            residuals: s.residuals.clone(),
            converged_count: s.converged_count,
            n_used: s.n_used,
            tail_proxy: s.tail_proxy,
        }
    }
}

#[pymethods]
impl Distances {
    fn __len__(&self) -> usize {
        self.values.len()
    }

    fn __repr__(&self) -> String {
        format!("Distances(side={:?}, n={}, converged={})", self.side, self.values.len(), self.converged_count)
    }
}

/// Measured distances on both sides together with the prediction.
#[pyclass(name = "Report", module = "ratlog", frozen, get_all)]
struct Report {
    minus: Py<Distances>,
    plus: Py<Distances>,
    merged: Py<Distances>,
    prediction: Py<Prediction>,
    /// `(side, n, rho_n, n^gamma rho_n, ratio)` rows.
    ratios: Vec<(String, usize, f64, f64, f64)>,
    flags: Vec<String>,
}

fn wrap_report(py: Python<'_>, r: aak::DistanceReport) -> PyResult<Report> {
    Ok(Report {
        minus: Py::new(py, Distances::from(&r.minus))?,
        plus: Py::new(py, Distances::from(&r.plus))?,
        merged: Py::new(py, Distances::from(&r.merged))?,
        prediction: Py::new(py, Prediction::from(r.prediction))?,
        ratios: r
            .ratios
            .iter()
            .map(|x| (x.side.as_str().to_string(), x.n, x.rho, x.scaled, x.ratio))
            .collect(),
        flags: r.flags,
    })
}

/// `kappa(alpha)`, the constant in the two-sided limit.
#[pyfunction]
fn kappa(alpha: f64) -> PyResult<f64> {
    asymptotics::kappa(alpha).map_err(err)
}

#[pyfunction]
fn predict(symbol: PyRef<'_, Symbol>) -> PyResult<Prediction> {
    asymptotics::predict(&symbol.spec).map(Prediction::from).map_err(err)
}

/// Hankel coefficients `h(0..length)` of one side.
#[pyfunction]
#[pyo3(signature = (symbol, length, side = "minus"))]
fn coefficients(py: Python<'_>, symbol: PyRef<'_, Symbol>, length: usize, side: &str) -> PyResult<Vec<C64>> {
    let s = self::side(side)?;
    let spec = symbol.spec.clone();
    py.detach(move || make_series(&spec, s, length, &MethodPolicy::default()))
        .map(|f| f.values)
        .map_err(err)
}

/// Leading `k` singular values of the `n x n` Hankel matrix `h(j + k)`.
#[pyfunction]
#[pyo3(signature = (h, n, k = None, tol = 1e-10, seed = hankel::DEFAULT_SEED, solver = "auto"))]
fn hankel_singular_values(
    py: Python<'_>,
    h: Vec<C64>,
    n: usize,
    k: Option<usize>,
    tol: f64,
    seed: u64,
    solver: &str,
) -> PyResult<Vec<f64>> {
    let opts = options(tol, seed, solver)?;
    let k = k.unwrap_or(n).min(n);
    py.detach(move || {
        let series = ratlog_core::fourier::FourierSeries::exact(SeriesSide::Minus, h);
        aak::singular_values(&series, k, n, &opts)
    })
    .map(|s| s.values)
    .map_err(err)
}

/// Fast product of the `n x n` Hankel section with `x`.
#[pyfunction]
fn hankel_matvec(h: Vec<C64>, x: Vec<C64>) -> PyResult<Vec<C64>> {
    let n = x.len();
    let op = HankelOperator::from_values(&h, n).map_err(err)?;
    Ok(op.matvec_fast(&x))
}

#[pyfunction]
#[pyo3(signature = (symbol, n_max, n, tol = 1e-10, seed = hankel::DEFAULT_SEED, solver = "auto"))]
fn rho_minus(
    py: Python<'_>,
    symbol: PyRef<'_, Symbol>,
    n_max: usize,
    n: usize,
    tol: f64,
    seed: u64,
    solver: &str,
) -> PyResult<Distances> {
    let opts = options(tol, seed, solver)?;
    let spec = symbol.spec.clone();
    py.detach(move || aak::rho_minus_with(&spec, n_max, n, &opts))
        .map(|s| Distances::from(&s))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (symbol, n_max, n, tol = 1e-10, seed = hankel::DEFAULT_SEED, solver = "auto"))]
fn rho_plus(
    py: Python<'_>,
    symbol: PyRef<'_, Symbol>,
    n_max: usize,
    n: usize,
    tol: f64,
    seed: u64,
    solver: &str,
) -> PyResult<Distances> {
    let opts = options(tol, seed, solver)?;
    let spec = symbol.spec.clone();
    py.detach(move || aak::rho_plus_with(&spec, n_max, n, &opts))
        .map(|s| Distances::from(&s))
        .map_err(err)
}

/// Distances on both sides, merged, and compared with the prediction.
#[pyfunction]
#[pyo3(signature = (symbol, n_max, n, tol = 1e-10, seed = hankel::DEFAULT_SEED, solver = "auto"))]
fn report(
    py: Python<'_>,
    symbol: PyRef<'_, Symbol>,
    n_max: usize,
    n: usize,
    tol: f64,
    seed: u64,
    solver: &str,
) -> PyResult<Report> {
    let opts = options(tol, seed, solver)?;
    let spec = symbol.spec.clone();
    let r = py.detach(move || aak::report_with(&spec, n_max, n, &opts)).map_err(err)?;
    wrap_report(py, r)
}

/// Sorted merge of two non-increasing sequences.
#[pyfunction]
fn merge(plus: Vec<f64>, minus: Vec<f64>) -> Vec<f64> {
    aak::merge_values(&plus, &minus)
}

/// Number of entries strictly above `s`.
#[pyfunction]
fn counting(values: Vec<f64>, s: f64) -> usize {
    aak::counting_values(&values, s).count
}

#[pyfunction]
fn bmo_norm(py: Python<'_>, symbol: PyRef<'_, Symbol>, n: usize) -> PyResult<f64> {
    let spec = symbol.spec.clone();
    py.detach(move || aak::bmo_norm(&spec, n)).map(|b| b.value).map_err(err)
}

#[pyfunction]
fn check_names() -> Vec<&'static str> {
    verify::check_names()
}

/// Runs a named check; returns `(passed, measured, threshold, detail)`.
#[pyfunction]
#[pyo3(signature = (name, seed = hankel::DEFAULT_SEED))]
fn run_check(py: Python<'_>, name: &str, seed: u64) -> PyResult<(bool, f64, f64, String)> {
    let check = verify::find(name).ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
    let o = py.detach(move || check.run(&VerifyContext { seed }));
    Ok((o.passed, o.measured, o.threshold, o.detail))
}

#[pymodule]
pub fn ratlog(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Symbol>()?;
    m.add_class::<Prediction>()?;
    m.add_class::<Distances>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_matvec, m)?)?;
    m.add_function(wrap_pyfunction!(rho_minus, m)?)?;
    m.add_function(wrap_pyfunction!(rho_plus, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(merge, m)?)?;
    m.add_function(wrap_pyfunction!(counting, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_norm, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
