//! Python bindings: the q-Gaussian law, its involution and the theorem pipeline.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use qconv_core::error::Error;
use qconv_core::involution::GammaMap;
use qconv_core::moments::{self, PipelineConfig};
use qconv_core::qspecial::{self, QContext};
use qconv_core::transform::{default_nodes, WCoefficients};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidQ(_) | Error::Config(_) | Error::OutOfDomain { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn config(tol_quad: f64, k_max: Option<usize>, nodes: Option<usize>) -> PipelineConfig {
    PipelineConfig {
        tol_quad,
        k_max,
        nodes,
        ..PipelineConfig::default()
    }
}

/// The q-Gaussian law on `[-L, L]` together with its involution `gamma`.
#[pyclass(frozen)]
struct QGaussian {
    gamma: GammaMap,
}

#[pymethods]
impl QGaussian {
    #[new]
    fn new(q: f64) -> PyResult<Self> {
        let ctx = QContext::new(q).map_err(to_py)?;
        Ok(Self {
            gamma: GammaMap::new(&ctx),
        })
    }

    #[getter]
    fn q(&self) -> f64 {
        self.gamma.ctx().q()
    }

    /// Half-width `L = 2 / sqrt(1 - q)` of the support.
    #[getter]
    fn support(&self) -> f64 {
        self.gamma.ctx().support()
    }

    fn density(&self, x: f64) -> f64 {
        self.gamma.cdf().density().evaluate(x)
    }

    fn cdf(&self, x: f64) -> PyResult<f64> {
        self.gamma.cdf().cdf(x).map_err(to_py)
    }

    fn inv_cdf(&self, p: f64) -> PyResult<f64> {
        self.gamma.cdf().inv_cdf(p).map_err(to_py)
    }

    fn gamma(&self, x: f64) -> PyResult<f64> {
        self.gamma.eval(x).map_err(to_py)
    }

    fn fixed_point(&self) -> f64 {
        self.gamma.fixed_point()
    }

    /// Gauss rule with `n` nodes as a list of `(x, weight)` pairs.
    fn quadrature(&self, n: usize) -> PyResult<Vec<(f64, f64)>> {
        let rule = qspecial::quadrature(self.gamma.ctx(), n).map_err(to_py)?;
        Ok(rule.iter().collect())
    }

    fn __repr__(&self) -> String {
        format!("QGaussian(q={})", self.q())
    }
}

#[pyfunction]
fn q_bracket(n: usize, q: f64) -> PyResult<f64> {
    qspecial::q_bracket(n, q).map_err(to_py)
}

#[pyfunction]
fn q_factorial(n: usize, q: f64) -> PyResult<f64> {
    qspecial::q_factorial(n, q).map_err(to_py)
}

#[pyfunction]
fn hermite_eval(n: usize, x: f64, q: f64) -> f64 {
    qspecial::hermite_eval(n, x, q)
}

/// `sum over pair partitions of {1..order}` of `q^crossings`.
#[pyfunction]
fn pair_partition_moment(order: usize, q: f64) -> PyResult<f64> {
    moments::moment_pair_partitions(order, q).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (q, n_levels = 6))]
fn m4_sum_operator(q: f64, n_levels: usize) -> PyResult<f64> {
    moments::m4_sum_operator(q, n_levels).map_err(to_py)
}

/// `[(w_k1, w^_k1^2)]` for `k <= k_max`.
#[pyfunction]
#[pyo3(signature = (q, k_max = None, nodes = None))]
fn w_column(q: f64, k_max: Option<usize>, nodes: Option<usize>) -> PyResult<Vec<(f64, f64)>> {
    let ctx = QContext::new(q).map_err(to_py)?;
    let k = k_max.unwrap_or(ctx.k_max());
    let gamma = GammaMap::new(&ctx);
    let w = WCoefficients::build_with(&gamma, k, nodes.unwrap_or_else(|| default_nodes(k))).map_err(to_py)?;
    Ok(w.column_one())
}

/// The fourth-moment report for `q` as a dict.
#[pyfunction]
#[pyo3(signature = (q, tol_quad = QContext::DEFAULT_TOL_QUAD, k_max = None, nodes = None))]
fn theorem_check<'py>(
    py: Python<'py>,
    q: f64,
    tol_quad: f64,
    k_max: Option<usize>,
    nodes: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let report = moments::theorem_check_with(q, &config(tol_quad, k_max, nodes)).map_err(to_py)?;
    json_to_py(py, &report)
}

/// Theorem pipeline on `steps` equally spaced points, as a list of dicts.
#[pyfunction]
#[pyo3(signature = (qmin = 0.02, qmax = 0.98, steps = 50))]
fn sweep<'py>(py: Python<'py>, qmin: f64, qmax: f64, steps: usize) -> PyResult<Bound<'py, PyAny>> {
    let grid = moments::uniform_grid(qmin, qmax, steps);
    let rows = py.detach(|| moments::sweep(&grid, &PipelineConfig::default()));
    json_to_py(py, &rows)
}

#[pymodule]
fn qconv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<QGaussian>()?;
    m.add_function(wrap_pyfunction!(q_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(q_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_eval, m)?)?;
    m.add_function(wrap_pyfunction!(pair_partition_moment, m)?)?;
    m.add_function(wrap_pyfunction!(m4_sum_operator, m)?)?;
    m.add_function(wrap_pyfunction!(w_column, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
