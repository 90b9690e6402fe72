//! Python bindings: grids, curves, model fitting/prediction, the synthetic
//! data generator, diagnostics, and the sweep runners.
//!
//! Build the cdylib with `cargo build -p pfr-py` and import the resulting
//! shared library as `pfr_py` (see `python/smoke_test.py`).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyType;

use pfr_core::diagnostics;
use pfr_core::experiment::{
    run_diagnostics, run_error_curve, run_recovery_check, ExperimentConfig,
};
use pfr_core::filters::{check_qualification, FilterScheme, FilterSpec};
use pfr_core::groundtruth::{cosine_projection, model_truth_error, TruthSpec};
use pfr_core::simulate::{self, NoiseSpec, ProcessSpec};
use pfr_core::solver;
use pfr_core::{Curve, Grid as CoreGrid, PfrError};

fn pyerr(e: PfrError) -> PyErr {
    match e {
        PfrError::SolveFailure(_) | PfrError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_filter(scheme: &str, lambda: f64, iterations: u32, step_size: f64) -> PyResult<FilterSpec> {
    let scheme = match scheme {
        "tikhonov" => FilterScheme::Tikhonov,
        "iterated_tikhonov" => FilterScheme::IteratedTikhonov,
        "tsvd" => FilterScheme::Tsvd,
        "landweber" => FilterScheme::Landweber,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown filter scheme `{other}`"
            )))
        }
    };
    let spec = FilterSpec {
        scheme,
        lambda,
        iterations,
        step_size,
    };
    spec.validate().map_err(pyerr)?;
    Ok(spec)
}

/// Uniform sampling grid over `[t_start, t_end]`.
#[pyclass(name = "Grid", from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: CoreGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (t_start=0.0, t_end=std::f64::consts::TAU, n_points=2048))]
    fn new(t_start: f64, t_end: f64, n_points: usize) -> PyResult<Self> {
        Ok(PyGrid {
            inner: CoreGrid::new(t_start, t_end, n_points).map_err(pyerr)?,
        })
    }

    #[getter]
    fn t_start(&self) -> f64 {
        self.inner.t_start
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.inner.t_end
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points
    }

    /// Grid nodes as a list.
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().collect()
    }

    /// Sample `cos(freq t)` on the grid.
    fn cosine(&self, freq: u32) -> PyCurve {
        PyCurve {
            inner: self.inner.cosine(freq),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(t_start={}, t_end={}, n_points={})",
            self.inner.t_start, self.inner.t_end, self.inner.n_points
        )
    }
}

/// A function sampled on a grid.
#[pyclass(name = "Curve", from_py_object)]
#[derive(Clone)]
struct PyCurve {
    inner: Curve,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(grid: PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyCurve {
            inner: Curve::new(grid.inner, values).map_err(pyerr)?,
        })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: *self.inner.grid(),
        }
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }

    fn l2_norm(&self) -> f64 {
        pfr_core::l2_norm(&self.inner)
    }

    /// Trapezoidal L2 inner product with another curve on the same grid.
    fn l2_inner(&self, other: &PyCurve) -> PyResult<f64> {
        pfr_core::l2_inner(&self.inner, &other.inner).map_err(pyerr)
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }
}

/// A closed-form cosine-tensor regression target.
#[pyclass(name = "Truth", from_py_object)]
#[derive(Clone)]
struct PyTruth {
    inner: TruthSpec,
}

#[pymethods]
impl PyTruth {
    /// The intercept-plus-quadratic reference target.
    #[classmethod]
    fn standard_quadratic(_cls: &Bound<'_, PyType>) -> Self {
        PyTruth {
            inner: TruthSpec::standard_quadratic(),
        }
    }

    /// The linear restriction of the reference target.
    #[classmethod]
    fn standard_linear(_cls: &Bound<'_, PyType>) -> Self {
        PyTruth {
            inner: TruthSpec::standard_linear(),
        }
    }

    /// Parse from the JSON form `{"p": .., "terms": [[{"c": .., "f": [..]}], ..]}`.
    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        let inner: TruthSpec =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(pyerr)?;
        Ok(PyTruth { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    /// Same target re-declared at a higher order with empty degrees added.
    fn padded_to_order(&self, p: u32) -> PyResult<Self> {
        Ok(PyTruth {
            inner: self.inner.padded_to_order(p).map_err(pyerr)?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p
    }

    /// Analytic squared L2 norm of the degree-l component.
    fn l2_norm_sq(&self, l: u32) -> PyResult<f64> {
        self.inner.l2_norm_sq(l).map_err(pyerr)
    }

    /// Exact response of the target on a curve.
    fn response(&self, x: &PyCurve) -> f64 {
        simulate::response_from_truth(&self.inner, &x.inner)
    }
}

/// A fitted order-p regression.
#[pyclass(name = "Model")]
struct PyModel {
    inner: solver::PfrModel,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn b0(&self) -> f64 {
        self.inner.intercept()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.coefficients().to_vec()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.order()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: *self.inner.grid(),
        }
    }

    fn predict(&self, x: &PyCurve) -> PyResult<f64> {
        solver::predict(&self.inner, &x.inner).map_err(pyerr)
    }

    /// Exact L2 distance to a closed-form target of the same order.
    fn truth_error(&self, truth: &PyTruth) -> PyResult<f64> {
        model_truth_error(&self.inner, &truth.inner).map_err(pyerr)
    }

    /// Coefficient of `cos(f_1 s_1)...cos(f_l s_l)` in the fitted degree-l
    /// component.
    fn cosine_projection(&self, l: u32, frequencies: Vec<u32>) -> PyResult<f64> {
        cosine_projection(&self.inner, l, &frequencies).map_err(pyerr)
    }

    /// Eigenvalues of `K/N`, nonincreasing.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let view =
            diagnostics::SpectrumView::from_model(&self.inner, None).map_err(pyerr)?;
        Ok(view.eigenvalues().to_vec())
    }

    /// Serialize to the versioned JSON model format.
    fn to_json(&self) -> String {
        String::from_utf8(solver::save_model(&self.inner)).expect("utf8 json")
    }

    fn save(&self, path: &str) -> PyResult<()> {
        std::fs::write(path, solver::save_model(&self.inner))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[classmethod]
    fn load(_cls: &Bound<'_, PyType>, path: &str) -> PyResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(PyModel {
            inner: solver::load_model(&bytes).map_err(pyerr)?,
        })
    }

    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: solver::load_model(text.as_bytes()).map_err(pyerr)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(p={}, n_samples={}, b0={:.6})",
            self.inner.order(),
            self.inner.len(),
            self.inner.intercept()
        )
    }
}

fn curves_of(curves: &[PyCurve]) -> Vec<Curve> {
    curves.iter().map(|c| c.inner.clone()).collect()
}

/// Draw a dataset from the random cosine process and the given target.
/// Returns `(curves, responses, xi)`.
#[pyfunction]
#[pyo3(signature = (n, seed, truth=None, grid=None, max_frequency=5, coefficient_bound=1.0, noise=None, noise_param=0.0))]
#[allow(clippy::too_many_arguments)]
fn make_dataset(
    n: usize,
    seed: u64,
    truth: Option<PyTruth>,
    grid: Option<PyGrid>,
    max_frequency: u32,
    coefficient_bound: f64,
    noise: Option<&str>,
    noise_param: f64,
) -> PyResult<(Vec<PyCurve>, Vec<f64>, Vec<Vec<f64>>)> {
    let grid = grid.map(|g| g.inner).unwrap_or_default();
    let truth = truth
        .map(|t| t.inner)
        .unwrap_or_else(TruthSpec::standard_quadratic);
    let process = ProcessSpec::new(max_frequency, coefficient_bound, grid).map_err(pyerr)?;
    let noise = match noise {
        None | Some("none") => NoiseSpec::none(),
        Some("gaussian") => NoiseSpec::gaussian(noise_param),
        Some("bounded_uniform") => NoiseSpec::bounded_uniform(noise_param),
        Some(other) => {
            return Err(PyValueError::new_err(format!(
                "unknown noise kind `{other}`"
            )))
        }
    };
    let ds = simulate::make_dataset(&process, &truth, &noise, n, seed).map_err(pyerr)?;
    Ok((
        ds.curves.into_iter().map(|inner| PyCurve { inner }).collect(),
        ds.responses,
        ds.xi,
    ))
}

/// Closed-form response of the standard experiment for a length-6
/// coefficient row.
#[pyfunction]
fn response_oracle(xi: Vec<f64>) -> PyResult<f64> {
    simulate::response_oracle(&xi).map_err(pyerr)
}

/// Fit with a spectral filter; scheme is one of `tikhonov`,
/// `iterated_tikhonov`, `tsvd`, `landweber`. `min_norm` truncates
/// sub-resolution spectrum directions (recommended for reporting).
#[pyfunction]
#[pyo3(signature = (curves, responses, lambda, p, scheme="iterated_tikhonov", iterations=4, step_size=1.0, min_norm=true))]
#[allow(clippy::too_many_arguments)]
fn fit_spectral(
    curves: Vec<PyCurve>,
    responses: Vec<f64>,
    lambda: f64,
    p: u32,
    scheme: &str,
    iterations: u32,
    step_size: f64,
    min_norm: bool,
) -> PyResult<PyModel> {
    let filter = parse_filter(scheme, lambda, iterations, step_size)?;
    let cs = curves_of(&curves);
    let report = if min_norm {
        solver::fit_spectral_min_norm(&cs, &responses, &filter, p)
    } else {
        solver::fit_spectral(&cs, &responses, &filter, p)
    }
    .map_err(pyerr)?;
    Ok(PyModel {
        inner: report.model,
    })
}

/// Fit by the iterated-Tikhonov coefficient recurrence (q solves of the
/// reduced system with one factorization).
#[pyfunction]
#[pyo3(signature = (curves, responses, lambda, p, q=4))]
fn fit_iterated(
    curves: Vec<PyCurve>,
    responses: Vec<f64>,
    lambda: f64,
    p: u32,
    q: u32,
) -> PyResult<PyModel> {
    let cs = curves_of(&curves);
    let report = solver::fit_iterated(&cs, &responses, lambda, p, q).map_err(pyerr)?;
    Ok(PyModel {
        inner: report.model,
    })
}

/// Fit with plain Tikhonov via the reduced (N+1)-unknown system.
#[pyfunction]
fn fit_tikhonov(curves: Vec<PyCurve>, responses: Vec<f64>, lambda: f64, p: u32) -> PyResult<PyModel> {
    let cs = curves_of(&curves);
    let report = solver::fit_tikhonov_reduced(&cs, &responses, lambda, p).map_err(pyerr)?;
    Ok(PyModel {
        inner: report.model,
    })
}

/// Effective dimension `sum_j sigma_j / (lambda + sigma_j)` of a spectrum.
#[pyfunction]
fn effective_dimension(eigenvalues: Vec<f64>, lambda: f64) -> PyResult<f64> {
    let view = diagnostics::SpectrumView::new(eigenvalues, 1.0).map_err(pyerr)?;
    diagnostics::effective_dimension(&view, lambda).map_err(pyerr)
}

/// Root of `effective_dimension(lambda)/lambda = n`.
#[pyfunction]
fn lambda_star(eigenvalues: Vec<f64>, n: usize) -> PyResult<f64> {
    let view = diagnostics::SpectrumView::new(eigenvalues, 1.0).map_err(pyerr)?;
    diagnostics::lambda_star(&view, n).map_err(pyerr)
}

/// Power-case convergence exponents `(lambda, risk, norm)` for smoothness r
/// and capacity decay theta.
#[pyfunction]
fn rate_exponent(r: f64, theta: f64) -> PyResult<(f64, f64, f64)> {
    diagnostics::rate_exponent(r, theta).map_err(pyerr)
}

/// Observed filter constants on a log-spaced probe grid, as a dict.
#[pyfunction]
#[pyo3(signature = (scheme, lambda, q, iterations=1, step_size=1.0, sigma_max=4.0, n_probe=10_000))]
fn qualification_report(
    py: Python<'_>,
    scheme: &str,
    lambda: f64,
    q: f64,
    iterations: u32,
    step_size: f64,
    sigma_max: f64,
    n_probe: usize,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let spec = parse_filter(scheme, lambda, iterations, step_size)?;
    let rep = check_qualification(&spec, q, sigma_max, n_probe).map_err(pyerr)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("q", rep.q)?;
    dict.set_item("gamma_q", rep.gamma_q)?;
    dict.set_item("gamma_0", rep.gamma_0)?;
    dict.set_item("gamma_minus1", rep.gamma_minus1)?;
    dict.set_item("gamma_minus_half", rep.gamma_minus_half)?;
    dict.set_item("exceeds_qualification", rep.exceeds_qualification())?;
    Ok(dict.unbind())
}

/// Run the (seed, N, filter) sweep described by a config JSON; returns the
/// per-row CSV text.
#[pyfunction]
#[pyo3(signature = (config_json="{}"))]
fn error_curve_csv(config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(pyerr)?;
    let table = run_error_curve(&config).map_err(pyerr)?;
    Ok(table.to_csv())
}

/// Run the coefficient-recovery study; returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (config_json="{}"))]
fn recovery_json(config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(pyerr)?;
    let report = run_recovery_check(&config).map_err(pyerr)?;
    Ok(serde_json::to_string_pretty(&report).expect("serializable"))
}

/// Run the capacity diagnostics; returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (config_json="{}"))]
fn diagnostics_json(config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(pyerr)?;
    let report = run_diagnostics(&config).map_err(pyerr)?;
    Ok(serde_json::to_string_pretty(&report).expect("serializable"))
}

#[pymodule]
fn pfr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyTruth>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(make_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(response_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(fit_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(fit_iterated, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tikhonov, m)?)?;
    m.add_function(wrap_pyfunction!(effective_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(rate_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(qualification_report, m)?)?;
    m.add_function(wrap_pyfunction!(error_curve_csv, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_json, m)?)?;
    m.add_function(wrap_pyfunction!(diagnostics_json, m)?)?;
    Ok(())
}
