//! Python bindings: `import blowup`.

use std::path::PathBuf;
use std::sync::Arc;

use blowup_core::analysis;
use blowup_core::bohm::{self, IntegrationOptions, TrajectoryStatus};
use blowup_core::packets::{self, SingularityKind};
use blowup_core::scenario::{self, Scenario};
use blowup_core::{
    Error, GaussianSpec, PacketSpec, RectangularSpec, SingularSpec, TruncatedSingularSpec,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_)
        | Error::Domain { .. }
        | Error::NonNormalizable { .. }
        | Error::NoWaist { .. }
        | Error::Aliasing { .. }
        | Error::Grid(_)
        | Error::TimeOrder { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: Arc<blowup_core::SpatialGrid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(length: f64, count: usize) -> PyResult<Self> {
        let inner = blowup_core::SpatialGrid::new(length, count).map_err(to_py)?;
        Ok(Self {
            inner: Arc::new(inner),
        })
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn count(&self) -> usize {
        self.inner.count()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn coords(&self) -> Vec<f64> {
        self.inner.coords().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(length={}, count={})",
            self.inner.length(),
            self.inner.count()
        )
    }
}

#[pyclass(name = "Field", frozen, from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: blowup_core::WaveField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, time: f64, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        if amplitudes.len() != grid.inner.count() {
            return Err(PyValueError::new_err(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.inner.count()
            )));
        }
        Ok(Self {
            inner: blowup_core::WaveField::new(grid.inner.clone(), time, amplitudes),
        })
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.inner.grid().clone(),
        }
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn density(&self) -> Vec<f64> {
        self.inner.density()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Half-maximum crossings (x_minus, x_plus), or None.
    fn fwhm(&self) -> Option<(f64, f64)> {
        analysis::fwhm(&self.inner).map(|f| (f.x_minus, f.x_plus))
    }

    fn moments<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = analysis::moments(&self.inner);
        let d = PyDict::new(py);
        d.set_item("time", m.time)?;
        d.set_item("norm", m.norm)?;
        d.set_item("mean", m.mean)?;
        d.set_item("second_moment", m.second_moment)?;
        d.set_item("variance", m.variance())?;
        d.set_item("peak_density", m.peak_density)?;
        d.set_item("peak_position", m.peak_position)?;
        Ok(d)
    }

    fn clipped_density(&self, fraction: f64) -> Vec<f64> {
        analysis::clip_density(&self.inner, fraction)
    }

    /// BUPS snapshot bytes.
    fn to_bytes(&self) -> PyResult<Vec<u8>> {
        let mut buf = Vec::new();
        blowup_core::io::write_snapshot(&mut buf, &self.inner).map_err(to_py)?;
        Ok(buf)
    }

    #[staticmethod]
    fn from_bytes(data: Vec<u8>) -> PyResult<Self> {
        let inner = blowup_core::io::read_snapshot(&mut data.as_slice()).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(t={}, n={})",
            self.inner.time(),
            self.inner.grid().count()
        )
    }
}

#[pyclass(name = "Packet", frozen, from_py_object)]
#[derive(Clone)]
struct PyPacket {
    inner: PacketSpec,
}

#[pymethods]
impl PyPacket {
    #[staticmethod]
    #[pyo3(signature = (nu, sigma = 1.0, tau = 1.0))]
    fn singular(nu: f64, sigma: f64, tau: f64) -> PyResult<Self> {
        let s = SingularSpec::new(nu, sigma, tau).map_err(to_py)?;
        Ok(Self {
            inner: PacketSpec::Singular(s),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (nu, x_b, sigma = 1.0, tau = 1.0))]
    fn truncated_singular(nu: f64, x_b: f64, sigma: f64, tau: f64) -> PyResult<Self> {
        let base = SingularSpec::new(nu, sigma, tau).map_err(to_py)?;
        let s = TruncatedSingularSpec::new(base, x_b).map_err(to_py)?;
        Ok(Self {
            inner: PacketSpec::TruncatedSingular(s),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (sigma0, tau = 1.0))]
    fn gaussian(sigma0: f64, tau: f64) -> PyResult<Self> {
        let g = GaussianSpec::new(sigma0, tau).map_err(to_py)?;
        Ok(Self {
            inner: PacketSpec::Gaussian(g),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (a, tau = 1.0))]
    fn rectangular(a: f64, tau: f64) -> PyResult<Self> {
        let r = RectangularSpec::new(a, tau).map_err(to_py)?;
        Ok(Self {
            inner: PacketSpec::Rectangular(r),
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[getter]
    fn focus_time(&self) -> f64 {
        self.inner.focus_time()
    }

    /// Unit-norm samples of the initial packet.
    fn sample(&self, grid: &PyGrid) -> PyResult<PyField> {
        let inner = packets::sample_initial(&self.inner, &grid.inner).map_err(to_py)?;
        Ok(PyField { inner })
    }

    /// Closed-form field at time t, where one exists.
    fn analytic(&self, grid: &PyGrid, t: f64) -> Option<PyField> {
        packets::analytic_field(&self.inner, &grid.inner, t).map(|inner| PyField { inner })
    }

    fn __repr__(&self) -> String {
        format!("Packet({:?})", self.inner)
    }
}

#[pyclass(name = "Propagator", frozen)]
struct PyPropagator {
    inner: blowup_core::Propagator,
}

#[pymethods]
impl PyPropagator {
    #[new]
    fn new(grid: &PyGrid) -> Self {
        Self {
            inner: blowup_core::Propagator::new(grid.inner.clone()),
        }
    }

    /// Exact free evolution by dt.
    fn evolve(&self, py: Python<'_>, field: &PyField, dt: f64) -> PyField {
        let inner = py.detach(|| self.inner.free_evolve(&field.inner, dt));
        PyField { inner }
    }

    fn evolve_series(
        &self,
        py: Python<'_>,
        field: &PyField,
        times: Vec<f64>,
    ) -> PyResult<Vec<PyField>> {
        let series = py
            .detach(|| self.inner.evolve_series(&field.inner, &times))
            .map_err(to_py)?;
        Ok(series.into_iter().map(|inner| PyField { inner }).collect())
    }

    /// (k, |psi(k)|^2) on ascending wavenumbers.
    fn momentum_density(&self, field: &PyField) -> (Vec<f64>, Vec<f64>) {
        let m = self.inner.momentum_density(&field.inner);
        (m.k, m.density)
    }

    fn current(&self, field: &PyField) -> Vec<f64> {
        bohm::probability_current(&self.inner, &field.inner)
    }

    /// RK4 Bohmian trajectories from `seeds` over [t0, t1]. Returns a dict
    /// with `times`, `positions` (one list per trajectory) and `status`.
    #[pyo3(signature = (field, seeds, t0, t1, dt, rho_floor = 1e-8, store_every = 10))]
    #[allow(clippy::too_many_arguments)]
    fn trajectories<'py>(
        &self,
        py: Python<'py>,
        field: &PyField,
        seeds: Vec<f64>,
        t0: f64,
        t1: f64,
        dt: f64,
        rho_floor: f64,
        store_every: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let opts = IntegrationOptions {
            rho_floor,
            store_every,
            ..IntegrationOptions::default()
        };
        let source = self.inner.evolver(&field.inner);
        let b = py
            .detach(|| bohm::integrate_trajectories(&source, &seeds, t0, t1, dt, &opts))
            .map_err(to_py)?;
        let status: Vec<&str> = b
            .flags
            .iter()
            .map(|f| match f.status() {
                TrajectoryStatus::Ok => "ok",
                TrajectoryStatus::NodeRegularized => "node-regularized",
                TrajectoryStatus::LeftDomain => "left-domain",
            })
            .collect();
        let d = PyDict::new(py);
        d.set_item("times", b.times)?;
        d.set_item("positions", b.positions)?;
        d.set_item("status", status)?;
        Ok(d)
    }
}

#[pyfunction]
#[pyo3(signature = (sigma_g0, tau = 1.0))]
fn waist_solutions(sigma_g0: f64, tau: f64) -> PyResult<(f64, f64)> {
    packets::waist_solutions(sigma_g0, tau, &Default::default()).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (nu, fraction = 0.1, sigma = 1.0))]
fn matched_gaussian_width(nu: f64, fraction: f64, sigma: f64) -> PyResult<f64> {
    let s = SingularSpec::new(nu, sigma, 1.0).map_err(to_py)?;
    packets::matched_gaussian_width(&s, fraction).map_err(to_py)
}

/// (kind, mean_exists, variance_exists).
#[pyfunction]
fn classify(nu: f64) -> (&'static str, bool, bool) {
    let c = packets::classify(nu);
    let kind = match c.kind {
        SingularityKind::NotSquareIntegrable => "not-square-integrable",
        SingularityKind::Singular => "singular",
        SingularityKind::Bounded => "bounded",
    };
    (kind, c.mean_exists, c.variance_exists)
}

#[pyfunction]
fn seed_positions(count: usize, half_range: f64) -> PyResult<Vec<f64>> {
    bohm::seed_positions(count, half_range).map_err(to_py)
}

#[pyfunction]
fn list_presets() -> Vec<(&'static str, String)> {
    scenario::list_presets()
}

#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    scenario::preset(name)
        .map(|s| s.to_ini())
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset `{name}`")))
}

/// Runs an INI scenario into `out_dir`; returns the written file paths.
#[pyfunction]
#[pyo3(signature = (config, out_dir, overrides = Vec::new()))]
fn run_config(
    py: Python<'_>,
    config: &str,
    out_dir: PathBuf,
    overrides: Vec<String>,
) -> PyResult<Vec<String>> {
    let s = Scenario::load(config, &overrides).map_err(to_py)?;
    let summary = py
        .detach(|| scenario::run_scenario(&s, &out_dir))
        .map_err(to_py)?;
    Ok(summary
        .files
        .iter()
        .map(|p| p.display().to_string())
        .collect())
}

#[pymodule]
fn blowup(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyPacket>()?;
    m.add_class::<PyPropagator>()?;
    m.add_function(wrap_pyfunction!(waist_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(matched_gaussian_width, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(seed_positions, m)?)?;
    m.add_function(wrap_pyfunction!(list_presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
