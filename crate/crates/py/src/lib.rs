//! Python bindings. Structured results come back as plain dicts and lists.

use isohyp_core::functionals::{self, PolarProfile};
use isohyp_core::generating_curve::{self, ShootingConfig};
use isohyp_core::hopf::{self, Field, SpaceParams};
use isohyp_core::hyperbolic::{self, DiskPoint};
use isohyp_core::lemma_lab::{self, Suite};
use isohyp_core::optimizer::{self, MinimizeConfig};
use isohyp_core::{Error, RadialDensity};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) | Error::OpenTrajectory(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn density(spec: &str) -> PyResult<RadialDensity> {
    spec.parse().map_err(to_py)
}

fn point(x: (f64, f64)) -> PyResult<DiskPoint> {
    DiskPoint::new(x.0, x.1).map_err(to_py)
}

/// Converts through JSON so Python sees the same keys as the CLI output.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Hyperbolic distance between two points of the Poincaré disk.
#[pyfunction]
fn dist(p: (f64, f64), q: (f64, f64)) -> PyResult<f64> {
    Ok(hyperbolic::dist(&point(p)?, &point(q)?))
}

/// Fermi coordinates `(s, t)` of a disk point.
#[pyfunction]
fn fermi(p: (f64, f64)) -> PyResult<(f64, f64)> {
    let f = point(p)?.fermi();
    Ok((f.s, f.t))
}

#[pyfunction]
fn curvature_convert(kappa_flat: f64, p: (f64, f64), nu: (f64, f64)) -> PyResult<f64> {
    hyperbolic::curvature_convert(kappa_flat, &point(p)?, [nu.0, nu.1]).map_err(to_py)
}

/// `Pf`, `Vf`, `Hf` of the centered ball of radius `tau`.
#[pyfunction]
#[pyo3(signature = (n, tau, density = "cosh:1"))]
fn ball_quantities<'py>(py: Python<'py>, n: u32, tau: f64, density: &str) -> PyResult<Bound<'py, PyAny>> {
    let b = functionals::ball_quantities(n, &self::density(density)?, tau).map_err(to_py)?;
    to_object(py, &b)
}

#[pyfunction]
#[pyo3(signature = (n, v, density = "cosh:1"))]
fn ball_radius_for_volume(n: u32, v: f64, density: &str) -> PyResult<f64> {
    functionals::ball_radius_for_volume(n, &self::density(density)?, v).map_err(to_py)
}

/// `Pf` and `Vf` of the rotation hypersurface with `rho(theta) = sum a_k cos(k theta)`.
#[pyfunction]
#[pyo3(signature = (n, coeffs, density = "cosh:1"))]
fn profile_functionals<'py>(
    py: Python<'py>,
    n: u32,
    coeffs: Vec<f64>,
    density: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let p = PolarProfile::new(coeffs, n).map_err(to_py)?;
    let r = functionals::profile_functionals(&p, &self::density(density)?).map_err(to_py)?;
    to_object(py, &r)
}

#[pyfunction]
#[pyo3(signature = (n, tau_star, lambda_rel = 1.0, density = "cosh:1", lambda_ = None, classify_tol = 1e-6))]
fn shoot<'py>(
    py: Python<'py>,
    n: u32,
    tau_star: f64,
    lambda_rel: f64,
    density: &str,
    lambda_: Option<f64>,
    classify_tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let d = self::density(density)?;
    let lambda =
        lambda_.unwrap_or_else(|| lambda_rel * generating_curve::lambda_for_ball(n.max(2), &d, tau_star));
    let cfg = ShootingConfig::new(n, d, lambda, tau_star).map_err(to_py)?;
    let traj = py.detach(|| generating_curve::shoot(&cfg)).map_err(to_py)?;
    let out = serde_json::json!({
        "lambda": lambda,
        "classification": generating_curve::classify(&traj, classify_tol),
        "termination": traj.termination,
        "closure": traj.closure,
        "hf_drift": traj.hf_drift,
        "events": traj.events,
        "rows": traj.rows(),
    });
    to_object(py, &out)
}

/// Randomized lemma suites; `suites=None` runs all of them.
#[pyfunction]
#[pyo3(signature = (suites = None, count = 200, seed = 7))]
fn verify<'py>(
    py: Python<'py>,
    suites: Option<Vec<String>>,
    count: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let suites = match suites {
        None => Suite::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|s| s.parse().map_err(to_py))
            .collect::<PyResult<_>>()?,
    };
    let report = py.detach(|| lemma_lab::run_verify(&suites, count, seed));
    to_object(py, &report)
}

#[pyfunction]
#[pyo3(signature = (n, target_volume, density = "cosh:1", modes = 16, max_iters = 500, grad_tol = 1e-7, seed = 0, init = None))]
#[allow(clippy::too_many_arguments)]
fn minimize<'py>(
    py: Python<'py>,
    n: u32,
    target_volume: f64,
    density: &str,
    modes: usize,
    max_iters: usize,
    grad_tol: f64,
    seed: u64,
    init: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = MinimizeConfig::new(n, self::density(density)?, target_volume);
    cfg.modes = modes;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    cfg.seed = seed;
    cfg.init = init.map(|c| PolarProfile::new(c, n)).transpose().map_err(to_py)?;
    let report = py.detach(|| optimizer::minimize(&cfg)).map_err(to_py)?;
    to_object(py, &report)
}

/// Ball quantities in `H_K^m` computed directly and through the weighted model.
#[pyfunction]
fn hopf_crosscheck<'py>(py: Python<'py>, field: &str, m: u32, tau: f64) -> PyResult<Bound<'py, PyAny>> {
    let field: Field = field.parse().map_err(to_py)?;
    let sp = SpaceParams::new(field, m).map_err(to_py)?;
    to_object(py, &hopf::crosscheck(&sp, tau).map_err(to_py)?)
}

#[pymodule]
pub fn isohyp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(dist, m)?)?;
    m.add_function(wrap_pyfunction!(fermi, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_convert, m)?)?;
    m.add_function(wrap_pyfunction!(ball_quantities, m)?)?;
    m.add_function(wrap_pyfunction!(ball_radius_for_volume, m)?)?;
    m.add_function(wrap_pyfunction!(profile_functionals, m)?)?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(hopf_crosscheck, m)?)?;
    Ok(())
}
