//! Python bindings: every entry point takes the run configuration as a
//! JSON string (the same document the CLI reads) and returns JSON, so
//! the Python side needs nothing beyond `json.loads`. Invalid inputs
//! raise `ValueError`, solver breakdowns raise `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use resifront_core::classifier::{detect_outcome, ClassifierParams};
use resifront_core::config::RunConfig;
use resifront_core::semiwave::ShootConfig;
use resifront_core::threshold::ThresholdOpts;
use resifront_core::{phase_plane, semiwave, solver, CoreError, InitialData};
use serde::Serialize;

fn py_err(e: CoreError) -> PyErr {
    match e {
        CoreError::Numerical(_) | CoreError::Inconclusive(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_config(config_json: &str) -> PyResult<RunConfig> {
    let cfg = RunConfig::from_str_any(config_json).map_err(py_err)?;
    cfg.validate().map_err(py_err)?;
    Ok(cfg)
}

fn to_json<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Run one simulation; returns the full trajectory as JSON.
#[pyfunction]
fn simulate(config_json: &str) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let traj = solver::run_from_config(&cfg).map_err(py_err)?;
    to_json(&traj)
}

/// Run one simulation and classify it; returns
/// `{config, termination, t_end, verdict, diagnostics, notes}` as JSON.
#[pyfunction]
fn classify(config_json: &str) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap).map_err(py_err)?;
    let traj = solver::run_from_config(&cfg).map_err(py_err)?;
    let sc = phase_plane::classify_stationary(&nl, cfg.alpha).map_err(py_err)?;
    let cstar = semiwave::solve_cstar(&nl, cfg.alpha, &ShootConfig::default())
        .ok()
        .map(|w| w.c_star);
    let outcome = detect_outcome(&traj, &nl, &sc, cstar, &ClassifierParams::default());

    #[derive(Serialize)]
    struct Report<'a> {
        config: &'a RunConfig,
        termination: &'a resifront_core::Termination,
        t_end: f64,
        #[serde(flatten)]
        outcome: &'a resifront_core::Outcome,
    }
    to_json(&Report {
        config: &cfg,
        termination: &traj.termination,
        t_end: traj.t_end(),
        outcome: &outcome,
    })
}

/// Bracket the sharp amplitude threshold; `opts_json` overrides the
/// search defaults field by field. Returns the result record as JSON.
#[pyfunction]
#[pyo3(signature = (config_json, opts_json = None))]
fn find_sigma_star(config_json: &str, opts_json: Option<&str>) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let opts: ThresholdOpts = match opts_json {
        Some(text) => serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("threshold options: {e}")))?,
        None => ThresholdOpts::default(),
    };
    let res = resifront_core::find_sigma_star(&cfg, &opts).map_err(py_err)?;
    to_json(&res)
}

/// Check the a-priori vanishing certificates; returns the fired
/// certificate as JSON, or `null` when none applies.
#[pyfunction]
fn vanishing_certificate(config_json: &str) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap).map_err(py_err)?;
    let data = InitialData::from_config(&cfg).map_err(py_err)?;
    let cert = resifront_core::vanishing_certificate(&data, &nl, cfg.alpha).map_err(py_err)?;
    to_json(&cert)
}

/// Solve the semi-wave problem; returns `{c_star, bracket, profile, ...}`.
#[pyfunction]
fn solve_cstar(config_json: &str) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap).map_err(py_err)?;
    let wave = semiwave::solve_cstar(&nl, cfg.alpha, &ShootConfig::default()).map_err(py_err)?;
    to_json(&wave)
}

/// Classify the stationary problem at `(f, alpha)`.
#[pyfunction]
fn stationary(config_json: &str) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap).map_err(py_err)?;
    let sc = phase_plane::classify_stationary(&nl, cfg.alpha).map_err(py_err)?;
    to_json(&sc)
}

/// Sample the compact stationary profile on `n + 1` uniform stations.
#[pyfunction]
#[pyo3(signature = (config_json, n = 1000))]
fn profile(config_json: &str, n: usize) -> PyResult<String> {
    let cfg = parse_config(config_json)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap).map_err(py_err)?;
    let prof = phase_plane::profile(&nl, cfg.alpha, n).map_err(py_err)?;
    to_json(&prof)
}

#[pymodule]
fn resifront_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(find_sigma_star, m)?)?;
    m.add_function(wrap_pyfunction!(vanishing_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cstar, m)?)?;
    m.add_function(wrap_pyfunction!(stationary, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    Ok(())
}
