//! Run configuration: the single document that pins down a simulation.
//!
//! A `RunConfig` can be read from JSON or TOML and is embedded verbatim in
//! every output artifact, so a run is reproducible from any of its files.
//! All numerical knobs have documented defaults; only the reaction term
//! and the resistance `alpha` must be given explicitly.

use crate::error::{CoreError, Result};
use crate::nonlinearity::{HermiteNode, Nonlinearity};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Declarative form of a [`Nonlinearity`], as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    /// `r u (1 - u)`.
    Logistic { r: f64 },
    /// `u (u - theta) (1 - u)`.
    CubicBistable { theta: f64 },
    /// Cubic Hermite table of `(u, f, fp)` rows, inline or from a CSV file.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<HermiteNode>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
    },
    /// `f = 0`, pure diffusion with resistant boundaries.
    Zero,
}

impl NonlinearitySpec {
    /// Build the runtime nonlinearity, honouring `domain_cap`.
    pub fn resolve(&self, domain_cap: f64) -> Result<Nonlinearity> {
        let nl = match self {
            NonlinearitySpec::Logistic { r } => Nonlinearity::logistic(*r)?,
            NonlinearitySpec::CubicBistable { theta } => Nonlinearity::cubic_bistable(*theta)?,
            NonlinearitySpec::Tabulated { nodes, csv } => match (nodes, csv) {
                (Some(nodes), None) => Nonlinearity::tabulated(nodes.clone())?,
                (None, Some(path)) => Nonlinearity::tabulated(read_node_csv(path)?)?,
                _ => {
                    return Err(CoreError::Validation(
                        "tabulated nonlinearity needs exactly one of `nodes` or `csv`".into(),
                    ))
                }
            },
            NonlinearitySpec::Zero => Nonlinearity::zero(),
        };
        nl.with_domain_cap(domain_cap)
    }
}

/// Initial shape `phi`, before the `sigma` amplitude is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    /// `"cosine"` for `cos(pi x / (2 h0))`, anything else is a CSV path.
    Named(String),
    /// Inline samples on the uniform grid over `[-h0, h0]`, endpoints included.
    Samples { values: Vec<f64> },
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::Named("cosine".into())
    }
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Reaction term.
    pub nonlinearity: NonlinearitySpec,
    /// Boundary resistance; the fronts only move when the flux exceeds it.
    pub alpha: f64,
    /// Half-width of the initial interval `[-h0, h0]`.
    #[serde(default = "default_h0")]
    pub h0: f64,
    /// Amplitude multiplier applied to `phi`.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Initial shape.
    #[serde(default)]
    pub phi: PhiSpec,
    /// Number of grid cells (nodes = n + 1). Must be even.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Interval width below which the run counts as shrunk.
    #[serde(default = "default_eps")]
    pub eps_shrink: f64,
    /// Sup-norm below which the run counts as vanished.
    #[serde(default = "default_eps")]
    pub eps_vanish: f64,
    /// Spatial escape hatch: `h > x_max` or `g < -x_max` ends the run.
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    /// Temporal escape hatch.
    #[serde(default = "default_t_horizon")]
    pub t_horizon: f64,
    /// Hard cap on the time step.
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    /// Floor under the time step; reaching it near a collapsed interval
    /// is itself a shrinking diagnosis.
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    /// Safety factor on every stability bound.
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    /// Spacing of the recorded time series; steps land on these exactly.
    #[serde(default = "default_snapshot_dt")]
    pub snapshot_dt: f64,
    /// Store the full profile every k-th snapshot (0 = only first and last).
    #[serde(default)]
    pub profile_every: usize,
    /// Heun-style corrector on the boundary motion, for convergence studies.
    #[serde(default)]
    pub predictor_corrector: bool,
    /// Regrid when the physical spacing leaves `[dx_min, dx_max]`.
    /// Defaults: a quarter of the initial spacing, and 0.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx_max: Option<f64>,
    /// Never coarsen below this many cells.
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    /// Largest tolerated lag between the shrink and vanish triggers before
    /// a ShrinkVanish end is considered suspicious. Unset means automatic:
    /// once the sup norm has died the resistance closes the interval at
    /// speed `2 alpha`, so the tolerated lag is that walk measured from
    /// the width at which the vanish trigger actually fired.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equiv_window: Option<f64>,
    /// Trusted evaluation range for the reaction term.
    #[serde(default = "default_domain_cap")]
    pub domain_cap: f64,
}

fn default_h0() -> f64 {
    1.0
}
fn default_sigma() -> f64 {
    1.0
}
fn default_n() -> usize {
    400
}
fn default_eps() -> f64 {
    1e-4
}
fn default_x_max() -> f64 {
    400.0
}
fn default_t_horizon() -> f64 {
    500.0
}
fn default_dt_max() -> f64 {
    0.01
}
fn default_dt_min() -> f64 {
    1e-12
}
fn default_cfl() -> f64 {
    0.4
}
fn default_snapshot_dt() -> f64 {
    0.5
}
fn default_n_min() -> usize {
    8
}
fn default_domain_cap() -> f64 {
    crate::nonlinearity::DEFAULT_DOMAIN_CAP
}

impl RunConfig {
    /// Minimal config with all knobs at their defaults.
    pub fn new(nonlinearity: NonlinearitySpec, alpha: f64) -> Self {
        RunConfig {
            nonlinearity,
            alpha,
            h0: default_h0(),
            sigma: default_sigma(),
            phi: PhiSpec::default(),
            n: default_n(),
            eps_shrink: default_eps(),
            eps_vanish: default_eps(),
            x_max: default_x_max(),
            t_horizon: default_t_horizon(),
            dt_max: default_dt_max(),
            dt_min: default_dt_min(),
            cfl_safety: default_cfl(),
            snapshot_dt: default_snapshot_dt(),
            profile_every: 0,
            predictor_corrector: false,
            dx_min: None,
            dx_max: None,
            n_min: default_n_min(),
            equiv_window: None,
            domain_cap: default_domain_cap(),
        }
    }

    /// Parse from a JSON or TOML string, trying JSON first.
    pub fn from_str_any(text: &str) -> Result<Self> {
        match serde_json::from_str::<RunConfig>(text) {
            Ok(cfg) => Ok(cfg),
            Err(json_err) => toml::from_str::<RunConfig>(text).map_err(|toml_err| {
                CoreError::Validation(format!(
                    "config parses neither as JSON ({json_err}) nor as TOML ({toml_err})"
                ))
            }),
        }
    }

    /// Read a config file; the extension picks the format, other
    /// extensions fall back to trying both.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| CoreError::Validation(format!("{}: {e}", path.display()))),
            Some("toml") => toml::from_str(&text)
                .map_err(|e| CoreError::Validation(format!("{}: {e}", path.display()))),
            _ => Self::from_str_any(&text),
        }
    }

    /// Physical grid spacing at the start of the run.
    pub fn dx0(&self) -> f64 {
        2.0 * self.h0 / self.n as f64
    }

    /// Regrid band, with defaults resolved.
    pub fn dx_band(&self) -> (f64, f64) {
        let lo = self.dx_min.unwrap_or(self.dx0() / 4.0);
        let hi = self.dx_max.unwrap_or(0.05_f64.max(self.dx0()));
        (lo, hi)
    }


    /// Reject configs that are internally inconsistent.
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoreError::Validation(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
            Ok(())
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(CoreError::Validation(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        positive("h0", self.h0)?;
        positive("sigma", self.sigma)?;
        positive("eps_shrink", self.eps_shrink)?;
        positive("eps_vanish", self.eps_vanish)?;
        positive("t_horizon", self.t_horizon)?;
        positive("dt_max", self.dt_max)?;
        positive("dt_min", self.dt_min)?;
        positive("snapshot_dt", self.snapshot_dt)?;
        positive("domain_cap", self.domain_cap)?;
        if let Some(w) = self.equiv_window {
            if w < 0.0 || !w.is_finite() {
                return Err(CoreError::Validation(
                    "equiv_window must be finite and nonnegative".into(),
                ));
            }
        }
        if self.x_max <= self.h0 {
            return Err(CoreError::Validation(format!(
                "x_max ({}) must exceed h0 ({})",
                self.x_max, self.h0
            )));
        }
        if self.dt_min >= self.dt_max {
            return Err(CoreError::Validation(
                "dt_min must be smaller than dt_max".into(),
            ));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 0.9) {
            return Err(CoreError::Validation(format!(
                "cfl_safety must lie in (0, 0.9], got {}",
                self.cfl_safety
            )));
        }
        if self.n_min < 4 {
            return Err(CoreError::Validation("n_min must be at least 4".into()));
        }
        if self.n < self.n_min.max(8) || self.n % 2 != 0 {
            return Err(CoreError::Validation(format!(
                "n must be even and at least max(8, n_min), got {}",
                self.n
            )));
        }
        let (lo, hi) = self.dx_band();
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(CoreError::Validation(format!(
                "regrid band [{lo}, {hi}] is not a positive ordered pair"
            )));
        }
        Ok(())
    }
}

/// Read `(u, f, fp)` rows from a CSV file; `#` lines and a header row are
/// skipped.
fn read_node_csv(path: &str) -> Result<Vec<HermiteNode>> {
    let text = std::fs::read_to_string(path)?;
    let mut nodes = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(CoreError::Validation(format!(
                "{path}:{}: expected 3 columns (u, f, fp), got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(v) => nodes.push(HermiteNode {
                u: v[0],
                f: v[1],
                fp: v[2],
            }),
            // A non-numeric first row is a header; anything later is an error.
            Err(e) => {
                if nodes.is_empty() {
                    continue;
                }
                return Err(CoreError::Validation(format!(
                    "{path}:{}: {e}",
                    lineno + 1
                )));
            }
        }
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig::new(NonlinearitySpec::Logistic { r: 1.0 }, 0.4)
    }

    #[test]
    fn defaults_validate() {
        base().validate().unwrap();
    }

    #[test]
    fn toml_and_json_round_trip() {
        let cfg = base();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);

        let toml_text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&toml_text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn minimal_toml_parses_with_defaults() {
        let text = r#"
            alpha = 0.4
            [nonlinearity]
            kind = "logistic"
            r = 1.0
        "#;
        let cfg = RunConfig::from_str_any(text).unwrap();
        assert_eq!(cfg.n, 400);
        assert_eq!(cfg.phi, PhiSpec::Named("cosine".into()));
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"nonlinearity":{"kind":"zero"},"alpha":0.4,"bogus":1}"#;
        assert!(RunConfig::from_str_any(text).is_err());
    }

    #[test]
    fn bad_knobs_are_rejected() {
        let mut cfg = base();
        cfg.n = 401;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.x_max = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.cfl_safety = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tabulated_spec_needs_one_source() {
        let spec = NonlinearitySpec::Tabulated {
            nodes: None,
            csv: None,
        };
        assert!(spec.resolve(5.0).is_err());
    }

    #[test]
    fn inline_phi_samples_parse() {
        let text = r#"
            alpha = 0.4
            [nonlinearity]
            kind = "zero"
            [phi]
            values = [0.0, 0.5, 1.0, 0.5, 0.0]
        "#;
        let cfg = RunConfig::from_str_any(text).unwrap();
        match cfg.phi {
            PhiSpec::Samples { ref values } => assert_eq!(values.len(), 5),
            _ => panic!("expected inline samples"),
        }
    }
}
