//! Initial data and its admissibility checks.
//!
//! The starting profile is `u0 = sigma * phi` with `phi` sampled on a
//! uniform grid over `[-h0, h0]`. Admissible shapes vanish at both
//! endpoints, are strictly positive inside, and leave the endpoints with
//! strictly nonzero slope; endpoint slopes are measured with one-sided
//! second-order differences unless the shape is analytic.

use crate::config::{PhiSpec, RunConfig};
use crate::error::{CoreError, Result};

/// Largest endpoint value (relative to the peak) still accepted as zero.
const ENDPOINT_ZERO_RTOL: f64 = 1e-10;
/// Endpoint slopes below this fraction of the natural scale `peak / h0`
/// are treated as degenerate (zero) contact.
const SLOPE_SIGN_RTOL: f64 = 1e-8;
/// A doubled-spacing slope reading more than this factor above the
/// fine one means the reading is truncation error, not slope.
const DEGENERATE_SLOPE_RATIO: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub h0: f64,
    pub sigma: f64,
    /// Raw `phi` samples, endpoints included; `sigma` is not applied.
    pub phi: Vec<f64>,
    /// `phi'(-h0)` and `phi'(h0)`.
    pub slope_left: f64,
    pub slope_right: f64,
}

impl InitialData {
    /// The classic admissible bump `cos(pi x / (2 h0))` on `n + 1` nodes.
    pub fn cosine(h0: f64, sigma: f64, n: usize) -> Self {
        let phi: Vec<f64> = (0..=n)
            .map(|i| {
                let x = -h0 + 2.0 * h0 * i as f64 / n as f64;
                (std::f64::consts::FRAC_PI_2 * x / h0).cos()
            })
            .collect();
        let slope = std::f64::consts::FRAC_PI_2 / h0;
        let mut data = InitialData {
            h0,
            sigma,
            phi,
            slope_left: slope,
            slope_right: -slope,
        };
        // cos(pi/2) is ~6e-17, not 0; admissibility wants exact zeros.
        let n = data.phi.len() - 1;
        data.phi[0] = 0.0;
        data.phi[n] = 0.0;
        data
    }

    /// Wrap raw samples; endpoint slopes come from the 3-point stencil.
    pub fn from_samples(h0: f64, sigma: f64, phi: Vec<f64>) -> Result<Self> {
        if phi.len() < 5 {
            return Err(CoreError::Validation(format!(
                "phi needs at least 5 samples, got {}",
                phi.len()
            )));
        }
        let n = phi.len() - 1;
        let dx = 2.0 * h0 / n as f64;
        let slope_left = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx);
        let slope_right = (3.0 * phi[n] - 4.0 * phi[n - 1] + phi[n - 2]) / (2.0 * dx);
        Ok(InitialData {
            h0,
            sigma,
            phi,
            slope_left,
            slope_right,
        })
    }

    /// Read `phi` from CSV: either one column of values on the uniform
    /// grid, or `x, phi` rows whose x column must be that grid.
    pub fn from_csv(path: &str, h0: f64, sigma: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 1 || v.len() == 2 => rows.push(v),
                Ok(v) => {
                    return Err(CoreError::Validation(format!(
                        "{path}:{}: expected 1 or 2 columns, got {}",
                        lineno + 1,
                        v.len()
                    )))
                }
                Err(e) => {
                    if rows.is_empty() {
                        continue; // header
                    }
                    return Err(CoreError::Validation(format!("{path}:{}: {e}", lineno + 1)));
                }
            }
        }
        if rows.is_empty() {
            return Err(CoreError::Validation(format!("{path}: no data rows")));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(CoreError::Validation(format!(
                "{path}: mixed column counts"
            )));
        }
        let phi: Vec<f64> = if cols == 1 {
            rows.iter().map(|r| r[0]).collect()
        } else {
            let n = rows.len() - 1;
            let dx = 2.0 * h0 / n as f64;
            for (i, r) in rows.iter().enumerate() {
                let expect = -h0 + dx * i as f64;
                if (r[0] - expect).abs() > 1e-9 * dx.max(1.0) {
                    return Err(CoreError::Validation(format!(
                        "{path}: x column is not the uniform grid over [-h0, h0] \
                         (row {i}: {} vs expected {expect})",
                        r[0]
                    )));
                }
            }
            rows.iter().map(|r| r[1]).collect()
        };
        Self::from_samples(h0, sigma, phi)
    }

    /// Build from a run config, sampling analytic shapes at `cfg.n + 1`.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        match &cfg.phi {
            PhiSpec::Named(name) if name == "cosine" => {
                Ok(Self::cosine(cfg.h0, cfg.sigma, cfg.n))
            }
            PhiSpec::Named(path) => Self::from_csv(path, cfg.h0, cfg.sigma),
            PhiSpec::Samples { values } => Self::from_samples(cfg.h0, cfg.sigma, values.clone()),
        }
    }

    /// Number of cells in the sample grid.
    pub fn n(&self) -> usize {
        self.phi.len() - 1
    }

    /// `u0 = sigma * phi`, endpoints zeroed exactly.
    pub fn scaled(&self) -> Vec<f64> {
        let n = self.n();
        let mut u: Vec<f64> = self.phi.iter().map(|v| self.sigma * v).collect();
        u[0] = 0.0;
        u[n] = 0.0;
        u
    }

    /// Same shape, different amplitude.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        out.sigma = sigma;
        out
    }

    /// `max |u0|`.
    pub fn sup_norm(&self) -> f64 {
        self.phi
            .iter()
            .map(|v| (self.sigma * v).abs())
            .fold(0.0, f64::max)
    }

    /// Trapezoid `L1` norm of `u0` over `[-h0, h0]`.
    pub fn l1_norm(&self) -> f64 {
        let dx = 2.0 * self.h0 / self.n() as f64;
        let mut s = 0.0;
        for i in 0..self.n() {
            s += 0.5 * (self.phi[i].abs() + self.phi[i + 1].abs()) * dx;
        }
        self.sigma * s
    }

    /// `||u0||_{C^1} = sup |u0| + sup |u0'|`, slopes by central differences
    /// inside and the stored one-sided values at the ends.
    pub fn c1_norm(&self) -> f64 {
        let n = self.n();
        let dx = 2.0 * self.h0 / n as f64;
        let mut slope_max = self.slope_left.abs().max(self.slope_right.abs());
        for i in 1..n {
            let s = (self.phi[i + 1] - self.phi[i - 1]).abs() / (2.0 * dx);
            slope_max = slope_max.max(s);
        }
        self.sigma * (self.sup_norm() / self.sigma + slope_max)
    }

    /// Check membership in the admissible class: zero endpoints, strictly
    /// positive interior, strictly signed endpoint slopes.
    pub fn validate(&self) -> Result<()> {
        if !(self.h0 > 0.0) || !self.h0.is_finite() {
            return Err(CoreError::Validation(format!(
                "h0 must be positive and finite, got {}",
                self.h0
            )));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(CoreError::Validation(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.phi.len() < 5 {
            return Err(CoreError::Validation(format!(
                "phi needs at least 5 samples, got {}",
                self.phi.len()
            )));
        }
        if self.phi.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Validation("phi contains non-finite samples".into()));
        }
        let n = self.n();
        let peak = self.phi.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        if peak == 0.0 {
            return Err(CoreError::Validation("phi is identically zero".into()));
        }
        if self.phi[0].abs() > ENDPOINT_ZERO_RTOL * peak
            || self.phi[n].abs() > ENDPOINT_ZERO_RTOL * peak
        {
            return Err(CoreError::Validation(format!(
                "phi must vanish at both endpoints (got {} and {})",
                self.phi[0], self.phi[n]
            )));
        }
        for (i, &v) in self.phi.iter().enumerate().take(n).skip(1) {
            if !(v > 0.0) {
                let x = -self.h0 + 2.0 * self.h0 * i as f64 / n as f64;
                return Err(CoreError::Validation(format!(
                    "phi must be strictly positive inside (-h0, h0); phi({x}) = {v}"
                )));
            }
        }
        let slope_floor = SLOPE_SIGN_RTOL * peak / self.h0;
        if !(self.slope_left > slope_floor) {
            return Err(CoreError::Validation(format!(
                "phi'(-h0) must be strictly positive, got {}",
                self.slope_left
            )));
        }
        if !(self.slope_right < -slope_floor) {
            return Err(CoreError::Validation(format!(
                "phi'(h0) must be strictly negative, got {}",
                self.slope_right
            )));
        }
        // Degenerate contact (phi' = 0 with curvature) still measures as a
        // positive O(dx^2) slope. Rerunning the stencil at doubled spacing
        // multiplies a pure truncation-error reading by ~4 while a genuine
        // slope stays put, so a large ratio flags the degenerate case.
        let dx = 2.0 * self.h0 / n as f64;
        let s1l = (-3.0 * self.phi[0] + 4.0 * self.phi[1] - self.phi[2]) / (2.0 * dx);
        let s2l = (-3.0 * self.phi[0] + 4.0 * self.phi[2] - self.phi[4]) / (4.0 * dx);
        let s1r = (3.0 * self.phi[n] - 4.0 * self.phi[n - 1] + self.phi[n - 2]) / (2.0 * dx);
        let s2r = (3.0 * self.phi[n] - 4.0 * self.phi[n - 2] + self.phi[n - 4]) / (4.0 * dx);
        for (side, s1, s2) in [("-h0", s1l, s2l), ("h0", s1r, s2r)] {
            if s2.abs() > DEGENERATE_SLOPE_RATIO * s1.abs() + slope_floor {
                return Err(CoreError::Validation(format!(
                    "endpoint slope at x = {side} is not resolution-stable \
                     ({s1} vs {s2} at doubled spacing); phi' there appears \
                     to vanish, which is outside the admissible class"
                )));
            }
        }
        Ok(())
    }
}

/// Run the admissibility checks and hand the data back.
pub fn validate_initial(data: InitialData) -> Result<InitialData> {
    data.validate()?;
    Ok(data)
}
