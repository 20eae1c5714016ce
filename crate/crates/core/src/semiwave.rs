//! Travelling semi-wave `(c*, q*)` by phase-plane shooting.
//!
//! The right-moving front profile solves
//!
//! ```text
//! q'' - c q' + f(q) = 0,   q(0) = 0,   q'(0) = c + alpha,   q(∞) = 1,
//! ```
//!
//! and `c*` is the unique wave speed whose orbit connects the foot to the
//! saddle at `(1, 0)`. For `c` below `c*` the orbit turns around before
//! reaching 1 (undershoot), above it the orbit crosses 1 with positive
//! slope (overshoot); bisection on that dichotomy pins `c*`.
//!
//! A semi-wave exists exactly when `0 < alpha < sqrt(2 F(1))`; multiplying
//! the equation by `q'` and integrating gives the handy a-priori bound
//! `(c* + alpha)² ≤ 2 F(1)` used as a test invariant.

use crate::error::{CoreError, Result};
use crate::nonlinearity::Nonlinearity;
use crate::ode::{self, Rk45Options, StepControl};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Integration horizon in the travelling coordinate.
    pub z_max: f64,
    /// Overshoot margin: `q > 1 + eps_over`.
    pub eps_over: f64,
    /// Undershoot margin: `q' < 0` while `q < 1 - eps_under`.
    pub eps_under: f64,
    /// Connect window at `z_max`: `|q-1| ≤ eps_connect`, `|q'| ≤ eps_connect`.
    pub eps_connect: f64,
    /// Bisection stops when the bracket is this wide.
    pub bracket_width: f64,
    /// Cap on the integrator step so events are localised sharply.
    pub max_step: f64,
    /// Spacing of the uniform resample of the returned profile.
    pub profile_dz: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            z_max: 200.0,
            eps_over: 1e-8,
            eps_under: 1e-8,
            eps_connect: 1e-6,
            bracket_width: 1e-10,
            max_step: 0.05,
            profile_dz: 2e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotClass {
    /// `q` exceeded `1 + eps_over`.
    Overshoot,
    /// `q'` went negative while `q` was still below `1 - eps_under`.
    Undershoot,
    /// Still inside the connect window at the horizon.
    Connect,
}

#[derive(Debug, Clone)]
pub struct Shot {
    pub class: ShotClass,
    /// Where the deciding event fired (or the horizon).
    pub z_event: f64,
    pub q_end: f64,
    pub qp_end: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemiWaveProfile {
    /// Uniform stations in the travelling coordinate.
    pub zs: Vec<f64>,
    pub qs: Vec<f64>,
    pub qps: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemiWave {
    pub c_star: f64,
    pub bracket: (f64, f64),
    /// Classifications at the bracket ends, recorded rather than assumed.
    pub polarity: (ShotClass, ShotClass),
    pub profile: SemiWaveProfile,
    /// `|q - 1|` where the returned profile stops tracking the connection.
    pub residual_at_one: f64,
    /// Truncation station of the profile (closest approach to the saddle).
    pub z_end: f64,
}

/// Integrate one shot at speed `c` and classify it.
pub fn shoot(nl: &Nonlinearity, alpha: f64, c: f64, cfg: &ShootConfig) -> Result<Shot> {
    let (class, path) = shoot_path(nl, alpha, c, cfg, false)?;
    let &(z, q, p) = path.last().expect("path always has the initial point");
    Ok(Shot {
        class,
        z_event: z,
        q_end: q,
        qp_end: p,
    })
}

fn shoot_path(
    nl: &Nonlinearity,
    alpha: f64,
    c: f64,
    cfg: &ShootConfig,
    record: bool,
) -> Result<(ShotClass, Vec<(f64, f64, f64)>)> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(CoreError::Validation(format!("wave speed must be ≥ 0, got {c}")));
    }
    let opts = Rk45Options {
        rtol: cfg.rtol,
        atol: cfg.atol,
        max_step: cfg.max_step,
        initial_step: 1e-6,
    };
    let rhs = |_z: f64, y: &[f64; 2]| [y[1], c * y[1] - nl.reaction_clamped(y[0])];

    let mut path: Vec<(f64, f64, f64)> = Vec::new();
    path.push((0.0, 0.0, c + alpha));
    let mut class: Option<ShotClass> = None;

    let (z_end, y_end) = ode::integrate(
        rhs,
        0.0,
        [0.0, c + alpha],
        cfg.z_max,
        &opts,
        |z, y| {
            if record {
                path.push((z, y[0], y[1]));
            }
            if y[0] > 1.0 + cfg.eps_over {
                class = Some(ShotClass::Overshoot);
                return StepControl::Stop;
            }
            if y[1] < 0.0 && y[0] < 1.0 - cfg.eps_under {
                class = Some(ShotClass::Undershoot);
                return StepControl::Stop;
            }
            StepControl::Continue
        },
    )?;
    if !record {
        path.push((z_end, y_end[0], y_end[1]));
    } else if path.last().map(|p| p.0) != Some(z_end) {
        path.push((z_end, y_end[0], y_end[1]));
    }

    let class = match class {
        Some(cl) => cl,
        None => {
            if (y_end[0] - 1.0).abs() <= cfg.eps_connect && y_end[1].abs() <= cfg.eps_connect {
                ShotClass::Connect
            } else {
                return Err(CoreError::Inconclusive(format!(
                    "shot at c = {c} reached z = {z_end} unclassified \
                     (q = {}, q' = {})",
                    y_end[0], y_end[1]
                )));
            }
        }
    };
    Ok((class, path))
}

/// Locate the semi-wave speed and profile.
///
/// Brackets `c*` by an upward doubling scan from 1 and a downward halving
/// scan from 1e-3, then bisects to `cfg.bracket_width`. The returned
/// profile is the midpoint shot truncated at its closest approach to the
/// saddle `(1, 0)`; past that station a bisected speed cannot track the
/// connection in finite precision, and `residual_at_one` records how close
/// it got.
pub fn solve_cstar(nl: &Nonlinearity, alpha: f64, cfg: &ShootConfig) -> Result<SemiWave> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(CoreError::Validation(format!(
            "resistance must be positive and finite, got {alpha}"
        )));
    }
    if nl.domain_cap() < 1.0 {
        return Err(CoreError::Precondition(
            "semi-wave needs the reaction trusted at least up to u = 1".into(),
        ));
    }
    let two_f1 = 2.0 * nl.potential(1.0)?;
    if two_f1 <= 0.0 || alpha * alpha >= two_f1 {
        return Err(CoreError::Precondition(format!(
            "semi-wave exists only for 0 < alpha < sqrt(2 F(1)) = {}; got {alpha}",
            two_f1.max(0.0).sqrt()
        )));
    }

    // Upward scan for an overshoot end.
    let mut c_hi = 1.0;
    let mut hi_class = shoot(nl, alpha, c_hi, cfg)?.class;
    let mut doublings = 0;
    while hi_class != ShotClass::Overshoot {
        c_hi *= 2.0;
        doublings += 1;
        if doublings > 40 {
            return Err(CoreError::Inconclusive(
                "no overshoot found during the upward speed scan".into(),
            ));
        }
        hi_class = shoot(nl, alpha, c_hi, cfg)?.class;
    }
    // Downward scan for an undershoot end.
    let mut c_lo = 1e-3;
    let mut lo_class = shoot(nl, alpha, c_lo, cfg)?.class;
    let mut halvings = 0;
    while lo_class == hi_class {
        c_lo *= 0.5;
        halvings += 1;
        if halvings > 60 {
            return Err(CoreError::Inconclusive(
                "no undershoot found during the downward speed scan".into(),
            ));
        }
        lo_class = shoot(nl, alpha, c_lo, cfg)?.class;
    }
    let polarity = (lo_class, hi_class);

    while c_hi - c_lo > cfg.bracket_width {
        let mid = 0.5 * (c_lo + c_hi);
        if mid == c_lo || mid == c_hi {
            break;
        }
        let class = shoot(nl, alpha, mid, cfg)?.class;
        if class == ShotClass::Connect {
            // Dead-centre hit; tighten symmetrically around it.
            c_lo = mid;
            c_hi = mid;
            break;
        }
        if class == lo_class {
            c_lo = mid;
        } else {
            c_hi = mid;
        }
    }
    let c_star = 0.5 * (c_lo + c_hi);

    // Rebuild the winning orbit with fixed steps at the output spacing so
    // that every profile node is an integrator node (no interpolation
    // kinks in second differences), then truncate at the closest approach
    // to the saddle (1, 0).
    let path = fixed_step_orbit(nl, alpha, c_star, cfg);
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &(_, q, p)) in path.iter().enumerate() {
        let d = (q - 1.0) * (q - 1.0) + p * p;
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    let trimmed = &path[..=best.max(2)];
    let z_end = trimmed.last().unwrap().0;
    let residual_at_one = (trimmed.last().unwrap().1 - 1.0).abs();
    let profile = SemiWaveProfile {
        zs: trimmed.iter().map(|p| p.0).collect(),
        qs: trimmed.iter().map(|p| p.1).collect(),
        qps: trimmed.iter().map(|p| p.2).collect(),
    };

    Ok(SemiWave {
        c_star,
        bracket: (c_lo, c_hi),
        polarity,
        profile,
        residual_at_one,
        z_end,
    })
}

/// Classic RK4 at step `profile_dz`, recording every node, run until the
/// orbit clearly leaves the connection (or the horizon).
fn fixed_step_orbit(
    nl: &Nonlinearity,
    alpha: f64,
    c: f64,
    cfg: &ShootConfig,
) -> Vec<(f64, f64, f64)> {
    let h = cfg.profile_dz;
    let steps = (cfg.z_max / h).ceil() as usize;
    let rhs = |y: [f64; 2]| [y[1], c * y[1] - nl.reaction_clamped(y[0])];
    let mut y = [0.0, c + alpha];
    let mut z = 0.0;
    let mut out = Vec::with_capacity(steps.min(1 << 20) + 1);
    out.push((z, y[0], y[1]));
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        z += h;
        out.push((z, y[0], y[1]));
        if y[0] > 1.0 + cfg.eps_over || (y[1] < 0.0 && y[0] < 1.0 - cfg.eps_under) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic() -> Nonlinearity {
        Nonlinearity::logistic(1.0).unwrap()
    }

    #[test]
    fn shot_classification_brackets_the_wave() {
        let nl = logistic();
        let cfg = ShootConfig::default();
        // Small speeds starve the front, large speeds overdrive it.
        let low = shoot(&nl, 0.4, 0.01, &cfg).unwrap();
        assert_eq!(low.class, ShotClass::Undershoot);
        let high = shoot(&nl, 0.4, 1.0, &cfg).unwrap();
        assert_eq!(high.class, ShotClass::Overshoot);
    }

    #[test]
    fn cstar_matches_reference_values() {
        // Frozen from an independent shooting implementation
        // (scipy RK45, rtol 1e-12, bisection to 1e-12).
        let nl = logistic();
        let cfg = ShootConfig::default();
        for (alpha, expect) in [
            (0.2, 0.235139053669),
            (0.4, 0.109230298529),
            (0.5, 0.047379963812),
        ] {
            let sw = solve_cstar(&nl, alpha, &cfg).unwrap();
            assert!(
                (sw.c_star - expect).abs() < 1e-7,
                "alpha {alpha}: got {}, want {expect}",
                sw.c_star
            );
            assert!(sw.bracket.1 - sw.bracket.0 <= cfg.bracket_width * 1.0001);
            assert_eq!(sw.polarity, (ShotClass::Undershoot, ShotClass::Overshoot));
        }
    }

    #[test]
    fn cstar_bistable_reference() {
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        let cfg = ShootConfig::default();
        for (alpha, expect) in [(0.1, 0.106367037046), (0.2, 0.049860357564)] {
            let sw = solve_cstar(&nl, alpha, &cfg).unwrap();
            assert!(
                (sw.c_star - expect).abs() < 1e-7,
                "alpha {alpha}: got {}, want {expect}",
                sw.c_star
            );
        }
    }

    #[test]
    fn foot_slope_energy_bound() {
        // (c* + alpha)² ≤ 2 F(1) with strict inequality.
        let nl = logistic();
        let cfg = ShootConfig::default();
        let two_f1 = 2.0 * nl.potential(1.0).unwrap();
        for alpha in [0.1, 0.3, 0.5] {
            let sw = solve_cstar(&nl, alpha, &cfg).unwrap();
            let foot = sw.c_star + alpha;
            assert!(foot * foot < two_f1, "alpha {alpha}");
        }
    }

    #[test]
    fn cstar_decreases_with_resistance() {
        let nl = logistic();
        let cfg = ShootConfig::default();
        let c1 = solve_cstar(&nl, 0.15, &cfg).unwrap().c_star;
        let c2 = solve_cstar(&nl, 0.3, &cfg).unwrap().c_star;
        let c3 = solve_cstar(&nl, 0.45, &cfg).unwrap().c_star;
        assert!(c1 > c2 && c2 > c3);
    }

    #[test]
    fn existence_range_is_enforced() {
        let nl = logistic();
        let cfg = ShootConfig::default();
        let a0 = (2.0 * nl.potential(1.0).unwrap()).sqrt();
        assert!(solve_cstar(&nl, a0 + 0.01, &cfg).is_err());
        assert!(solve_cstar(&nl, -0.1, &cfg).is_err());
        // theta ≥ 1/2 has F(1) ≤ 0: no semi-wave at any resistance.
        let bad = Nonlinearity::cubic_bistable(0.6).unwrap();
        assert!(solve_cstar(&bad, 0.1, &cfg).is_err());
    }

    #[test]
    fn profile_is_clean() {
        let nl = logistic();
        let cfg = ShootConfig::default();
        let sw = solve_cstar(&nl, 0.4, &cfg).unwrap();
        let q = &sw.profile.qs;
        let z = &sw.profile.zs;
        assert!(q.len() > 100);
        assert_eq!(q[0], 0.0);
        // Strictly inside (0, 1] after the foot, monotone increasing.
        for i in 1..q.len() {
            assert!(q[i] > 0.0 && q[i] <= 1.0 + 1e-8);
            assert!(q[i] >= q[i - 1] - 1e-12, "monotonicity broke at {i}");
        }
        // Tracks the saddle closely before truncation.
        assert!(sw.residual_at_one < 1e-3, "residual {}", sw.residual_at_one);
        // Foot slope matches the boundary condition.
        let dz = z[1] - z[0];
        let slope = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * dz);
        assert!((slope - (sw.c_star + 0.4)).abs() < 1e-6);
        // Interior second-difference residual of the wave equation.
        let mut worst: f64 = 0.0;
        for i in 1..q.len() - 1 {
            let qpp = (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (dz * dz);
            let qp = (q[i + 1] - q[i - 1]) / (2.0 * dz);
            let res = qpp - sw.c_star * qp + nl.reaction_clamped(q[i]);
            worst = worst.max(res.abs());
        }
        assert!(worst < 1e-6, "wave-equation residual {worst}");
    }

    #[test]
    fn refinement_stability() {
        let nl = logistic();
        let coarse = ShootConfig::default();
        let fine = ShootConfig {
            rtol: 5e-11,
            atol: 5e-13,
            ..ShootConfig::default()
        };
        let a = solve_cstar(&nl, 0.3, &coarse).unwrap().c_star;
        let b = solve_cstar(&nl, 0.3, &fine).unwrap().c_star;
        assert!((a - b).abs() <= 1e-8, "c* moved by {}", (a - b).abs());
    }
}
