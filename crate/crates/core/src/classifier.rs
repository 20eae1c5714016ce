//! Outcome taxonomy for finished trajectories.
//!
//! A run ends in one of three asymptotic regimes: *spreading* (both
//! fronts march outward forever and the interior saturates at the
//! positive zero of `f`), *vanishing* (the interval collapses to a point
//! in finite time with the solution going to zero uniformly), or the
//! borderline *transition* where the fronts stall and the profile locks
//! onto the compactly supported stationary arch `V_alpha`. Finite-horizon
//! data cannot always distinguish these, so every verdict is backed by
//! named scalar diagnostics and the ambiguous cases land in
//! `Undetermined` rather than being forced.

use crate::config::RunConfig;
use crate::error::{CoreError, Result};
use crate::nonlinearity::Nonlinearity;
use crate::phase_plane::{self, StationaryCase, StationaryClass};
use crate::solver::{Snapshot, Termination, Trajectory};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Verdict conventions. These are reporting thresholds, not model
/// quantities; the defaults are deliberate and documented per field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierParams {
    /// Interior plateau must sit within this relative distance of the
    /// positive zero of `f` to confirm spreading.
    pub plateau_rtol: f64,
    /// Tail-averaged front speeds must agree to this relative tolerance.
    pub speed_match_rtol: f64,
    /// Interval width must match `2 ell` to this relative tolerance for
    /// a transition verdict.
    pub width_rtol: f64,
    /// Both front speeds below this value counts as stalled.
    pub eps_stall: f64,
    /// Centered sup-norm distance to `V_alpha`, relative to its peak.
    pub profile_rtol: f64,
    /// Fraction of the run (in time) used for tail averages.
    pub tail_fraction: f64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            plateau_rtol: 0.05,
            speed_match_rtol: 0.10,
            width_rtol: 0.05,
            eps_stall: 1e-5,
            profile_rtol: 0.05,
            tail_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Spreading,
    Vanishing {
        t_star: f64,
    },
    Transition {
        width: f64,
        profile_error: f64,
    },
    Undetermined {
        reasons: Vec<String>,
    },
}

/// Verdict plus the scalar evidence it was based on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Named measurements backing the verdict (deterministic order).
    pub diagnostics: BTreeMap<String, f64>,
    /// Human-readable caveats that do not change the verdict.
    pub notes: Vec<String>,
}

/// Classify a finished trajectory.
///
/// `sc` is the stationary classification at this `(f, alpha)` (it gates
/// the transition branch) and `cstar`, when known, is recorded against
/// the measured tail speed.
pub fn detect_outcome(
    traj: &Trajectory,
    nl: &Nonlinearity,
    sc: &StationaryClass,
    cstar: Option<f64>,
    params: &ClassifierParams,
) -> Outcome {
    let mut diag = BTreeMap::new();
    let mut notes = Vec::new();
    let cfg = &traj.config;
    let last = traj.final_snapshot();

    match traj.termination {
        Termination::ShrinkVanish { t_star } => {
            diag.insert("t_star".into(), t_star);
            diag.insert("final_width".into(), last.h - last.g);
            diag.insert("final_max_u".into(), last.max_u);
            let lag = traj.monitors.trigger_lag.unwrap_or(f64::INFINITY);
            diag.insert("trigger_lag".into(), lag);
            let window = cfg.equiv_window.unwrap_or_else(|| {
                // Once the solution is dead the resistance closes the
                // interval at speed at least 2 alpha, so tolerate that
                // walk from the width where the sup norm trigger fired,
                // with slack for the residual flux and the sampling grid.
                let w_v = traj
                    .monitors
                    .vanish_trigger_t
                    .and_then(|tv| width_at(traj, tv))
                    .unwrap_or(2.0 * cfg.h0);
                1.5 * w_v / (2.0 * cfg.alpha) + cfg.snapshot_dt
            });
            if lag > window {
                return Outcome {
                    verdict: Verdict::Undetermined {
                        reasons: vec![format!(
                            "interval shrank but the sup norm trigger lagged by {lag}, \
                             beyond the equivalence window {window}"
                        )],
                    },
                    diagnostics: diag,
                    notes,
                };
            }
            // The common limit should land inside the original interval;
            // allow one coarse grid cell of numerical slack and only log.
            let slack = 10.0 * cfg.dx0();
            if last.g < -cfg.h0 - slack || last.h > cfg.h0 + slack {
                notes.push(format!(
                    "collapse point [{}, {}] lies outside [-h0, h0] = [{}, {}] \
                     beyond the 10 dx slack",
                    last.g, last.h, -cfg.h0, cfg.h0
                ));
            }
            Outcome {
                verdict: Verdict::Vanishing { t_star },
                diagnostics: diag,
                notes,
            }
        }
        Termination::DomainOverflow => {
            diag.insert("final_max_u".into(), last.max_u);
            diag.insert("final_width".into(), last.h - last.g);
            record_tail_speeds(traj, params, &mut diag);
            if let Some(c) = cstar {
                diag.insert("cstar".into(), c);
            }
            match plateau_error(nl, last.max_u) {
                Some(rel) => {
                    diag.insert("plateau_rel_err".into(), rel);
                    if rel <= params.plateau_rtol {
                        notes.push("spreading confirmed: plateau at the positive zero of f".into());
                    } else {
                        notes.push(format!(
                            "spreading presumptive: a front left the box but the interior \
                             is still {:.1}% away from the positive zero of f",
                            100.0 * rel
                        ));
                    }
                }
                None => notes.push(
                    "spreading presumptive: f has no positive zero to check the plateau against"
                        .into(),
                ),
            }
            Outcome {
                verdict: Verdict::Spreading,
                diagnostics: diag,
                notes,
            }
        }
        Termination::NumericalFailure => Outcome {
            verdict: Verdict::Undetermined {
                reasons: vec!["the run ended in a numerical failure".into()],
            },
            diagnostics: diag,
            notes,
        },
        Termination::HorizonReached => {
            classify_at_horizon(traj, nl, sc, cstar, params, diag, notes)
        }
    }
}

/// The horizon case: decide between sustained spreading, a stalled
/// transition profile, and honest ambiguity.
fn classify_at_horizon(
    traj: &Trajectory,
    nl: &Nonlinearity,
    sc: &StationaryClass,
    cstar: Option<f64>,
    params: &ClassifierParams,
    mut diag: BTreeMap<String, f64>,
    mut notes: Vec<String>,
) -> Outcome {
    let last = traj.final_snapshot();
    let width = last.h - last.g;
    diag.insert("final_width".into(), width);
    diag.insert("final_max_u".into(), last.max_u);
    diag.insert("final_hprime".into(), last.hprime);
    diag.insert("final_gprime".into(), last.gprime);
    if let Some(c) = cstar {
        diag.insert("cstar".into(), c);
    }

    let mut reasons = Vec::new();

    // Sustained-motion test on the last stretch of the run.
    let speeds = record_tail_speeds(traj, params, &mut diag);
    let plateau = plateau_error(nl, last.max_u);
    if let Some(rel) = plateau {
        diag.insert("plateau_rel_err".into(), rel);
    }
    match speeds {
        Some((right, left)) => {
            let both_positive = right > 0.0 && left > 0.0;
            let mismatch = (right - left).abs() / right.abs().max(left.abs()).max(f64::MIN_POSITIVE);
            diag.insert("tail_speed_mismatch".into(), mismatch);
            let plateau_ok = plateau.map(|r| r <= params.plateau_rtol).unwrap_or(false);
            if both_positive && mismatch <= params.speed_match_rtol && plateau_ok {
                if traj.snapshots.last().map(|s| s.h > traj.config.h0 + 1e-9) == Some(true) {
                    // Nothing to add; kept for symmetry with the overflow arm.
                }
                notes.push("both fronts still advancing at matched speeds at the horizon".into());
                return Outcome {
                    verdict: Verdict::Spreading,
                    diagnostics: diag,
                    notes,
                };
            }
            if !both_positive {
                reasons.push(format!(
                    "tail-averaged front speeds are not both positive \
                     (h' avg {right}, -g' avg {left})"
                ));
            } else if mismatch > params.speed_match_rtol {
                reasons.push(format!(
                    "tail-averaged front speeds disagree by {:.1}% (> {:.0}%)",
                    100.0 * mismatch,
                    100.0 * params.speed_match_rtol
                ));
            }
            if both_positive && mismatch <= params.speed_match_rtol && !plateau_ok {
                reasons.push(match plateau {
                    Some(rel) => format!(
                        "fronts advance but the interior is {:.1}% away from the \
                         positive zero of f",
                        100.0 * rel
                    ),
                    None => "fronts advance but f has no positive zero to check".into(),
                });
            }
        }
        None => reasons.push("too few snapshots to average tail speeds".into()),
    }

    // Transition test, only meaningful when a compact stationary arch
    // exists at this resistance.
    match sc.case {
        StationaryCase::CompactSupport { peak, half_width } => {
            let target = 2.0 * half_width;
            let width_err = (width - target).abs() / target;
            diag.insert("width_rel_err".into(), width_err);
            let stall = last.hprime.abs() + last.gprime.abs();
            diag.insert("stall_speed".into(), stall);
            let width_ok = width_err <= params.width_rtol;
            let stall_ok = stall <= params.eps_stall;
            if width_ok && stall_ok {
                match transition_profile_error(traj, nl, half_width) {
                    Ok(err) => {
                        diag.insert("profile_error".into(), err);
                        if err <= params.profile_rtol * peak {
                            return Outcome {
                                verdict: Verdict::Transition {
                                    width,
                                    profile_error: err,
                                },
                                diagnostics: diag,
                                notes,
                            };
                        }
                        reasons.push(format!(
                            "fronts stalled at the right width but the profile is {err:.3e} \
                             from the stationary arch (allowed {:.3e})",
                            params.profile_rtol * peak
                        ));
                    }
                    Err(e) => reasons.push(format!("profile comparison failed: {e}")),
                }
            } else {
                if !width_ok {
                    reasons.push(format!(
                        "final width {width} is {:.1}% away from the arch support {target}",
                        100.0 * width_err
                    ));
                }
                if !stall_ok {
                    reasons.push(format!(
                        "fronts not stalled: |h'| + |g'| = {stall} > {}",
                        params.eps_stall
                    ));
                }
            }
        }
        _ => {
            notes.push(
                "no compactly supported stationary arch at this resistance; \
                 transition detection disabled"
                    .into(),
            );
        }
    }

    Outcome {
        verdict: Verdict::Undetermined { reasons },
        diagnostics: diag,
        notes,
    }
}

/// Relative distance of the interior maximum from the positive zero of
/// `f`, when that zero exists.
fn plateau_error(nl: &Nonlinearity, max_u: f64) -> Option<f64> {
    nl.upper_zero().map(|z| (max_u - z).abs() / z)
}

/// Time-averaged front speeds over the trailing `tail_fraction` of the
/// run, computed from front positions (robust to speed oscillations).
/// Returns `(h' average, -g' average)`.
fn record_tail_speeds(
    traj: &Trajectory,
    params: &ClassifierParams,
    diag: &mut BTreeMap<String, f64>,
) -> Option<(f64, f64)> {
    let last = traj.final_snapshot();
    let t_cut = last.t * (1.0 - params.tail_fraction);
    let start = traj.snapshots.iter().find(|s| s.t >= t_cut)?;
    let dt = last.t - start.t;
    if !(dt > 0.0) {
        return None;
    }
    let right = (last.h - start.h) / dt;
    let left = -(last.g - start.g) / dt;
    diag.insert("tail_avg_hprime".into(), right);
    diag.insert("tail_avg_gprime_neg".into(), left);
    Some((right, left))
}

/// Sup-norm distance between the final profile (centered) and the
/// stationary arch `V_alpha`.
fn transition_profile_error(traj: &Trajectory, nl: &Nonlinearity, half_width: f64) -> Result<f64> {
    let last = traj.final_snapshot();
    let w = last
        .profile
        .as_ref()
        .ok_or_else(|| CoreError::Precondition("final snapshot carries no profile".into()))?;
    let arch = phase_plane::profile(nl, traj.config.alpha, 2001)?;
    let center = 0.5 * (last.g + last.h);
    let l = last.h - last.g;
    let n = w.len() - 1;
    let mut worst = 0.0_f64;
    for (i, &wi) in w.iter().enumerate() {
        let x = last.g + l * i as f64 / n as f64;
        // Shift so the arch support [0, 2 ell] is centered where the
        // solution is.
        let y = x - center + half_width;
        let v = interp_profile(&arch.xs, &arch.vs, y);
        worst = worst.max((wi - v).abs());
    }
    Ok(worst)
}

/// Linear interpolation on a sorted grid, zero outside its range.
fn interp_profile(xs: &[f64], vs: &[f64], y: f64) -> f64 {
    if y <= xs[0] || y >= xs[xs.len() - 1] {
        return 0.0;
    }
    let j = xs.partition_point(|&x| x <= y).min(xs.len() - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (y - x0) / (x1 - x0);
    vs[j - 1] + t * (vs[j] - vs[j - 1])
}

/// Front-speed measurement against the semi-wave speed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedReport {
    /// Least-squares slope of `h(t)` over the last half of the run.
    pub slope: f64,
    /// Max minus min of the residual `h(t) - slope t` on that window.
    pub drift: f64,
    /// `|slope - c*| / c*`.
    pub rel_err: f64,
    /// Same three quantities for the left front, measured on `-g(t)`.
    pub left_slope: f64,
    pub left_drift: f64,
    pub left_rel_err: f64,
}

/// Measure asymptotic front speeds on the last half of a spreading run.
pub fn spreading_speed(traj: &Trajectory, cstar: f64) -> Result<SpeedReport> {
    let last = traj.final_snapshot();
    let t_cut = 0.5 * last.t;
    let tail: Vec<&Snapshot> = traj.snapshots.iter().filter(|s| s.t >= t_cut).collect();
    if tail.len() < 8 {
        return Err(CoreError::Precondition(format!(
            "need at least 8 snapshots in the last half of the run to fit a speed, got {}",
            tail.len()
        )));
    }
    if !(cstar > 0.0) {
        return Err(CoreError::Precondition(format!(
            "reference speed must be positive, got {cstar}"
        )));
    }
    let ts: Vec<f64> = tail.iter().map(|s| s.t).collect();
    let (slope, drift) = fit_speed(&ts, &tail.iter().map(|s| s.h).collect::<Vec<_>>());
    let (left_slope, left_drift) = fit_speed(&ts, &tail.iter().map(|s| -s.g).collect::<Vec<_>>());
    Ok(SpeedReport {
        slope,
        drift,
        rel_err: (slope - cstar).abs() / cstar,
        left_slope,
        left_drift,
        left_rel_err: (left_slope - cstar).abs() / cstar,
    })
}

/// Least-squares line through `(t, y)`; returns the slope and the spread
/// (max minus min) of the de-trended residuals.
fn fit_speed(ts: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let tbar = ts.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &y) in ts.iter().zip(ys) {
        num += (t - tbar) * (y - ybar);
        den += (t - tbar) * (t - tbar);
    }
    let slope = num / den;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&t, &y) in ts.iter().zip(ys) {
        let r = y - slope * t;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (slope, hi - lo)
}

/// Comparison-principle audit of an ordered pair of runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingReport {
    /// Common checkpoints examined.
    pub checkpoints: usize,
    /// Checkpoints at which both runs stored full profiles.
    pub profile_checkpoints: usize,
    /// Worst signed excess of `g_hi - g_lo` (positive means violation).
    pub max_g_violation: f64,
    /// Worst signed excess of `h_lo - h_hi`.
    pub max_h_violation: f64,
    /// Worst signed excess of `u_lo - u_hi` on profile overlaps.
    pub max_u_violation: f64,
    /// Tolerance `5 max(dx_lo, dx_hi)` at the loosest checkpoint.
    pub tol: f64,
    /// All three violation maxima stayed below the tolerance.
    pub ordering_holds: bool,
}

fn same_nonlinearity(a: &RunConfig, b: &RunConfig) -> bool {
    serde_json::to_string(&a.nonlinearity).ok() == serde_json::to_string(&b.nonlinearity).ok()
}

/// Check the comparison principle between a dominated run (`lo`) and a
/// dominating one (`hi`): the bigger initial data must keep bigger
/// solution and wider interval at every common checkpoint.
pub fn compare_runs(lo: &Trajectory, hi: &Trajectory) -> Result<OrderingReport> {
    let (cl, ch) = (&lo.config, &hi.config);
    if cl.alpha != ch.alpha {
        return Err(CoreError::Precondition(format!(
            "comparison needs equal resistances, got {} and {}",
            cl.alpha, ch.alpha
        )));
    }
    if !same_nonlinearity(cl, ch) {
        return Err(CoreError::Precondition(
            "comparison needs the same reaction term in both runs".into(),
        ));
    }
    if cl.h0 > ch.h0 {
        return Err(CoreError::Precondition(format!(
            "dominated run must start inside the dominating one: h0 {} > {}",
            cl.h0, ch.h0
        )));
    }
    check_initial_ordering(lo, hi)?;

    let mut report = OrderingReport {
        checkpoints: 0,
        profile_checkpoints: 0,
        max_g_violation: f64::NEG_INFINITY,
        max_h_violation: f64::NEG_INFINITY,
        max_u_violation: f64::NEG_INFINITY,
        tol: 0.0,
        ordering_holds: true,
    };

    for slo in &lo.snapshots {
        let Some(shi) = find_snapshot(hi, slo.t) else {
            continue;
        };
        report.checkpoints += 1;
        let dx_lo = (slo.h - slo.g) / slo.n as f64;
        let dx_hi = (shi.h - shi.g) / shi.n as f64;
        let tol = 5.0 * dx_lo.max(dx_hi);
        report.tol = report.tol.max(tol);

        report.max_g_violation = report.max_g_violation.max(shi.g - slo.g - tol);
        report.max_h_violation = report.max_h_violation.max(slo.h - shi.h - tol);

        if let (Some(wlo), Some(whi)) = (&slo.profile, &shi.profile) {
            report.profile_checkpoints += 1;
            let xs_hi: Vec<f64> = grid(shi, whi.len());
            let overlap_lo = slo.g.max(shi.g);
            let overlap_hi = slo.h.min(shi.h);
            let nlo = wlo.len() - 1;
            for (i, &ulo) in wlo.iter().enumerate() {
                let x = slo.g + (slo.h - slo.g) * i as f64 / nlo as f64;
                if x < overlap_lo || x > overlap_hi {
                    continue;
                }
                let uhi = interp_profile(&xs_hi, whi, x);
                report.max_u_violation = report.max_u_violation.max(ulo - uhi - tol);
            }
        }
    }

    if report.checkpoints == 0 {
        return Err(CoreError::Precondition(
            "the runs share no common checkpoint times".into(),
        ));
    }
    report.ordering_holds = report.max_g_violation <= 0.0
        && report.max_h_violation <= 0.0
        && (report.profile_checkpoints == 0 || report.max_u_violation <= 0.0);
    Ok(report)
}

/// The initial profiles themselves must be ordered on the overlap; that
/// is a precondition of the comparison principle, not a finding.
fn check_initial_ordering(lo: &Trajectory, hi: &Trajectory) -> Result<()> {
    let slo = &lo.snapshots[0];
    let shi = &hi.snapshots[0];
    let (Some(wlo), Some(whi)) = (&slo.profile, &shi.profile) else {
        return Err(CoreError::Precondition(
            "both runs must store their initial profiles".into(),
        ));
    };
    let xs_hi = grid(shi, whi.len());
    let nlo = wlo.len() - 1;
    // Discretization noise allowance for the ordering precondition.
    let tol = 1e-9 * (1.0 + wlo.iter().fold(0.0_f64, |a, &b| a.max(b)));
    for (i, &ulo) in wlo.iter().enumerate() {
        let x = slo.g + (slo.h - slo.g) * i as f64 / nlo as f64;
        if x < shi.g || x > shi.h {
            if ulo > tol {
                return Err(CoreError::Precondition(format!(
                    "initial data not ordered: u_lo({x}) = {ulo} outside the dominating support"
                )));
            }
            continue;
        }
        let uhi = interp_profile(&xs_hi, whi, x);
        if ulo > uhi + tol {
            return Err(CoreError::Precondition(format!(
                "initial data not ordered: u_lo({x}) = {ulo} > u_hi({x}) = {uhi}"
            )));
        }
    }
    Ok(())
}

fn grid(s: &Snapshot, len: usize) -> Vec<f64> {
    let n = len - 1;
    (0..len)
        .map(|i| s.g + (s.h - s.g) * i as f64 / n as f64)
        .collect()
}

/// Locate the snapshot of `traj` at time `t`, tolerating roundoff in the
/// stored checkpoint times.
fn find_snapshot(traj: &Trajectory, t: f64) -> Option<&Snapshot> {
    let tol = 1e-9 * (1.0 + t.abs());
    traj.snapshots.iter().find(|s| (s.t - t).abs() <= tol)
}

/// Interval width at time `t`, linearly interpolated between snapshots.
fn width_at(traj: &Trajectory, t: f64) -> Option<f64> {
    let snaps = &traj.snapshots;
    if snaps.is_empty() {
        return None;
    }
    if t <= snaps[0].t {
        return Some(snaps[0].h - snaps[0].g);
    }
    for pair in snaps.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if t <= b.t {
            let span = b.t - a.t;
            let th = if span > 0.0 { (t - a.t) / span } else { 1.0 };
            let g = a.g + th * (b.g - a.g);
            let h = a.h + th * (b.h - a.h);
            return Some(h - g);
        }
    }
    let last = snaps.last().unwrap();
    Some(last.h - last.g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NonlinearitySpec;
    use crate::phase_plane::classify_stationary;
    use crate::solver::{run_from_config, MonitorReport};

    fn logistic_cfg(alpha: f64, sigma: f64) -> RunConfig {
        let mut cfg = RunConfig::new(NonlinearitySpec::Logistic { r: 1.0 }, alpha);
        cfg.sigma = sigma;
        cfg
    }

    #[test]
    fn small_data_vanishes_inside_the_initial_interval() {
        let mut cfg = logistic_cfg(0.5, 0.2);
        cfg.n = 128;
        cfg.t_horizon = 50.0;
        let traj = run_from_config(&cfg).unwrap();
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let sc = classify_stationary(&nl, 0.5).unwrap();
        let out = detect_outcome(&traj, &nl, &sc, None, &ClassifierParams::default());
        match out.verdict {
            Verdict::Vanishing { t_star } => assert!(t_star > 0.0 && t_star < 50.0),
            other => panic!("expected vanishing, got {other:?}"),
        }
        assert!(
            out.notes.is_empty(),
            "collapse point drifted outside [-h0, h0]: {:?}",
            out.notes
        );
    }

    #[test]
    fn overflow_is_classified_as_spreading_with_plateau() {
        let mut cfg = logistic_cfg(0.4, 4.0);
        cfg.n = 200;
        cfg.x_max = 6.0;
        cfg.t_horizon = 200.0;
        let traj = run_from_config(&cfg).unwrap();
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let sc = classify_stationary(&nl, 0.4).unwrap();
        let out = detect_outcome(&traj, &nl, &sc, None, &ClassifierParams::default());
        assert_eq!(out.verdict, Verdict::Spreading);
        assert!(
            out.notes.iter().any(|n| n.contains("confirmed")),
            "{:?}",
            out.notes
        );
    }

    #[test]
    fn sustained_motion_at_horizon_is_spreading() {
        let mut cfg = logistic_cfg(0.2, 2.0);
        cfg.n = 200;
        cfg.x_max = 400.0;
        cfg.t_horizon = 60.0;
        let traj = run_from_config(&cfg).unwrap();
        assert_eq!(traj.termination, Termination::HorizonReached);
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let sc = classify_stationary(&nl, 0.2).unwrap();
        let out = detect_outcome(&traj, &nl, &sc, None, &ClassifierParams::default());
        assert_eq!(out.verdict, Verdict::Spreading, "{:?}", out.diagnostics);
    }

    /// Build a horizon trajectory sitting exactly on the stationary arch.
    fn stalled_arch_trajectory(nl: &Nonlinearity, alpha: f64) -> (Trajectory, StationaryClass) {
        let sc = classify_stationary(nl, alpha).unwrap();
        let StationaryCase::CompactSupport { half_width, .. } = sc.case else {
            panic!("fixture needs a compact arch");
        };
        let arch = phase_plane::profile(nl, alpha, 400).unwrap();
        let mut cfg = RunConfig::new(NonlinearitySpec::Logistic { r: 1.0 }, alpha);
        cfg.n = 400;
        cfg.t_horizon = 100.0;
        let snap = Snapshot {
            t: 100.0,
            g: -half_width,
            h: half_width,
            gprime: 0.0,
            hprime: 0.0,
            max_u: arch.peak,
            n: 400,
            profile: Some(arch.vs.clone()),
        };
        let traj = Trajectory {
            config: cfg,
            snapshots: vec![
                Snapshot {
                    profile: snap.profile.clone(),
                    t: 0.0,
                    ..snap.clone()
                },
                Snapshot {
                    t: 80.0,
                    ..snap.clone()
                },
                snap,
            ],
            termination: Termination::HorizonReached,
            monitors: MonitorReport::default(),
        };
        (traj, sc)
    }

    #[test]
    fn stalled_arch_is_a_transition() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let alpha = 0.4;
        let (traj, sc) = stalled_arch_trajectory(&nl, alpha);
        let out = detect_outcome(&traj, &nl, &sc, None, &ClassifierParams::default());
        match out.verdict {
            Verdict::Transition {
                width,
                profile_error,
            } => {
                let StationaryCase::CompactSupport { half_width, .. } = sc.case else {
                    unreachable!()
                };
                assert!((width - 2.0 * half_width).abs() < 1e-9);
                assert!(profile_error < 1e-3, "profile error {profile_error}");
            }
            other => panic!("expected transition, got {other:?}"),
        }
    }

    #[test]
    fn numerical_failure_is_undetermined() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let (mut traj, sc) = stalled_arch_trajectory(&nl, 0.4);
        traj.termination = Termination::NumericalFailure;
        let out = detect_outcome(&traj, &nl, &sc, None, &ClassifierParams::default());
        assert!(matches!(out.verdict, Verdict::Undetermined { .. }));
    }

    #[test]
    fn speed_fit_recovers_a_synthetic_slope() {
        let mut cfg = logistic_cfg(0.3, 1.0);
        cfg.t_horizon = 100.0;
        let mut snapshots = Vec::new();
        for k in 0..=200 {
            let t = k as f64 * 0.5;
            let wobble = 1e-4 * (0.37 * t).sin();
            snapshots.push(Snapshot {
                t,
                g: -5.0 - 0.3 * t - wobble,
                h: 5.0 + 0.3 * t + wobble,
                gprime: -0.3,
                hprime: 0.3,
                max_u: 1.0,
                n: 100,
                profile: None,
            });
        }
        let traj = Trajectory {
            config: cfg,
            snapshots,
            termination: Termination::HorizonReached,
            monitors: MonitorReport::default(),
        };
        let report = spreading_speed(&traj, 0.3).unwrap();
        assert!(report.rel_err < 1e-3, "rel_err {}", report.rel_err);
        assert!(report.left_rel_err < 1e-3);
        assert!(report.drift < 1e-3, "drift {}", report.drift);
        assert!((report.slope - report.left_slope).abs() < 1e-9);
    }

    #[test]
    fn too_few_snapshots_is_an_error() {
        let (traj, _) = stalled_arch_trajectory(&Nonlinearity::logistic(1.0).unwrap(), 0.4);
        assert!(spreading_speed(&traj, 0.3).is_err());
    }

    #[test]
    fn comparison_principle_holds_for_nested_data() {
        let mut lo_cfg = logistic_cfg(0.4, 0.5);
        lo_cfg.t_horizon = 8.0;
        lo_cfg.profile_every = 4;
        let mut hi_cfg = logistic_cfg(0.4, 1.0);
        hi_cfg.t_horizon = 8.0;
        hi_cfg.profile_every = 4;
        let lo = run_from_config(&lo_cfg).unwrap();
        let hi = run_from_config(&hi_cfg).unwrap();
        let report = compare_runs(&lo, &hi).unwrap();
        assert!(report.ordering_holds, "{report:?}");
        assert!(report.checkpoints > 4);
        assert!(report.profile_checkpoints >= 2);
    }

    #[test]
    fn identical_runs_compare_as_equal() {
        let mut cfg = logistic_cfg(0.4, 1.0);
        cfg.t_horizon = 5.0;
        cfg.profile_every = 2;
        let a = run_from_config(&cfg).unwrap();
        let b = run_from_config(&cfg).unwrap();
        // Determinism: the two runs are bitwise identical.
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let report = compare_runs(&a, &b).unwrap();
        assert!(report.ordering_holds);
    }

    #[test]
    fn unordered_initial_data_is_a_precondition_error() {
        let mut lo_cfg = logistic_cfg(0.4, 1.0);
        lo_cfg.t_horizon = 2.0;
        let mut hi_cfg = logistic_cfg(0.4, 0.5);
        hi_cfg.t_horizon = 2.0;
        let lo = run_from_config(&lo_cfg).unwrap();
        let hi = run_from_config(&hi_cfg).unwrap();
        let err = compare_runs(&lo, &hi).unwrap_err();
        assert!(matches!(err, CoreError::Precondition(_)), "{err}");
    }

    #[test]
    fn mismatched_alpha_is_rejected() {
        let mut a_cfg = logistic_cfg(0.4, 1.0);
        a_cfg.t_horizon = 1.0;
        let mut b_cfg = logistic_cfg(0.5, 1.0);
        b_cfg.t_horizon = 1.0;
        let a = run_from_config(&a_cfg).unwrap();
        let b = run_from_config(&b_cfg).unwrap();
        assert!(compare_runs(&a, &b).is_err());
    }
}
