//! Sufficient conditions for vanishing, checkable without running the
//! solver.
//!
//! Each check is one-sided: a fired certificate guarantees the run would
//! vanish, while `None` says nothing. The conditions are energetic
//! (resistance at or above the critical `alpha0 = sqrt(2 sup F)`) or
//! comparison-based (initial data trapped under a stationary profile,
//! or small enough in sup or `L^1` norm for bistable reactions).
//!
//! Certificates are advisory: callers print them ahead of a simulation,
//! but the solver itself never short-circuits on one, so the guarantee
//! stays independently testable against the dynamics.

use crate::error::Result;
use crate::initial::InitialData;
use crate::nonlinearity::{Nonlinearity, ReactionClass};
use crate::phase_plane::{self, StationaryCase};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Relative tolerance for treating the resistance as exactly critical.
const ALPHA_EQ_RTOL: f64 = 1e-9;
/// Pointwise slack when trapping `u0` under a stationary profile.
const TRAP_ABS_TOL: f64 = 1e-12;
/// Required strict margin, somewhere, for the arch-trapping condition.
const TRAP_STRICT_TOL: f64 = 1e-9;
/// Grid for scanning potentials and linear bounds.
const SCAN_POINTS: usize = 4096;
/// Number of trial shifts for the plateau-profile trap.
const SHIFT_GRID: usize = 64;

/// Which sufficient condition fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Reason {
    /// `alpha > alpha0`: resistance beats every stored potential level.
    AlphaAboveCritical,
    /// `alpha = alpha0` with `2 F(v) < alpha0^2` for all positive `v`.
    AlphaCriticalStrictGap,
    /// `u0 <= V~_alpha(x + b)`: trapped under the monotone plateau
    /// profile after shifting by `b`.
    BelowPlateauProfile { shift_b: f64 },
    /// `u0 <= V_alpha(x + ell)` with strict inequality somewhere:
    /// trapped under the compact stationary arch.
    BelowStationaryProfile,
    /// Bistable, with `||sigma phi||_inf <= theta`.
    BelowTheta,
    /// Bistable, with `||sigma phi||_L1 <= theta sqrt(2 pi / (e K))`.
    SmallMass,
}

/// A fired certificate: the condition, how much room it had, and a
/// sentence of context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub reason: Reason,
    /// Slack in the fired inequality, in the condition's own units.
    pub margin: f64,
    pub detail: String,
}

/// Check the sufficient conditions in order and report the first hit.
///
/// All potential-based quantities are evaluated on the trusted reaction
/// range `[0, domain_cap]`; when the potential is still climbing at the
/// cap, the critical resistance reflects the truncated reaction and the
/// certificate inherits that reading.
pub fn vanishing_certificate(
    data: &InitialData,
    nl: &Nonlinearity,
    alpha: f64,
) -> Result<Option<Certificate>> {
    data.validate()?;
    let sc = phase_plane::classify_stationary(nl, alpha)?;
    let alpha0 = sc.critical_alpha;

    // (i) Supercritical resistance.
    if alpha > alpha0 * (1.0 + ALPHA_EQ_RTOL) {
        return Ok(Some(Certificate {
            reason: Reason::AlphaAboveCritical,
            margin: alpha - alpha0,
            detail: format!("alpha = {alpha} exceeds the critical resistance alpha0 = {alpha0}"),
        }));
    }

    let at_critical = alpha0 > 0.0 && (alpha - alpha0).abs() <= ALPHA_EQ_RTOL * alpha0;

    // (ii) Critical resistance with the potential strictly below the
    // critical level everywhere: the sup is approached, never attained.
    if at_critical && sc.sup_at_cap {
        if let Some(gap) = min_potential_gap(nl, alpha0)? {
            return Ok(Some(Certificate {
                reason: Reason::AlphaCriticalStrictGap,
                margin: gap,
                detail: format!(
                    "alpha sits at the critical value {alpha0} and 2F(v) stays at least \
                     {gap} below alpha0^2 on the trusted range"
                ),
            }));
        }
    }

    // (iii) Critical resistance attained at a plateau: slide the
    // monotone profile over the data.
    if at_critical {
        if let StationaryCase::InfinitePlateau { plateau } = sc.case {
            if let Some((b, margin)) = trap_under_plateau(data, nl, alpha, plateau)? {
                return Ok(Some(Certificate {
                    reason: Reason::BelowPlateauProfile { shift_b: b },
                    margin,
                    detail: format!(
                        "u0 fits under the plateau profile shifted by b = {b} \
                         with clearance {margin}"
                    ),
                }));
            }
        }
    }

    // (iv) Subcritical resistance; try to trap the data under the
    // compact stationary arch.
    if let StationaryCase::CompactSupport { half_width, .. } = sc.case {
        if let Some(margin) = trap_under_arch(data, nl, alpha, half_width)? {
            return Ok(Some(Certificate {
                reason: Reason::BelowStationaryProfile,
                margin,
                detail: format!(
                    "u0 sits below the stationary arch V_alpha(x + {half_width}) \
                     with clearance {margin}"
                ),
            }));
        }
    }

    // (B1)/(B2) Bistable smallness conditions.
    if let ReactionClass::Bistable { theta } = nl.classify() {
        let sup = data.sup_norm();
        if sup <= theta {
            return Ok(Some(Certificate {
                reason: Reason::BelowTheta,
                margin: theta - sup,
                detail: format!(
                    "||sigma phi||_inf = {sup} does not exceed the unstable zero theta = {theta}"
                ),
            }));
        }
        let (k, k_note) = linear_bound_constant(nl);
        let budget = theta * (2.0 * std::f64::consts::PI / (std::f64::consts::E * k)).sqrt();
        let mass = data.l1_norm();
        if mass <= budget {
            let mut detail = format!(
                "||sigma phi||_L1 = {mass} fits the budget {budget} \
                 (theta = {theta}, K = {k})"
            );
            if let Some(note) = k_note {
                detail.push_str("; ");
                detail.push_str(&note);
            }
            return Ok(Some(Certificate {
                reason: Reason::SmallMass,
                margin: budget - mass,
                detail,
            }));
        }
    }

    Ok(None)
}

/// Smallest value of `alpha0^2 - 2 F(v)` over the trusted range, or
/// `None` when the gap closes (the critical level is attained).
fn min_potential_gap(nl: &Nonlinearity, alpha0: f64) -> Result<Option<f64>> {
    let cap = nl.domain_cap() * (1.0 - 1e-6);
    let level = alpha0 * alpha0;
    let mut gap = f64::INFINITY;
    for j in 1..=SCAN_POINTS {
        let v = cap * j as f64 / SCAN_POINTS as f64;
        gap = gap.min(level - 2.0 * nl.potential(v)?);
    }
    Ok(if gap > 0.0 { Some(gap) } else { None })
}

/// The compact arch `V_alpha` on `[0, 2 ell]`, compared pointwise
/// against the scaled data: requires `u0 <= V` everywhere (within
/// roundoff) and a strict gap somewhere. Interpolation is conservative:
/// on each profile cell the arch is taken at the lower endpoint value.
fn trap_under_arch(
    data: &InitialData,
    nl: &Nonlinearity,
    alpha: f64,
    half_width: f64,
) -> Result<Option<f64>> {
    if data.h0 > half_width {
        return Ok(None); // data support pokes out of the arch support
    }
    let arch = phase_plane::profile(nl, alpha, 2001)?;
    let u0 = data.scaled();
    let n = u0.len() - 1;
    let mut min_gap = f64::INFINITY;
    for (i, &u) in u0.iter().enumerate() {
        let x = -data.h0 + 2.0 * data.h0 * i as f64 / n as f64;
        let v = lower_bound_on_grid(&arch.xs, &arch.vs, x + half_width);
        let gap = v - u;
        if gap < -TRAP_ABS_TOL {
            return Ok(None);
        }
        min_gap = min_gap.min(gap);
    }
    // The proposition wants strict inequality somewhere; with u0 = 0 at
    // the endpoints and V > 0 there, the gap is structurally positive,
    // but measure it anyway.
    let strict = u0.iter().enumerate().any(|(i, &u)| {
        let x = -data.h0 + 2.0 * data.h0 * i as f64 / n as f64;
        lower_bound_on_grid(&arch.xs, &arch.vs, x + half_width) > u + TRAP_STRICT_TOL
    });
    Ok(if strict { Some(min_gap.max(0.0)) } else { None })
}

/// Conservative (lower-bound) read of a tabulated profile: the minimum
/// of the two bracketing nodes, zero outside the table.
fn lower_bound_on_grid(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let j = xs.partition_point(|&t| t <= x);
    if j == 0 {
        vs[0]
    } else if j >= xs.len() {
        vs[xs.len() - 1]
    } else {
        vs[j - 1].min(vs[j])
    }
}

/// Build the monotone plateau profile `V~_alpha` as a table
/// `x(v) = int_0^v dv / sqrt(alpha^2 - 2F)`, then slide it over the data.
/// Returns the best shift (and its clearance) under which `u0` fits.
///
/// The table stops at `plateau (1 - 1e-4)`: closer in, `alpha^2 - 2F`
/// is pure cancellation noise and the quadrature cannot converge. The
/// profile is increasing, so beyond the last station its lower bound is
/// simply the top table value; data within 1e-4 of the plateau is not
/// certifiable by this check.
fn trap_under_plateau(
    data: &InitialData,
    nl: &Nonlinearity,
    alpha: f64,
    plateau: f64,
) -> Result<Option<(f64, f64)>> {
    // v-grid uniform through the bulk, geometric toward the plateau
    // where x(v) diverges logarithmically.
    let mut vs = Vec::with_capacity(513);
    let bulk = 256;
    for j in 0..=bulk {
        vs.push(0.9 * plateau * j as f64 / bulk as f64);
    }
    let tail = 256;
    for j in 1..=tail {
        // 1 - v/plateau shrinks from 0.1 down to 1e-4 geometrically.
        let frac = 0.1 * (1e-3_f64).powf(j as f64 / tail as f64);
        vs.push(plateau * (1.0 - frac));
    }
    let mut xs = Vec::with_capacity(vs.len());
    xs.push(0.0);
    let a2 = alpha * alpha;
    let integrand = |v: f64| {
        let pot = nl.potential(v).unwrap_or(f64::NAN);
        1.0 / (a2 - 2.0 * pot).max(f64::MIN_POSITIVE).sqrt()
    };
    for k in 1..vs.len() {
        // Tolerance relative to a rough segment estimate: the integrand
        // grows like 1/(plateau - v) and a fixed absolute target would
        // chase roundoff on the steep segments.
        let rough = (vs[k] - vs[k - 1]) * integrand(0.5 * (vs[k - 1] + vs[k]));
        let seg = quad::integrate(
            &integrand,
            vs[k - 1],
            vs[k],
            (1e-9 * rough).max(1e-13),
        )?;
        xs.push(xs[k - 1] + seg);
    }

    let u0 = data.scaled();
    let n = u0.len() - 1;
    let x_end = *xs.last().expect("nonempty table");
    // At the top shift the whole data window sits past the table end,
    // where the bound saturates at the top table value.
    let b_lo = data.h0;
    let b_hi = x_end + 2.0 * data.h0;
    let mut best: Option<(f64, f64)> = None;
    for s in 0..SHIFT_GRID {
        let b = b_lo + (b_hi - b_lo) * s as f64 / (SHIFT_GRID - 1) as f64;
        let mut min_gap = f64::INFINITY;
        let mut ok = true;
        for (i, &u) in u0.iter().enumerate() {
            let x = -data.h0 + 2.0 * data.h0 * i as f64 / n as f64;
            let v = lower_bound_increasing(&xs, &vs, x + b);
            let gap = v - u;
            if gap < -TRAP_ABS_TOL {
                ok = false;
                break;
            }
            min_gap = min_gap.min(gap);
        }
        if ok && best.map(|(_, m)| min_gap > m).unwrap_or(true) {
            best = Some((b, min_gap.max(0.0)));
        }
    }
    Ok(best)
}

/// Conservative read of an increasing tabulated profile: the left node
/// of the bracketing cell, saturating at the ends.
fn lower_bound_increasing(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x < xs[0] {
        return 0.0;
    }
    if x >= xs[xs.len() - 1] {
        return vs[vs.len() - 1];
    }
    let j = xs.partition_point(|&t| t <= x);
    vs[j.saturating_sub(1)]
}

/// The linear-bound constant for the small-mass condition: the smallest
/// verified `K` with `f(u) <= K u` on the trusted range, seeded by
/// `max(f'(0)+, Lip(f on [0,1]))` and bumped if the grid check finds a
/// violation.
fn linear_bound_constant(nl: &Nonlinearity) -> (f64, Option<String>) {
    let seed = {
        let eps = 1e-7;
        let fp0 = nl.reaction_clamped(eps) / eps;
        let lip = nl.lipschitz_bound(1.0_f64.min(nl.domain_cap())).unwrap_or(0.0);
        fp0.max(0.0).max(lip)
    };
    let cap = nl.domain_cap();
    let mut worst_ratio = 0.0_f64;
    for j in 1..=SCAN_POINTS {
        let u = cap * j as f64 / SCAN_POINTS as f64;
        worst_ratio = worst_ratio.max(nl.reaction_clamped(u) / u);
    }
    if worst_ratio > seed {
        let k = worst_ratio * (1.0 + 1e-12);
        (
            k,
            Some(format!(
                "linear bound constant raised from {seed} to {k} by the grid check"
            )),
        )
    } else {
        (seed.max(f64::MIN_POSITIVE), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(data: &InitialData, nl: &Nonlinearity, alpha: f64) -> Option<Certificate> {
        vanishing_certificate(data, nl, alpha).unwrap()
    }

    #[test]
    fn supercritical_resistance_fires_first() {
        // alpha0 = sqrt(1/3) ~ 0.577 for the logistic with r = 1.
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let data = InitialData::cosine(1.0, 1.0, 200);
        let c = cert(&data, &nl, 0.7).unwrap();
        assert_eq!(c.reason, Reason::AlphaAboveCritical);
        assert!((c.margin - (0.7 - (1.0_f64 / 3.0).sqrt())).abs() < 1e-9);
    }

    #[test]
    fn small_bistable_sup_norm_fires_below_theta() {
        // Wide interval so the arch trap cannot fire first.
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        let data = InitialData::cosine(6.0, 0.2, 400);
        let c = cert(&data, &nl, 0.2).unwrap();
        assert_eq!(c.reason, Reason::BelowTheta);
        assert!((c.margin - 0.05).abs() < 1e-12, "margin {}", c.margin);
    }

    #[test]
    fn data_under_the_arch_fires_the_profile_trap() {
        // ell(0.4) ~ 2.06 > h0 = 1 and the arch peak 0.487 clears 0.2.
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let data = InitialData::cosine(1.0, 0.2, 200);
        let c = cert(&data, &nl, 0.4).unwrap();
        assert_eq!(c.reason, Reason::BelowStationaryProfile);
        assert!(c.margin > 0.0);
    }

    #[test]
    fn large_data_gets_no_certificate() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let data = InitialData::cosine(1.0, 3.0, 200);
        assert_eq!(cert(&data, &nl, 0.4), None);
    }

    #[test]
    fn spiked_bistable_data_fires_small_mass() {
        // Sup norm 0.75 beats theta and pokes through the arch peak
        // (~0.68 at alpha = 0.2), but the mass is far under the budget
        // theta sqrt(2 pi / (e K)) ~ 0.439 with K = 0.75.
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        let n = 400;
        let phi: Vec<f64> = (0..=n)
            .map(|i| {
                let x: f64 = -1.0 + 2.0 * i as f64 / n as f64;
                let c = (std::f64::consts::FRAC_PI_2 * x).cos();
                0.05 * c + 0.95 * c.powi(32)
            })
            .collect();
        let data = InitialData::from_samples(1.0, 0.75, phi).unwrap();
        assert!(data.sup_norm() > 0.25);
        let c = cert(&data, &nl, 0.2).unwrap();
        assert_eq!(c.reason, Reason::SmallMass);
        assert!(c.margin > 0.1, "margin {}", c.margin);
    }

    #[test]
    fn critical_plateau_with_small_data_fires_the_plateau_trap() {
        // At alpha = alpha0 the logistic potential level is attained at
        // v = 1, so the stationary picture is the monotone plateau.
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let sc = phase_plane::classify_stationary(&nl, (1.0_f64 / 3.0).sqrt()).unwrap();
        let alpha0 = sc.critical_alpha;
        let data = InitialData::cosine(1.0, 0.1, 200);
        let c = cert(&data, &nl, alpha0).unwrap();
        match c.reason {
            Reason::BelowPlateauProfile { shift_b } => {
                assert!(shift_b >= 1.0, "shift {shift_b}");
                assert!(c.margin > 0.0);
            }
            other => panic!("expected the plateau trap, got {other:?}"),
        }
    }

    #[test]
    fn critical_alpha_with_unattained_sup_fires_the_gap_condition() {
        // f = u e^{-u}: F climbs to its sup at the cap, so at the
        // critical resistance the level 2F stays strictly below alpha0^2
        // on the interior.
        let nodes: Vec<crate::nonlinearity::HermiteNode> = (0..=50)
            .map(|j| {
                let u = 5.0 * j as f64 / 50.0;
                crate::nonlinearity::HermiteNode {
                    u,
                    f: u * (-u).exp(),
                    fp: (1.0 - u) * (-u).exp(),
                }
            })
            .collect();
        let nl = Nonlinearity::tabulated(nodes).unwrap();
        let sc = phase_plane::classify_stationary(&nl, 0.5).unwrap();
        assert!(sc.sup_at_cap);
        let alpha0 = sc.critical_alpha;
        let data = InitialData::cosine(1.0, 0.5, 200);
        let c = cert(&data, &nl, alpha0).unwrap();
        assert_eq!(c.reason, Reason::AlphaCriticalStrictGap);
        assert!(c.margin > 0.0);
    }
}
