//! Stationary structure of the boundary-resistance problem.
//!
//! A stationary profile with resistance `alpha` solves `v'' + f(v) = 0`
//! with `v(0) = 0`, `v'(0) = alpha`, which integrates once to
//!
//! ```text
//! (v')² = alpha² - 2 F(v),      F(u) = ∫₀ᵘ f
//! ```
//!
//! Everything here is quadrature on that first integral. With
//! `alpha0² = 2 sup F` three regimes appear:
//!
//! * `alpha < alpha0` with a transversal crossing of `2F = alpha²` at
//!   `B`: a compactly supported arch of height `B` and half-width
//!   `ell = ∫₀ᴮ dr / sqrt(alpha² - 2F(r))`;
//! * a tangential crossing (or a logarithmically divergent half-width):
//!   a monotone plateau profile creeping up to `B`;
//! * no crossing at all: the orbit blows up at a finite station.

use crate::error::{CoreError, Result};
use crate::extended::ExtendedReal;
use crate::nonlinearity::Nonlinearity;
use crate::quad;
use serde::{Deserialize, Serialize};

/// Absolute scan step in `v` for locating energy-level crossings.
const SCAN_STEP: f64 = 1e-3;
/// Relative bisection tolerance on the crossing location.
const CROSSING_RTOL: f64 = 1e-12;
/// Absolute quadrature tolerance for half-width integrals.
const QUAD_TOL: f64 = 1e-9;
/// Fraction of `[0, B]` handled by the `r = B - s²` substitution.
const TAIL_FRACTION: f64 = 0.1;
/// Minimum per-halving shrink factor of the tail integral below which the
/// half-width is declared divergent.
const TAIL_SHRINK: f64 = 1.2;
const TAIL_HALVINGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum StationaryCase {
    /// Compact arch: height `peak`, support `[0, 2 half_width]`.
    CompactSupport { peak: f64, half_width: f64 },
    /// Monotone profile increasing to `plateau` at infinity.
    InfinitePlateau { plateau: f64 },
    /// Orbit escapes upward; `blowup_width` is the station where it leaves
    /// the trusted range (infinite when it stalls instead).
    Unbounded { blowup_width: ExtendedReal },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationaryClass {
    pub alpha: f64,
    /// `alpha0 = sqrt(2 sup F)`, zero when the potential never goes positive.
    pub critical_alpha: f64,
    pub case: StationaryCase,
    /// Whether `sup F > 0` holds on the trusted range.
    pub cond3_holds: bool,
    /// The sup of `F` sits on the domain cap: the classification only
    /// reflects the truncated reaction.
    pub sup_at_cap: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryProfile {
    pub alpha: f64,
    pub peak: f64,
    pub half_width: f64,
    /// `n + 1` uniform stations on `[0, 2 half_width]`.
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
}

/// `alpha0 = sqrt(2 sup F)` over the trusted range; 0 if `F ≤ 0` throughout.
pub fn critical_alpha(nl: &Nonlinearity) -> f64 {
    (2.0 * nl.sup_potential().value).max(0.0).sqrt()
}

/// Smallest `v > 0` with `2 F(v) = alpha²`, if one exists in the trusted
/// range. Transversal crossings come from a sign-change scan refined by
/// bisection; tangential touches at interior maxima of `F` are tested
/// separately so that the critical case is not missed.
pub fn first_crossing(nl: &Nonlinearity, alpha: f64) -> Result<Option<f64>> {
    check_alpha(alpha)?;
    let cap = nl.domain_cap();
    let level = alpha * alpha;
    let gap = |v: f64| level - 2.0 * nl.reaction_clamped_potential(v);

    let mut candidates: Vec<f64> = Vec::new();

    // Sign-change scan.
    let steps = (cap / SCAN_STEP).ceil() as usize;
    let mut prev_v = 0.0;
    let mut prev_g = gap(0.0);
    for j in 1..=steps {
        let v = cap * j as f64 / steps as f64;
        let g = gap(v);
        if prev_g > 0.0 && g <= 0.0 {
            candidates.push(bisect_crossing(&gap, prev_v, v));
            break;
        }
        prev_v = v;
        prev_g = g;
    }

    // Tangential touches at local maxima of F (zeros of f with f going
    // + → -), plus the cap itself when F is still rising there.
    let touch_tol = 1e-11 * level.max(1.0);
    for vm in local_potential_maxima(nl) {
        if vm > 0.0 && gap(vm) <= touch_tol {
            candidates.push(vm);
        }
    }

    Ok(candidates
        .into_iter()
        .filter(|b| *b > 0.0)
        .min_by(|a, b| a.partial_cmp(b).unwrap()))
}

/// Half-width `ell = ∫₀ᴮ dr / sqrt(alpha² - 2F(r))` of the stationary arch,
/// or `Infinite` when the integral diverges (plateau case).
pub fn half_width(nl: &Nonlinearity, alpha: f64) -> Result<ExtendedReal> {
    check_alpha(alpha)?;
    let b = first_crossing(nl, alpha)?.ok_or_else(|| {
        CoreError::Precondition(format!(
            "no stationary arch: 2F never reaches alpha² = {}",
            alpha * alpha
        ))
    })?;
    half_width_at(nl, alpha, b)
}

pub(crate) fn half_width_at(nl: &Nonlinearity, alpha: f64, b: f64) -> Result<ExtendedReal> {
    let fb = nl.reaction_clamped(b);
    let f_scale = nl.lipschitz_bound(b)? * b;
    if fb <= 1e-7 * f_scale.max(1e-3) {
        // The crossing is (nearly) tangential; probe whether the endpoint
        // integral still converges.
        if tail_diverges(nl, alpha, b)? {
            return Ok(ExtendedReal::Infinite);
        }
    }
    let level = alpha * alpha;
    let body_end = b * (1.0 - TAIL_FRACTION);
    let body = quad::integrate(
        &|r: f64| (level - 2.0 * nl.reaction_clamped_potential(r)).sqrt().recip(),
        0.0,
        body_end,
        0.5 * QUAD_TOL,
    )?;
    let tail = tail_integral(nl, alpha, b, b - body_end, 0.5 * QUAD_TOL)?;
    Ok(ExtendedReal::Finite(body + tail))
}

/// `∫_{B-delta}^{B} dr / sqrt(alpha² - 2F)` via `r = B - s²`, which removes
/// the square-root endpoint singularity.
fn tail_integral(nl: &Nonlinearity, alpha: f64, b: f64, delta: f64, tol: f64) -> Result<f64> {
    let level = alpha * alpha;
    let fb = nl.reaction_clamped(b).max(1e-300);
    // Near s = 0 the difference alpha² - 2F(B - s²) is tiny and one ulp of
    // the potential is a large *relative* jump in the integrand, which
    // stalls adaptive Simpson (its acceptance threshold shrinks with the
    // interval while quantization noise per unit length does not). Keep
    // the quadrature where the gap clears a roundoff-safe floor and cover
    // [0, s_safe] with the series of the exact local model
    //   gap = 2 f(B) s² - f'(B) s⁴ + O(s⁶),
    // whose integral is limit·(s + f'(B)/(12 f(B)) s³ + O(s⁵)).
    let gap_floor = 1e-7 * (1.0 + level);
    let s_safe = (gap_floor / (2.0 * fb)).sqrt();
    let limit = (2.0 / fb).sqrt();
    let s_hi = delta.sqrt();
    let dh = 1e-5 * (1.0 + b);
    let fp_b = (nl.reaction_clamped(b + dh) - nl.reaction_clamped(b - dh)) / (2.0 * dh);
    let head = |sigma: f64| limit * (sigma + fp_b / (12.0 * fb) * sigma.powi(3));
    if s_hi <= s_safe {
        return Ok(head(s_hi));
    }
    let integrand = |s: f64| {
        let gap = level - 2.0 * nl.reaction_clamped_potential(b - s * s);
        if gap > 0.0 {
            2.0 * s / gap.sqrt()
        } else {
            limit
        }
    };
    Ok(head(s_safe) + quad::integrate(&integrand, s_safe, s_hi, tol)?)
}

/// Divergence probe: successive halvings of `delta` must shrink the tail
/// integral over `[B-delta, B-delta/2]` geometrically for the half-width to
/// be finite. A square-root endpoint shrinks by `sqrt(2)` per halving, a
/// logarithmic one not at all.
fn tail_diverges(nl: &Nonlinearity, alpha: f64, b: f64) -> Result<bool> {
    let level = alpha * alpha;
    let piece = |delta: f64| -> Result<f64> {
        quad::integrate(
            &|r: f64| (level - 2.0 * nl.reaction_clamped_potential(r)).sqrt().recip(),
            b - delta,
            b - 0.5 * delta,
            1e-13,
        )
    };
    let mut delta = TAIL_FRACTION * b;
    let mut prev = piece(delta)?;
    for _ in 0..TAIL_HALVINGS {
        delta *= 0.5;
        let next = piece(delta)?;
        if !(next > 0.0) || prev / next < TAIL_SHRINK {
            return Ok(true);
        }
        prev = next;
    }
    Ok(false)
}

/// Full trichotomy for a given resistance.
pub fn classify_stationary(nl: &Nonlinearity, alpha: f64) -> Result<StationaryClass> {
    check_alpha(alpha)?;
    let sup = nl.sup_potential();
    let cond3_holds = sup.value > 0.0;
    let critical_alpha = (2.0 * sup.value).max(0.0).sqrt();

    let case = match first_crossing(nl, alpha)? {
        Some(b) => match half_width_at(nl, alpha, b)? {
            ExtendedReal::Finite(ell) => StationaryCase::CompactSupport {
                peak: b,
                half_width: ell,
            },
            ExtendedReal::Infinite => StationaryCase::InfinitePlateau { plateau: b },
        },
        None => StationaryCase::Unbounded {
            blowup_width: blowup_width(nl, alpha)?,
        },
    };

    Ok(StationaryClass {
        alpha,
        critical_alpha,
        case,
        cond3_holds,
        sup_at_cap: sup.at_cap,
    })
}

/// Station at which the unbounded orbit exits the trusted range:
/// `∫₀^cap dr / sqrt(alpha² - 2F(r))` (a lower bound for the true blow-up
/// location, which lives beyond the cap).
fn blowup_width(nl: &Nonlinearity, alpha: f64) -> Result<ExtendedReal> {
    let level = alpha * alpha;
    let cap = nl.domain_cap();
    // No crossing means the gap is positive on [0, cap]; if it pinches to
    // ~0 at the cap the integral is effectively divergent there.
    let gap_cap = level - 2.0 * nl.reaction_clamped_potential(cap);
    if gap_cap <= 1e-11 * level.max(1.0) {
        return Ok(ExtendedReal::Infinite);
    }
    let v = quad::integrate(
        &|r: f64| (level - 2.0 * nl.reaction_clamped_potential(r)).sqrt().recip(),
        0.0,
        cap,
        QUAD_TOL,
    )?;
    Ok(ExtendedReal::Finite(v))
}

/// Sample the compactly supported stationary profile on `n + 1` uniform
/// stations covering `[0, 2 ell]`, by inverting the quadrature map
/// `x(v) = ∫₀ᵛ dr / sqrt(alpha² - 2F)` on the left half and mirroring.
pub fn profile(nl: &Nonlinearity, alpha: f64, n: usize) -> Result<StationaryProfile> {
    if n < 2 {
        return Err(CoreError::Validation(
            "profile needs at least two intervals".into(),
        ));
    }
    let class = classify_stationary(nl, alpha)?;
    let (peak, half_width) = match class.case {
        StationaryCase::CompactSupport { peak, half_width } => (peak, half_width),
        other => {
            return Err(CoreError::Precondition(format!(
                "profile exists only in the compact-support case, got {other:?}"
            )))
        }
    };

    let level = alpha * alpha;
    let body_end = peak * (1.0 - TAIL_FRACTION);
    // x(v), assembled from the smooth body and the substituted tail.
    let station = |v: f64| -> Result<f64> {
        if v <= body_end {
            quad::integrate(
                &|r: f64| (level - 2.0 * nl.reaction_clamped_potential(r)).sqrt().recip(),
                0.0,
                v,
                0.1 * QUAD_TOL,
            )
        } else {
            let tail_all = tail_integral(nl, alpha, peak, peak - body_end, 0.05 * QUAD_TOL)?;
            let tail_beyond_v = if v < peak {
                tail_integral(nl, alpha, peak, peak - v, 0.05 * QUAD_TOL)?
            } else {
                0.0
            };
            let body = quad::integrate(
                &|r: f64| (level - 2.0 * nl.reaction_clamped_potential(r)).sqrt().recip(),
                0.0,
                body_end,
                0.1 * QUAD_TOL,
            )?;
            Ok(body + tail_all - tail_beyond_v)
        }
    };

    let mut xs = Vec::with_capacity(n + 1);
    let mut vs = vec![0.0; n + 1];
    for i in 0..=n {
        xs.push(2.0 * half_width * i as f64 / n as f64);
    }
    for i in 0..=n / 2 {
        let x = xs[i];
        vs[i] = if i == 0 {
            0.0
        } else {
            invert_station(&station, x, peak, half_width)?
        };
    }
    for i in n / 2 + 1..=n {
        vs[i] = vs[n - i];
    }

    Ok(StationaryProfile {
        alpha,
        peak,
        half_width,
        xs,
        vs,
    })
}

/// Bisection solve of `station(v) = x` for `v ∈ [0, peak]`.
fn invert_station<S: Fn(f64) -> Result<f64>>(
    station: &S,
    x: f64,
    peak: f64,
    half_width: f64,
) -> Result<f64> {
    if x >= half_width {
        return Ok(peak);
    }
    let mut lo = 0.0;
    let mut hi = peak;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if station(mid)? < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(CoreError::Validation(format!(
            "resistance must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// Interior local maxima of `F` (zeros of `f` crossing + → -), plus the cap
/// when `F` is still rising into it.
fn local_potential_maxima(nl: &Nonlinearity) -> Vec<f64> {
    let cap = nl.domain_cap();
    let steps = (cap / SCAN_STEP).ceil() as usize;
    let mut out = Vec::new();
    let mut prev_v = 0.0;
    let mut prev_f = 0.0;
    for j in 1..=steps {
        let v = cap * j as f64 / steps as f64;
        let fv = nl.reaction_clamped(v);
        if prev_f > 0.0 && fv <= 0.0 {
            let mut lo = prev_v;
            let mut hi = v;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if nl.reaction_clamped(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev_v = v;
        prev_f = fv;
    }
    if prev_f > 0.0 {
        out.push(cap);
    }
    out
}

fn bisect_crossing<G: Fn(f64) -> f64>(gap: &G, mut lo: f64, mut hi: f64) -> f64 {
    // gap(lo) > 0 ≥ gap(hi)
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || (hi - lo) < CROSSING_RTOL * hi.abs() {
            return 0.5 * (lo + hi);
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

impl Nonlinearity {
    /// Potential evaluated with the argument clamped to the trusted range;
    /// quadrature abscissae can graze the boundary by rounding.
    pub(crate) fn reaction_clamped_potential(&self, u: f64) -> f64 {
        match self.potential(u.clamp(0.0, self.domain_cap())) {
            Ok(v) => v,
            Err(_) => f64::NAN,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_alpha_logistic() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert!((critical_alpha(&nl) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn critical_alpha_bistable() {
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        assert!((critical_alpha(&nl) - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn crossing_satisfies_energy_level() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let alpha = 0.4;
        let b = first_crossing(&nl, alpha).unwrap().unwrap();
        assert!(b > 0.0 && b < 1.0);
        let res = alpha * alpha - 2.0 * nl.potential(b).unwrap();
        assert!(res.abs() < 1e-11, "energy residual {res}");
    }

    #[test]
    fn no_crossing_above_critical() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert!(first_crossing(&nl, 0.6).unwrap().is_none());
    }

    #[test]
    fn tangential_touch_at_critical() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let a0 = critical_alpha(&nl);
        let b = first_crossing(&nl, a0).unwrap().unwrap();
        assert!((b - 1.0).abs() < 1e-6, "touch should be at the peak, got {b}");
        let hw = half_width_at(&nl, a0, b).unwrap();
        assert_eq!(hw, ExtendedReal::Infinite);
    }

    #[test]
    fn classify_compact_support() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let class = classify_stationary(&nl, 0.4).unwrap();
        assert!(class.cond3_holds);
        match class.case {
            StationaryCase::CompactSupport { peak, half_width } => {
                assert!(peak > 0.0 && peak < 1.0);
                // F ≥ 0 here, so the integrand is ≥ 1/alpha pointwise.
                assert!(half_width > peak / 0.4);
            }
            other => panic!("expected compact support, got {other:?}"),
        }
    }

    #[test]
    fn classify_unbounded_above_critical() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let class = classify_stationary(&nl, 0.8).unwrap();
        match class.case {
            StationaryCase::Unbounded { blowup_width } => {
                let w = blowup_width.unwrap_finite();
                assert!(w > 0.0 && w < 5.0 / 0.8);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn zero_reaction_is_unbounded_with_linear_orbit() {
        // f ≡ 0 fails cond3: v(x) = alpha x exits the cap at cap/alpha.
        let nl = Nonlinearity::zero();
        let class = classify_stationary(&nl, 0.5).unwrap();
        assert!(!class.cond3_holds);
        assert_eq!(class.critical_alpha, 0.0);
        match class.case {
            StationaryCase::Unbounded { blowup_width } => {
                assert!((blowup_width.unwrap_finite() - 10.0).abs() < 1e-7);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn bistable_critical_is_plateau() {
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        let a0 = critical_alpha(&nl);
        let class = classify_stationary(&nl, a0).unwrap();
        match class.case {
            StationaryCase::InfinitePlateau { plateau } => {
                assert!((plateau - 1.0).abs() < 1e-6);
            }
            other => panic!("expected plateau, got {other:?}"),
        }
    }

    #[test]
    fn profile_shape_invariants() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let alpha = 0.4;
        let p = profile(&nl, alpha, 200).unwrap();
        assert_eq!(p.vs.len(), 201);
        assert_eq!(p.vs[0], 0.0);
        assert_eq!(p.vs[200], 0.0);
        // Exact mirror symmetry by construction.
        for i in 0..=200 {
            assert_eq!(p.vs[i], p.vs[200 - i]);
        }
        // Peak at the centre.
        assert!((p.vs[100] - p.peak).abs() < 1e-9);
        // Monotone up to the peak.
        for i in 0..100 {
            assert!(p.vs[i + 1] >= p.vs[i]);
        }
        // First integral holds at interior stations (centered differences).
        let dx = p.xs[1] - p.xs[0];
        for i in 1..100 {
            let vp = (p.vs[i + 1] - p.vs[i - 1]) / (2.0 * dx);
            let res = vp * vp + 2.0 * nl.potential(p.vs[i]).unwrap() - alpha * alpha;
            assert!(res.abs() < 5e-4, "first-integral residual {res} at {i}");
        }
        // Boundary slope recovers alpha.
        let slope = (-3.0 * p.vs[0] + 4.0 * p.vs[1] - p.vs[2]) / (2.0 * dx);
        assert!((slope - alpha).abs() < 5e-4 * alpha.max(1.0));
    }

    #[test]
    fn profile_refuses_non_compact_cases() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert!(profile(&nl, 0.8, 100).is_err());
    }
}
