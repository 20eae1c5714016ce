//! Reaction terms `f(u)` and their primitives.
//!
//! Every nonlinearity carries a trusted evaluation range `[0, domain_cap]`;
//! evaluation outside it is a domain error rather than a silent
//! extrapolation. The built-in polynomial kinds use closed forms for
//! `f`, `f'` and `F(u) = ∫₀ᵘ f(s) ds`; the tabulated kind interpolates
//! `(u, f, f')` nodes with cubic Hermite segments and integrates those
//! segments exactly.

use crate::error::{CoreError, Result};

pub const DEFAULT_DOMAIN_CAP: f64 = 5.0;

/// Number of grid points used by the shape classification scan.
const CLASSIFY_GRID: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `r u (1 - u)` with `r > 0`.
    Logistic { r: f64 },
    /// `u (u - theta) (1 - u)` with `0 < theta < 1`.
    CubicBistable { theta: f64 },
    /// Cubic Hermite interpolation of `(u, f, f')` nodes.
    TabulatedC1 { nodes: Vec<HermiteNode> },
    /// `f ≡ 0` (pure diffusion).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HermiteNode {
    pub u: f64,
    pub f: f64,
    pub fp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: Kind,
    domain_cap: f64,
    /// Cumulative integral of `f` at tabulated nodes; empty otherwise.
    node_integrals: Vec<f64>,
}

/// Shape classification against the two reference reaction classes.
///
/// This is a semi-decision on a sample grid: `Monostable` and `Bistable`
/// answers are reliable for reactions that actually belong to the class,
/// while anything ambiguous falls through to `Other`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReactionClass {
    Monostable,
    Bistable { theta: f64 },
    Other,
}

/// Supremum of `F` over `(0, domain_cap]` plus where it was found.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSup {
    pub value: f64,
    pub argmax: f64,
    /// Set when the maximiser sits at the cap, i.e. the reported sup is
    /// only a truncation of whatever `F` does beyond the trusted range.
    pub at_cap: bool,
}

impl Nonlinearity {
    pub fn logistic(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(CoreError::Validation(format!(
                "logistic growth rate must be positive and finite, got {r}"
            )));
        }
        Ok(Self {
            kind: Kind::Logistic { r },
            domain_cap: DEFAULT_DOMAIN_CAP,
            node_integrals: Vec::new(),
        })
    }

    pub fn cubic_bistable(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(CoreError::Validation(format!(
                "bistable threshold must lie in (0, 1), got {theta}"
            )));
        }
        Ok(Self {
            kind: Kind::CubicBistable { theta },
            domain_cap: DEFAULT_DOMAIN_CAP,
            node_integrals: Vec::new(),
        })
    }

    pub fn zero() -> Self {
        Self {
            kind: Kind::Zero,
            domain_cap: DEFAULT_DOMAIN_CAP,
            node_integrals: Vec::new(),
        }
    }

    /// Tabulated reaction. Nodes must start at `u = 0` with `f(0) = 0`,
    /// have strictly increasing `u`, and the trusted range becomes
    /// `[0, last node]`.
    pub fn tabulated(nodes: Vec<HermiteNode>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(CoreError::Validation(
                "tabulated reaction needs at least two nodes".into(),
            ));
        }
        if nodes[0].u != 0.0 || nodes[0].f != 0.0 {
            return Err(CoreError::Validation(
                "tabulated reaction must start at u = 0 with f(0) = 0".into(),
            ));
        }
        for w in nodes.windows(2) {
            if !(w[1].u > w[0].u) {
                return Err(CoreError::Validation(
                    "tabulated nodes must have strictly increasing u".into(),
                ));
            }
        }
        if nodes
            .iter()
            .any(|n| !(n.u.is_finite() && n.f.is_finite() && n.fp.is_finite()))
        {
            return Err(CoreError::Validation(
                "tabulated nodes must be finite".into(),
            ));
        }
        let domain_cap = nodes.last().unwrap().u;
        let node_integrals = cumulative_integrals(&nodes);
        Ok(Self {
            kind: Kind::TabulatedC1 { nodes },
            domain_cap,
            node_integrals,
        })
    }

    /// Override the trusted range. For tabulated reactions the cap cannot
    /// exceed the node coverage.
    pub fn with_domain_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(CoreError::Validation(format!(
                "domain cap must be positive and finite, got {cap}"
            )));
        }
        if let Kind::TabulatedC1 { nodes } = &self.kind {
            let coverage = nodes.last().unwrap().u;
            if cap > coverage * (1.0 + 1e-12) {
                return Err(CoreError::Validation(format!(
                    "domain cap {cap} exceeds tabulated coverage {coverage}"
                )));
            }
        }
        self.domain_cap = cap;
        Ok(self)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn domain_cap(&self) -> f64 {
        self.domain_cap
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if !u.is_finite() {
            return Err(CoreError::Domain(format!("argument {u} is not finite")));
        }
        if u < 0.0 || u > self.domain_cap {
            return Err(CoreError::Domain(format!(
                "argument {u} outside trusted range [0, {}]",
                self.domain_cap
            )));
        }
        Ok(())
    }

    /// `f(u)`.
    pub fn reaction(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.reaction_raw(u))
    }

    /// `f'(u)`.
    pub fn reaction_prime(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.reaction_prime_raw(u))
    }

    /// `F(u) = ∫₀ᵘ f(s) ds`.
    pub fn potential(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.potential_raw(u))
    }

    /// `f` evaluated at the nearest trusted point. The PDE right-hand side
    /// uses this so that rounding-level undershoots below zero do not abort
    /// a run; anything further out is caught by the solver's own monitors.
    pub fn reaction_clamped(&self, u: f64) -> f64 {
        self.reaction_raw(u.clamp(0.0, self.domain_cap))
    }

    fn reaction_raw(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { r } => r * u * (1.0 - u),
            Kind::CubicBistable { theta } => u * (u - theta) * (1.0 - u),
            Kind::Zero => 0.0,
            Kind::TabulatedC1 { nodes } => {
                let (i, t, h) = locate(nodes, u);
                let a = &nodes[i];
                let b = &nodes[i + 1];
                let t2 = t * t;
                let t3 = t2 * t;
                a.f * (2.0 * t3 - 3.0 * t2 + 1.0)
                    + h * a.fp * (t3 - 2.0 * t2 + t)
                    + b.f * (-2.0 * t3 + 3.0 * t2)
                    + h * b.fp * (t3 - t2)
            }
        }
    }

    fn reaction_prime_raw(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { r } => r * (1.0 - 2.0 * u),
            Kind::CubicBistable { theta } => {
                -3.0 * u * u + 2.0 * (1.0 + theta) * u - theta
            }
            Kind::Zero => 0.0,
            Kind::TabulatedC1 { nodes } => {
                let (i, t, h) = locate(nodes, u);
                let a = &nodes[i];
                let b = &nodes[i + 1];
                let t2 = t * t;
                (a.f * (6.0 * t2 - 6.0 * t)
                    + h * a.fp * (3.0 * t2 - 4.0 * t + 1.0)
                    + b.f * (-6.0 * t2 + 6.0 * t)
                    + h * b.fp * (3.0 * t2 - 2.0 * t))
                    / h
            }
        }
    }

    fn potential_raw(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Logistic { r } => r * u * u * (0.5 - u / 3.0),
            Kind::CubicBistable { theta } => {
                // ∫ s(s-θ)(1-s) ds = -u⁴/4 + (1+θ)u³/3 - θu²/2
                u * u * (-0.25 * u * u + (1.0 + theta) * u / 3.0 - 0.5 * theta)
            }
            Kind::Zero => 0.0,
            Kind::TabulatedC1 { nodes } => {
                let (i, t, h) = locate(nodes, u);
                self.node_integrals[i] + segment_partial_integral(&nodes[i], &nodes[i + 1], h, t)
            }
        }
    }

    /// `max |f'|` over `[0, min(hi, domain_cap)]`.
    ///
    /// Exact for the polynomial kinds; for tabulated reactions the
    /// derivative is piecewise quadratic, so each segment maximum is also
    /// closed-form.
    pub fn lipschitz_bound(&self, hi: f64) -> Result<f64> {
        if !(hi >= 0.0) {
            return Err(CoreError::Validation(format!(
                "lipschitz bound needs a nonnegative upper limit, got {hi}"
            )));
        }
        let m = hi.min(self.domain_cap);
        Ok(match &self.kind {
            Kind::Zero => 0.0,
            Kind::Logistic { r } => {
                // f' = r(1 - 2u) is monotone: endpoints suffice.
                (r * 1.0f64).abs().max((r * (1.0 - 2.0 * m)).abs())
            }
            Kind::CubicBistable { theta } => {
                let mut best = self.reaction_prime_raw(0.0).abs().max(
                    self.reaction_prime_raw(m).abs(),
                );
                let crit = (1.0 + theta) / 3.0;
                if crit > 0.0 && crit < m {
                    best = best.max(self.reaction_prime_raw(crit).abs());
                }
                best
            }
            Kind::TabulatedC1 { nodes } => {
                let mut best: f64 = 0.0;
                for i in 0..nodes.len() - 1 {
                    let (ua, ub) = (nodes[i].u, nodes[i + 1].u);
                    if ua >= m {
                        break;
                    }
                    let hi_u = ub.min(m);
                    best = best.max(self.reaction_prime_raw(ua).abs());
                    best = best.max(self.reaction_prime_raw(hi_u).abs());
                    // f' is quadratic in t on the segment; check its vertex.
                    let a = &nodes[i];
                    let b = &nodes[i + 1];
                    let h = ub - ua;
                    // f'(t)·h = A t² + B t + C with
                    let qa = 6.0 * (a.f - b.f) + 3.0 * h * (a.fp + b.fp);
                    let qb = 6.0 * (b.f - a.f) - h * (4.0 * a.fp + 2.0 * b.fp);
                    if qa.abs() > 0.0 {
                        let tv = -qb / (2.0 * qa);
                        let uv = ua + tv * h;
                        if tv > 0.0 && tv < 1.0 && uv < m {
                            best = best.max(self.reaction_prime_raw(uv).abs());
                        }
                    }
                }
                best
            }
        })
    }

    /// Supremum of `F` over `(0, domain_cap]`. `F(0) = 0` is the floor, so
    /// the returned value is never negative.
    pub fn sup_potential(&self) -> PotentialSup {
        match &self.kind {
            Kind::Zero => PotentialSup {
                value: 0.0,
                argmax: 0.0,
                at_cap: false,
            },
            Kind::Logistic { .. } => {
                // F increases to u = 1 then decreases.
                let top = 1.0f64.min(self.domain_cap);
                PotentialSup {
                    value: self.potential_raw(top).max(0.0),
                    argmax: top,
                    at_cap: self.domain_cap < 1.0,
                }
            }
            Kind::CubicBistable { .. } => {
                // Local maxima of F at u = 0 and u = 1.
                let top = 1.0f64.min(self.domain_cap);
                let v = self.potential_raw(top);
                if v > 0.0 {
                    PotentialSup {
                        value: v,
                        argmax: top,
                        at_cap: self.domain_cap < 1.0,
                    }
                } else {
                    PotentialSup {
                        value: 0.0,
                        argmax: 0.0,
                        at_cap: false,
                    }
                }
            }
            Kind::TabulatedC1 { nodes } => {
                // F' = f, so maximisers are zeros of f or the cap. Scan the
                // node grid plus segment-interior stationary points.
                let mut best = PotentialSup {
                    value: 0.0,
                    argmax: 0.0,
                    at_cap: false,
                };
                let mut consider = |u: f64, this: &Self| {
                    if u > 0.0 && u <= this.domain_cap {
                        let v = this.potential_raw(u);
                        if v > best.value {
                            best.value = v;
                            best.argmax = u;
                        }
                    }
                };
                for i in 0..nodes.len() {
                    consider(nodes[i].u.min(self.domain_cap), self);
                }
                consider(self.domain_cap, self);
                // Refine: f sign changes (+ → -) bracket interior maxima.
                let m = self.domain_cap;
                let steps = 4096;
                let mut prev_u = 0.0;
                let mut prev_f = 0.0;
                for j in 1..=steps {
                    let u = m * j as f64 / steps as f64;
                    let fv = self.reaction_raw(u);
                    if prev_f > 0.0 && fv <= 0.0 {
                        let z = bisect_zero(|x| self.reaction_raw(x), prev_u, u);
                        consider(z, self);
                    }
                    prev_u = u;
                    prev_f = fv;
                }
                best.at_cap = (best.argmax - self.domain_cap).abs() < 1e-12 * self.domain_cap;
                best
            }
        }
    }

    /// Largest zero of `f` in `(0, domain_cap]` with a sign change from
    /// positive to negative (the stable upper equilibrium), if any.
    pub fn upper_zero(&self) -> Option<f64> {
        match &self.kind {
            Kind::Zero => None,
            Kind::Logistic { .. } | Kind::CubicBistable { .. } => {
                if self.domain_cap >= 1.0 {
                    Some(1.0)
                } else {
                    None
                }
            }
            Kind::TabulatedC1 { .. } => {
                let m = self.domain_cap;
                let steps = CLASSIFY_GRID;
                let mut found = None;
                let mut prev_u = 0.0;
                let mut prev_f = 0.0;
                for j in 1..=steps {
                    let u = m * j as f64 / steps as f64;
                    let fv = self.reaction_raw(u);
                    if prev_f > 0.0 && fv < 0.0 {
                        found = Some(bisect_zero(|x| self.reaction_raw(x), prev_u, u));
                    }
                    prev_u = u;
                    prev_f = fv;
                }
                found
            }
        }
    }

    /// Grid-based shape classification; see [`ReactionClass`].
    ///
    /// The sampled signs of `f` are collapsed into a word: monostable
    /// reactions read `+-` with the sign change at `u = 1`, bistable ones
    /// read `-+-` with changes at `theta` and `1`.
    pub fn classify(&self) -> ReactionClass {
        if matches!(self.kind, Kind::Zero) {
            return ReactionClass::Other;
        }
        let cap = self.domain_cap;
        if cap <= 1.0 {
            // Both reference classes are defined by behaviour around u = 1.
            return ReactionClass::Other;
        }
        let scale = (0..=CLASSIFY_GRID)
            .map(|j| self.reaction_raw(cap * j as f64 / CLASSIFY_GRID as f64).abs())
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return ReactionClass::Other;
        }
        let tol = 1e-9 * scale;
        // f must vanish at 1 for either class.
        if self.reaction_raw(1.0).abs() > tol {
            return ReactionClass::Other;
        }
        let fp0 = self.reaction_prime_raw(0.0);
        let fp1 = self.reaction_prime_raw(1.0);
        if !(fp1 < 0.0) {
            return ReactionClass::Other;
        }

        // Collapsed sign word with run extents; samples with |f| ≤ tol are
        // treated as belonging to whatever run they sit in.
        let mut word: Vec<(i8, f64, f64)> = Vec::new();
        for j in 1..=CLASSIFY_GRID {
            let u = cap * j as f64 / CLASSIFY_GRID as f64;
            let fv = self.reaction_raw(u);
            let s: i8 = if fv > tol {
                1
            } else if fv < -tol {
                -1
            } else {
                continue;
            };
            match word.last_mut() {
                Some((c, _, last)) if *c == s => *last = u,
                _ => word.push((s, u, u)),
            }
        }
        let guard = 4.0 * cap / CLASSIFY_GRID as f64;
        let spans_one = |left: &(i8, f64, f64), right: &(i8, f64, f64)| {
            left.2 < 1.0 + guard && right.1 > 1.0 - guard
        };

        match word.as_slice() {
            [pos, neg] if pos.0 == 1 && neg.0 == -1 && fp0 > 0.0 && spans_one(pos, neg) => {
                ReactionClass::Monostable
            }
            [neg1, pos, neg2]
                if neg1.0 == -1
                    && pos.0 == 1
                    && neg2.0 == -1
                    && fp0 < 0.0
                    && spans_one(pos, neg2)
                    && pos.1 < 1.0 - guard
                    && self.potential_raw(1.0) > 0.0 =>
            {
                let theta = bisect_zero(|x| self.reaction_raw(x), neg1.2, pos.1);
                ReactionClass::Bistable { theta }
            }
            _ => ReactionClass::Other,
        }
    }
}

/// Locate the Hermite segment containing `u`; returns (index, local t, h).
fn locate(nodes: &[HermiteNode], u: f64) -> (usize, f64, f64) {
    let i = match nodes.binary_search_by(|n| n.u.partial_cmp(&u).unwrap()) {
        Ok(i) => i.min(nodes.len() - 2),
        Err(i) => i.saturating_sub(1).min(nodes.len() - 2),
    };
    let h = nodes[i + 1].u - nodes[i].u;
    let t = ((u - nodes[i].u) / h).clamp(0.0, 1.0);
    (i, t, h)
}

/// Exact integral of one Hermite segment from its left node to local `t`.
fn segment_partial_integral(a: &HermiteNode, b: &HermiteNode, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t2 * t2;
    let i00 = 0.5 * t4 - t3 + t;
    let i10 = 0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2;
    let i01 = -0.5 * t4 + t3;
    let i11 = 0.25 * t4 - t3 / 3.0;
    h * (a.f * i00 + h * a.fp * i10 + b.f * i01 + h * b.fp * i11)
}

fn cumulative_integrals(nodes: &[HermiteNode]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(nodes.len());
    let mut total = 0.0;
    acc.push(0.0);
    for i in 0..nodes.len() - 1 {
        let h = nodes[i + 1].u - nodes[i].u;
        total += segment_partial_integral(&nodes[i], &nodes[i + 1], h, 1.0);
        acc.push(total);
    }
    acc
}

/// Bisection for a sign change of `f` bracketed by `[lo, hi]`.
fn bisect_zero<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tabulate(nl: &Nonlinearity, count: usize) -> Nonlinearity {
        let cap = nl.domain_cap();
        let nodes = (0..=count)
            .map(|j| {
                let u = cap * j as f64 / count as f64;
                HermiteNode {
                    u,
                    f: nl.reaction(u).unwrap(),
                    fp: nl.reaction_prime(u).unwrap(),
                }
            })
            .collect();
        Nonlinearity::tabulated(nodes).unwrap()
    }

    #[test]
    fn logistic_closed_forms() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert_eq!(nl.reaction(0.0).unwrap(), 0.0);
        assert!((nl.reaction(0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((nl.potential(1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((nl.reaction_prime(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_closed_forms() {
        let nl = Nonlinearity::cubic_bistable(0.25).unwrap();
        assert!((nl.reaction(0.5).unwrap() - 0.0625).abs() < 1e-15);
        assert!((nl.potential(1.0).unwrap() - 1.0 / 24.0).abs() < 1e-16);
        // F dips negative below theta.
        assert!(nl.potential(0.2).unwrap() < 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert!(nl.reaction(-0.1).is_err());
        assert!(nl.reaction(5.1).is_err());
        assert!(nl.reaction(5.0).is_ok());
        assert!(nl.potential(f64::NAN).is_err());
    }

    #[test]
    fn tabulated_reproduces_cubic_exactly() {
        // Hermite interpolation is exact on cubics, so a coarse table of the
        // bistable reaction must agree to rounding.
        let exact = Nonlinearity::cubic_bistable(0.3).unwrap();
        let tab = tabulate(&exact, 7);
        for j in 0..=500 {
            let u = 5.0 * j as f64 / 500.0;
            let a = exact.reaction(u).unwrap();
            let b = tab.reaction(u).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "f mismatch at {u}");
            let fa = exact.potential(u).unwrap();
            let fb = tab.potential(u).unwrap();
            assert!(
                (fa - fb).abs() < 1e-12 * (1.0 + fa.abs()),
                "F mismatch at {u}: {fa} vs {fb}"
            );
        }
    }

    #[test]
    fn tabulated_validation() {
        assert!(Nonlinearity::tabulated(vec![]).is_err());
        let bad_start = vec![
            HermiteNode { u: 0.0, f: 0.5, fp: 0.0 },
            HermiteNode { u: 1.0, f: 0.0, fp: 0.0 },
        ];
        assert!(Nonlinearity::tabulated(bad_start).is_err());
        let not_sorted = vec![
            HermiteNode { u: 0.0, f: 0.0, fp: 1.0 },
            HermiteNode { u: 1.0, f: 0.0, fp: 0.0 },
            HermiteNode { u: 0.5, f: 0.1, fp: 0.0 },
        ];
        assert!(Nonlinearity::tabulated(not_sorted).is_err());
    }

    #[test]
    fn lipschitz_bounds() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        assert!((nl.lipschitz_bound(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((nl.lipschitz_bound(5.0).unwrap() - 9.0).abs() < 1e-15);

        let bi = Nonlinearity::cubic_bistable(0.25).unwrap();
        assert!((bi.lipschitz_bound(1.0).unwrap() - 0.75).abs() < 1e-15);

        // Tabulated version of the same cubic agrees.
        let tab = tabulate(&bi, 9);
        assert!((tab.lipschitz_bound(1.0).unwrap() - 0.75).abs() < 1e-10);
    }

    #[test]
    fn sup_potential_values() {
        let nl = Nonlinearity::logistic(1.0).unwrap();
        let sup = nl.sup_potential();
        assert!((sup.value - 1.0 / 6.0).abs() < 1e-15);
        assert!((sup.argmax - 1.0).abs() < 1e-12);
        assert!(!sup.at_cap);

        let bi = Nonlinearity::cubic_bistable(0.25).unwrap();
        assert!((bi.sup_potential().value - 1.0 / 24.0).abs() < 1e-15);

        // theta ≥ 1/2 kills the positive area: sup stays at 0.
        let flat = Nonlinearity::cubic_bistable(0.6).unwrap();
        assert_eq!(flat.sup_potential().value, 0.0);

        assert_eq!(Nonlinearity::zero().sup_potential().value, 0.0);
    }

    #[test]
    fn classification() {
        let nl = Nonlinearity::logistic(1.3).unwrap();
        assert_eq!(nl.classify(), ReactionClass::Monostable);

        let bi = Nonlinearity::cubic_bistable(0.25).unwrap();
        match bi.classify() {
            ReactionClass::Bistable { theta } => assert!((theta - 0.25).abs() < 1e-9),
            other => panic!("expected bistable, got {other:?}"),
        }

        // No positive potential at 1 → not in the bistable class.
        let flat = Nonlinearity::cubic_bistable(0.6).unwrap();
        assert_eq!(flat.classify(), ReactionClass::Other);

        assert_eq!(Nonlinearity::zero().classify(), ReactionClass::Other);

        // Classification survives tabulation.
        let tab = tabulate(&nl, 64);
        assert_eq!(tab.classify(), ReactionClass::Monostable);
        let tab_bi = tabulate(&bi, 64);
        match tab_bi.classify() {
            ReactionClass::Bistable { theta } => assert!((theta - 0.25).abs() < 1e-6),
            other => panic!("expected bistable, got {other:?}"),
        }
    }

    #[test]
    fn upper_zero_is_one_for_reference_kinds() {
        assert_eq!(
            Nonlinearity::logistic(2.0).unwrap().upper_zero(),
            Some(1.0)
        );
        let tab = tabulate(&Nonlinearity::logistic(1.0).unwrap(), 64);
        let z = tab.upper_zero().unwrap();
        assert!((z - 1.0).abs() < 1e-9);
        assert_eq!(Nonlinearity::zero().upper_zero(), None);
    }
}
