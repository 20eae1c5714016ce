//! Adaptive quadrature on finite intervals.
//!
//! Plain adaptive Simpson with the classic Richardson acceptance test.
//! All integrands we feed it are smooth after the substitutions done by
//! the callers, so nothing fancier is warranted.

use crate::error::{CoreError, Result};

const MAX_DEPTH: u32 = 60;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns an error if recursion bottoms out without meeting the local
/// tolerance or if the integrand produces a non-finite value.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    check_finite(&[fa, fm, fb])?;
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn check_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CoreError::Numerical(
            "integrand produced a non-finite value".into(),
        ))
    }
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    check_finite(&[flm, frm])?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(CoreError::Numerical(format!(
            "adaptive quadrature failed to converge on [{a}, {b}]"
        )));
    }
    let half_tol = 0.5 * tol;
    let l = adaptive(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_nearly_exact() {
        let f = |x: f64| 3.0 * x * x;
        let v = integrate(&f, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let f = |x: f64| (10.0 * x).sin();
        let v = integrate(&f, 0.0, 1.0, 1e-12).unwrap();
        let exact = (1.0 - (10.0f64).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let f = |x: f64| x;
        let v = integrate(&f, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let f = |x: f64| 1.0 / x;
        assert!(integrate(&f, 0.0, 1.0, 1e-9).is_err());
    }
}
