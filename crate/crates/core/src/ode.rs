//! Embedded Dormand-Prince 5(4) integration for small fixed-size systems.
//!
//! Classic adaptive step-size control with the standard safety factors;
//! callers inspect the state after every accepted step, which is how the
//! shooting code localises its classification events.

use crate::error::{CoreError, Result};

pub struct Rk45Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: f64,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.05,
            initial_step: 1e-4,
        }
    }
}

/// What the per-step inspection wants next.
pub enum StepControl {
    Continue,
    Stop,
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` until `t_end`, or until the
/// observer stops the run. The observer sees every accepted step.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Rk45Options,
    mut observe: impl FnMut(f64, &[f64; N]) -> StepControl,
) -> Result<(f64, [f64; N])> {
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut k1 = f(t, &y);

    const MAX_STEPS: usize = 4_000_000;
    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok((t, y));
        }
        h = h.min(t_end - t).min(opts.max_step);

        let (y5, y4, k_new) = dp_step(&f, t, &y, h, &k1);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / sc;
            err += e * e;
        }
        err = (err / N as f64).sqrt();

        if !err.is_finite() {
            return Err(CoreError::Numerical(
                "integrator produced a non-finite error estimate".into(),
            ));
        }

        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k_new; // FSAL
            match observe(t, &y) {
                StepControl::Continue => {}
                StepControl::Stop => return Ok((t, y)),
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(CoreError::Numerical(format!(
                "integrator step collapsed at t = {t}"
            )));
        }
    }
    Err(CoreError::Numerical("integrator exceeded step budget".into()))
}

/// One Dormand-Prince step; returns 5th-order solution, 4th-order embedded
/// solution, and the FSAL stage for reuse.
fn dp_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
    k1: &[f64; N],
) -> ([f64; N], [f64; N], [f64; N]) {
    let stage = |coeffs: &[(f64, &[f64; N])]| {
        let mut out = *y;
        for i in 0..N {
            let mut acc = 0.0;
            for (a, k) in coeffs {
                acc += a * k[i];
            }
            out[i] += h * acc;
        }
        out
    };

    let k2 = f(t + h / 5.0, &stage(&[(1.0 / 5.0, k1)]));
    let k3 = f(
        t + 3.0 * h / 10.0,
        &stage(&[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)]),
    );
    let k4 = f(
        t + 4.0 * h / 5.0,
        &stage(&[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]),
    );
    let k5 = f(
        t + 8.0 * h / 9.0,
        &stage(&[
            (19372.0 / 6561.0, k1),
            (-25360.0 / 2187.0, &k2),
            (64448.0 / 6561.0, &k3),
            (-212.0 / 729.0, &k4),
        ]),
    );
    let k6 = f(
        t + h,
        &stage(&[
            (9017.0 / 3168.0, k1),
            (-355.0 / 33.0, &k2),
            (46732.0 / 5247.0, &k3),
            (49.0 / 176.0, &k4),
            (-5103.0 / 18656.0, &k5),
        ]),
    );
    let y5 = stage(&[
        (35.0 / 384.0, k1),
        (500.0 / 1113.0, &k3),
        (125.0 / 192.0, &k4),
        (-2187.0 / 6784.0, &k5),
        (11.0 / 84.0, &k6),
    ]);
    let k7 = f(t + h, &y5);
    let y4 = stage(&[
        (5179.0 / 57600.0, k1),
        (7571.0 / 16695.0, &k3),
        (393.0 / 640.0, &k4),
        (-92097.0 / 339200.0, &k5),
        (187.0 / 2100.0, &k6),
        (1.0 / 40.0, &k7),
    ]);
    (y5, y4, k7)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let (t, y) = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            5.0,
            &Rk45Options::default(),
            |_, _| StepControl::Continue,
        )
        .unwrap();
        assert_eq!(t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let (_, y) = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            20.0 * std::f64::consts::PI,
            &Rk45Options::default(),
            |_, _| StepControl::Continue,
        )
        .unwrap();
        let energy = y[0] * y[0] + y[1] * y[1];
        assert!((energy - 1.0).abs() < 1e-8);
        assert!((y[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn observer_can_stop() {
        let (t, y) = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            100.0,
            &Rk45Options::default(),
            |_, y| {
                if y[0] > 10.0 {
                    StepControl::Stop
                } else {
                    StepControl::Continue
                }
            },
        )
        .unwrap();
        assert!(t < 100.0);
        assert!(y[0] >= 10.0);
    }
}
