//! Dormand–Prince 5(4) for a complex scalar ODE on a real parameter interval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorSettings {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// The trajectory has left the chart once `|u|` exceeds this.
    pub escape_radius: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            atol: 1e-12,
            rtol: 1e-10,
            max_steps: 1_000_000,
            escape_radius: 0.5,
        }
    }
}

/// Final state, the largest `|u|` seen, and the number of accepted steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub value: C64,
    pub max_abs: f64,
    pub steps: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `du/ds = f(s, u)` from `s0` to `s1` starting at `u0`.
pub fn integrate<F>(f: F, s0: f64, s1: f64, u0: C64, settings: &IntegratorSettings) -> Result<Outcome>
where
    F: Fn(f64, C64) -> Result<C64>,
{
    let span = s1 - s0;
    let dir = span.signum();
    let mut s = s0;
    let mut u = u0;
    let mut h = 0.01 * span.abs();
    let mut max_abs = u0.norm();
    let mut steps = 0;
    let mut attempts = 0;
    let mut k = [C64::new(0.0, 0.0); 7];
    k[0] = f(s, u)?;
    while dir * (s1 - s) > 0.0 {
        attempts += 1;
        if attempts > settings.max_steps {
            return Err(Error::StepLimitExceeded(settings.max_steps));
        }
        h = h.min((s1 - s).abs());
        let hs = dir * h;
        for i in 1..7 {
            let mut acc = u;
            for (j, kj) in k.iter().enumerate().take(i) {
                acc += hs * A[i][j] * kj;
            }
            k[i] = f(s + C[i] * hs, acc)?;
        }
        let mut u5 = u;
        let mut u4 = u;
        for i in 0..7 {
            u5 += hs * B5[i] * k[i];
            u4 += hs * B4[i] * k[i];
        }
        let scale = settings.atol + settings.rtol * u.norm().max(u5.norm());
        let err = (u5 - u4).norm() / scale;
        if err <= 1.0 {
            s += hs;
            u = u5;
            steps += 1;
            max_abs = max_abs.max(u.norm());
            if u.norm() > settings.escape_radius || !u.is_finite() {
                return Err(Error::TrajectoryEscape(u.norm()));
            }
            // first-same-as-last: the seventh stage is the derivative at the new point
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else if err.is_finite() {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        h *= factor;
        if h < 1e-14 * span.abs() {
            return Err(Error::StepLimitExceeded(steps));
        }
    }
    Ok(Outcome { value: u, max_abs, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        // u' = i u on [0, 2π] returns to the start
        let s = IntegratorSettings { escape_radius: 10.0, ..Default::default() };
        let out = integrate(|_, u| Ok(C64::new(0.0, 1.0) * u), 0.0, std::f64::consts::TAU, C64::new(1.0, 0.0), &s).unwrap();
        assert!((out.value - 1.0).norm() < 1e-9);
    }

    #[test]
    fn backward_interval() {
        let s = IntegratorSettings { escape_radius: 10.0, ..Default::default() };
        let out = integrate(|_, u| Ok(u), 1.0, 0.0, C64::new(1.0, 0.0), &s).unwrap();
        assert!((out.value - (-1.0f64).exp()).norm() < 1e-9);
    }

    #[test]
    fn blow_up_escapes() {
        // u' = u^2 from u = 0.1 blows up at s = 10
        let s = IntegratorSettings::default();
        let r = integrate(|_, u| Ok(u * u), 0.0, 20.0, C64::new(0.1, 0.0), &s);
        assert!(matches!(r, Err(Error::TrajectoryEscape(_))));
    }

    #[test]
    fn step_cap() {
        let s = IntegratorSettings { max_steps: 5, escape_radius: 1e9, ..Default::default() };
        let r = integrate(|t, _| Ok(C64::new((100.0 * t).sin(), 0.0)), 0.0, 10.0, C64::new(0.0, 0.0), &s);
        assert_eq!(r, Err(Error::StepLimitExceeded(5)));
    }
}
