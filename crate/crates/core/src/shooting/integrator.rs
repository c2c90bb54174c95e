//! Dormand-Prince 5(4) with adaptive step size, recording every accepted step.

use crate::{Error, Result};

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
// 5th-order weights are the last row of A (FSAL); E = b5 - b4.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Abort once any state component exceeds this in magnitude.
    pub blowup: f64,
    /// Upper bound on the step, which also bounds the node spacing of the
    /// recorded trajectory.
    pub max_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub rejected: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        let i = self.t.len() - 1;
        (self.t[i], self.y[i])
    }
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], wt: &[f64; N], ctl: &StepControl) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = (ctl.abs_tol + ctl.rel_tol * y0[i].abs().max(y1[i].abs())) * wt[i];
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
pub fn dopri5<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, ctl: &StepControl) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    dopri5_weighted(f, |_| [1.0; N], t0, y0, t1, ctl)
}

/// [`dopri5`] with the error scale of component `i` at time `t` multiplied
/// by `weights(t)[i]`.
pub fn dopri5_weighted<const N: usize, F, W>(
    f: F,
    weights: W,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    W: Fn(f64) -> [f64; N],
{
    let mut traj = Trajectory { t: vec![t0], y: vec![y0], rejected: 0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t0, &y0, &k1, t1, &weights(t0), ctl).min(ctl.max_step);

    for _ in 0..ctl.max_steps {
        if t >= t1 {
            return Ok(traj);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Err(Error::Divergence { last_t: t, reason: "step size underflow".into() });
        }

        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let mut y_new = y;
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &ys);
            if s == 6 {
                y_new = ys;
            }
        }
        let mut err = [0.0; N];
        for (i, e) in err.iter_mut().enumerate() {
            *e = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        }
        let norm = error_norm(&err, &y, &y_new, &weights(t), ctl);
        if !norm.is_finite() {
            traj.rejected += 1;
            h *= 0.1;
            continue;
        }
        if norm <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k[6];
            if y.iter().any(|v| !v.is_finite() || v.abs() > ctl.blowup) {
                return Err(Error::Divergence {
                    last_t: traj.t[traj.t.len() - 1],
                    reason: format!("solution exceeded {} in magnitude", ctl.blowup),
                });
            }
            traj.t.push(t);
            traj.y.push(y);
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(ctl.max_step);
        } else {
            traj.rejected += 1;
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    if t >= t1 {
        return Ok(traj);
    }
    Err(Error::Divergence { last_t: t, reason: format!("exceeded {} steps", ctl.max_steps) })
}

/// Starting step from the usual two-evaluation estimate of the local scale.
fn initial_step<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    wt: &[f64; N],
    ctl: &StepControl,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let scale = |i: usize| (ctl.abs_tol + ctl.rel_tol * y0[i].abs()) * wt[i];
    let rms = |v: &[f64; N]| ((0..N).map(|i| (v[i] / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let (d0, d1) = (rms(y0), rms(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t1 - t0);
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(t1 - t0)
}
