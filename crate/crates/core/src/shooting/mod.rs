//! Shooting for the singular boundary value problem.
//!
//! Both ends of `(0, pi/2)` are regular singular points. At `t = 0` the
//! indicial exponents of the linearisation are `1` and `-(2n-2p-1)`, so a
//! regular solution is fixed by its slope `a = r'(0+)`. At `t = pi/2` they are
//! `1` and `-(2p+1)`: integrating forward into that end amplifies round-off
//! like `(pi/2 - t)^-(2p+1)`, which swamps double precision long before the
//! default offset of `1e-6`.
//!
//! [`integrate`] therefore works from both ends. The left piece starts from
//! the series at `t = 0` with slope `a`. The right piece uses the symmetry
//! `t -> pi/2 - t`, `r -> k pi/2 + u`, which turns the equation for `(n, p)`
//! into the one for `(n, n-p-1)`; it starts from the series at `s = 0` with a
//! slope `b` chosen so that the two pieces agree in value at the join. The
//! mismatch in `r'` at the join is reported as the join defect.

mod integrator;

pub use integrator::{dopri5, dopri5_weighted, StepControl, Trajectory};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::geometry::SpaceParams;
use crate::tension::{residual_from_jet, BoundaryData, Jet, NumericProfile, Profile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub t_start: f64,
    pub t_end_offset: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_bisection_iters: usize,
    pub bracket: (f64, f64),
    /// Where the two integration pieces meet.
    pub t_join: f64,
    /// Accepted `|r(pi/2 - eps) - k pi/2|`.
    pub terminal_tol: f64,
    pub max_steps: usize,
    pub blowup: f64,
    /// Largest integration step; bounds the interpolation error between
    /// profile nodes.
    pub max_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            t_start: 1e-6,
            t_end_offset: 1e-6,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_bisection_iters: 200,
            bracket: (0.5, 2.0),
            t_join: FRAC_PI_4,
            terminal_tol: 1e-6,
            max_steps: 200_000,
            blowup: 50.0,
            max_step: 4e-3,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.t_start > 0.0 && self.t_end_offset > 0.0 && self.t_start < FRAC_PI_2 - self.t_end_offset) {
            return bad(format!(
                "need 0 < t_start < pi/2 - t_end_offset (got {}, {})",
                self.t_start, self.t_end_offset
            ));
        }
        if !(self.t_join > self.t_start && self.t_join < FRAC_PI_2 - self.t_end_offset) {
            return bad(format!("join point {} must lie between the two start points", self.t_join));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.terminal_tol > 0.0 && self.max_step > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.bracket.0.is_finite() && self.bracket.1.is_finite()) {
            return bad("bracket must be finite".into());
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_steps: self.max_steps,
            blowup: self.blowup,
            max_step: self.max_step,
        }
    }
}

/// `(r(t0), r'(t0))` from the third-order expansion `r = a t + c3 t^3`.
pub fn series_start(params: &SpaceParams, a: f64, t0: f64) -> (f64, f64) {
    let c3 = series_cubic_coefficient(params, a);
    (a * t0 + c3 * t0.powi(3), a + 3.0 * c3 * t0 * t0)
}

/// Fifth-order version of [`series_start`], used to seed the integrator.
pub fn series_start_quintic(params: &SpaceParams, a: f64, t0: f64) -> (f64, f64) {
    let (c3, c5) = series_coefficients(params, a);
    let t2 = t0 * t0;
    (t0 * (a + t2 * (c3 + c5 * t2)), a + t2 * (3.0 * c3 + 5.0 * c5 * t2))
}

/// `(c3, c5)` of the regular solution with slope `a`, from matching the
/// `t^1` and `t^3` coefficients of the equation.
///
/// Writing `m = 2n-2p-1`, `q = n-p-1` and expanding `cot t = 1/t - t/3`,
/// `1/sin^2 t = 1/t^2 + 1/3`, `1/sin^2 2t = 1/(4t^2) + 1/3`, the `t^1`
/// coefficient is `(5 + 3m - 2q) c3 + F(a)`, where the first factor is the
/// indicial polynomial at exponent 3. At `t^3` the indicial factor is
/// `19 + 5m - 2q = 8(n-p+2)`.
pub fn series_coefficients(params: &SpaceParams, a: f64) -> (f64, f64) {
    let c3 = series_cubic_coefficient(params, a);
    let (n, p) = (params.nf(), params.pf());
    let (a2, a3) = (a * a, a * a * a);
    let a5 = a3 * a2;
    let g = 4.0 / 45.0
        * (-3.0 * a5 * (n - p + 7.0) + a3 * (5.0 * n - 20.0 * p + 35.0) + 45.0 * a2 * c3 * (n - p + 1.0)
            - a * (2.0 * n - 17.0 * p + 14.0)
            - 15.0 * c3 * (2.0 * n + p + 2.0));
    (c3, -g / (8.0 * (n - p + 2.0)))
}

pub fn series_cubic_coefficient(params: &SpaceParams, a: f64) -> f64 {
    let m = 2.0 * params.nf() - 2.0 * params.pf() - 1.0;
    let q = f64::from(params.q());
    let p = params.pf();
    let a3 = a * a * a;
    // r'' contributes 6 c3; the first-order term m (cot t) r' - (2p+1) (tan t) r'
    let first_order = -m * a / 3.0 - (2.0 * p + 1.0) * a;
    // (p / cos^2 t - q / sin^2 t) sin 2r, with sin 2r = 2at + (2 c3 - 4a^3/3) t^3
    let sin2r_term = 2.0 * p * a + q * (4.0 * a3 / 3.0 - 2.0 * a / 3.0);
    // -sin 4r / sin^2 2t, with sin 4r = 4at + (4 c3 - 32 a^3/3) t^3
    let sin4r_term = 8.0 * a3 / 3.0 - 4.0 * a / 3.0;
    let indicial = 6.0 + 3.0 * m - 2.0 * q - 1.0;
    -(first_order + sin2r_term + sin4r_term) / indicial
}

/// Below this multiple of `1/max(1, |a|)` the profile is taken from the series.
const SERIES_REACH: f64 = 1e-2;
/// Geometric spacing of the series nodes.
const SERIES_RATIO: f64 = 1.25;
/// Scale below which the error control tightens like `t^2` for `r` and `t`
/// for `r'`, tracking how the singular coefficients amplify local errors.
const WEIGHT_SCALE: f64 = 0.25;

fn error_weights(t: f64) -> [f64; 2] {
    let x = (t / WEIGHT_SCALE).min(1.0);
    [x * x, x]
}
/// Right-hand side of the reduced equation as a first-order system.
fn rhs(params: &SpaceParams, t: f64, y: &[f64; 2]) -> [f64; 2] {
    let (r, v) = (y[0], y[1]);
    let (sin2r, cos2r) = (2.0 * r).sin_cos();
    let sin2t = (2.0 * t).sin();
    let acc = -params.first_order_coefficient(t) * v - params.sin2r_coefficient(t) * sin2r
        + 2.0 * sin2r * cos2r / (sin2t * sin2t);
    [v, acc]
}

/// Regular solution with slope `slope` on `[t0, t1]`: series nodes up to
/// the series reach, integrated beyond.
fn integrate_from_origin(
    params: &SpaceParams,
    slope: f64,
    t0: f64,
    t1: f64,
    cfg: &ShootingConfig,
) -> Result<Trajectory<2>> {
    let reach = (SERIES_REACH / slope.abs().max(1.0)).min(0.5 * t1);
    let mut t = Vec::new();
    let mut y = Vec::new();
    let mut ts = t0;
    while ts < reach {
        let (r, v) = series_start_quintic(params, slope, ts);
        t.push(ts);
        y.push([r, v]);
        ts *= SERIES_RATIO;
    }
    let ts = if t.is_empty() { t0 } else { reach };
    let (r0, v0) = series_start_quintic(params, slope, ts);
    // steep profiles vary on the scale 1/|slope|
    let ctl = StepControl { max_step: cfg.max_step / slope.abs().max(1.0), ..cfg.step_control() };
    let tail = dopri5_weighted(|s, u| rhs(params, s, u), error_weights, ts, [r0, v0], t1, &ctl)?;
    t.extend(tail.t);
    y.extend(tail.y);
    Ok(Trajectory { t, y, rejected: tail.rejected })
}

/// Result of [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Integration {
    pub params: SpaceParams,
    pub slope: f64,
    /// The assembled profile on `[t_start, pi/2 - t_end_offset]`.
    pub profile: NumericProfile,
    /// Left piece on `[t_start, join_t]`.
    pub left: NumericProfile,
    /// Right piece in the reflected frame: `u(s) = r(pi/2 - s) - k pi/2` for
    /// `s` in `[t_end_offset, pi/2 - join_t]`, solving the equation of the
    /// dual space. `None` for the zero solution.
    pub right: Option<NumericProfile>,
    /// Odd `k` with `r -> k pi/2` at the right end (0 for the zero solution).
    pub k: i64,
    /// `r'` at the right end, `-b` in the reflected variable.
    pub end_slope: f64,
    pub join_t: f64,
    /// `|r'_left - r'_right|` at the join.
    pub join_defect: f64,
    pub steps: usize,
}

impl Integration {
    pub fn terminal_value(&self) -> f64 {
        let r = self.profile.values();
        r[r.len() - 1]
    }

    /// `r(pi/2 - eps) - k pi/2`, without the cancellation of forming it from
    /// the terminal value.
    pub fn terminal_offset(&self) -> f64 {
        match &self.right {
            Some(right) => right.values()[0],
            None => self.terminal_value(),
        }
    }

    /// Residual of the reduced equation at `t`.
    ///
    /// Right of the join it is evaluated in the reflected frame, where the
    /// equation for the dual space takes the same value; in the `t` frame
    /// the rounding of `r` near `k pi/2` alone would produce residuals of
    /// order `1e-16 / (pi/2 - t)^2`.
    pub fn residual(&self, t: f64) -> Result<f64> {
        match &self.right {
            Some(right) if t > self.join_t => {
                let s = FRAC_PI_2 - t;
                let j = right.eval(s)?;
                Ok(residual_from_jet(&self.params.dual(), &j, s))
            }
            _ => {
                let j = if self.right.is_none() { self.profile.eval(t)? } else { self.left.eval(t)? };
                Ok(residual_from_jet(&self.params, &j, t))
            }
        }
    }

    /// Largest `|residual|` over the nodes of both pieces and the midpoints
    /// between them, restricted to `[lo, hi]`.
    pub fn max_residual(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut points: Vec<f64> = Vec::new();
        let mut add = |grid: &[f64], map: &dyn Fn(f64) -> f64| {
            for w in grid.windows(2) {
                points.push(map(w[0]));
                points.push(map(0.5 * (w[0] + w[1])));
            }
            points.push(map(grid[grid.len() - 1]));
        };
        match &self.right {
            Some(right) => {
                add(self.left.grid(), &|t| t);
                add(right.grid(), &|s| FRAC_PI_2 - s);
            }
            None => add(self.profile.grid(), &|t| t),
        }
        let mut worst = 0.0f64;
        for t in points {
            if t >= lo && t <= hi {
                worst = worst.max(self.residual(t)?.abs());
            }
        }
        Ok(worst)
    }
}

/// Nearest odd multiple of `pi/2`, as its odd integer factor.
fn nearest_odd(r: f64) -> i64 {
    let x = r / FRAC_PI_2;
    2 * (x / 2.0).floor() as i64 + 1
}

fn sampled(params: &SpaceParams, tr: &Trajectory<2>) -> Result<NumericProfile> {
    let ddr = tr.t.iter().zip(&tr.y).map(|(&t, y)| rhs(params, t, y)[1]).collect();
    NumericProfile::new(tr.t.clone(), tr.y.iter().map(|y| y[0]).collect(), tr.y.iter().map(|y| y[1]).collect(), ddr)
}

/// Integrates the reduced equation for slope `a` over
/// `[t_start, pi/2 - t_end_offset]`.
pub fn integrate(params: &SpaceParams, a: f64, cfg: &ShootingConfig) -> Result<Integration> {
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::InvalidParams(format!("slope must be finite (got {a})")));
    }
    let t_end = FRAC_PI_2 - cfg.t_end_offset;
    if a == 0.0 {
        let profile = NumericProfile::new(vec![cfg.t_start, t_end], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2])?;
        return Ok(Integration {
            params: *params,
            slope: a,
            left: profile.clone(),
            profile,
            right: None,
            k: 0,
            end_slope: 0.0,
            join_t: cfg.t_join,
            join_defect: 0.0,
            steps: 0,
        });
    }

    let left = integrate_from_origin(params, a, cfg.t_start, cfg.t_join, cfg)?;
    let (_, [r_join, v_join]) = left.last();

    let dual = params.dual();
    let s_start = cfg.t_end_offset;
    let s_join = FRAC_PI_2 - cfg.t_join;
    let k = nearest_odd(r_join);
    let target = r_join - k as f64 * FRAC_PI_2;
    let (b, right) = match_end_slope(&dual, target, s_start, s_join, cfg)?;
    let (_, [_, u_prime]) = right.last();
    let join_defect = (v_join + u_prime).abs();

    let mut t = Vec::with_capacity(left.t.len() + right.t.len());
    let (mut r, mut dr, mut ddr) = (Vec::new(), Vec::new(), Vec::new());
    let mut push = |ti: f64, y: [f64; 2]| {
        t.push(ti);
        r.push(y[0]);
        dr.push(y[1]);
        ddr.push(rhs(params, ti, &y)[1]);
    };
    for (ti, y) in left.t.iter().zip(&left.y) {
        push(*ti, *y);
    }
    let offset = k as f64 * FRAC_PI_2;
    for (si, u) in right.t.iter().zip(&right.y).rev() {
        let ti = FRAC_PI_2 - si;
        if ti > cfg.t_join {
            push(ti, [offset + u[0], -u[1]]);
        }
    }
    let steps = left.t.len() + right.t.len() - 2;
    let profile = NumericProfile::new(t, r, dr, ddr)?;
    Ok(Integration {
        params: *params,
        slope: a,
        profile,
        left: sampled(params, &left)?,
        right: Some(sampled(&dual, &right)?),
        k,
        end_slope: -b,
        join_t: cfg.t_join,
        join_defect,
        steps,
    })
}

/// Finds `b` with `u_b(s_join) = target` for the reflected equation by
/// bracketing and regula falsi (Illinois variant).
fn match_end_slope(
    dual: &SpaceParams,
    target: f64,
    s0: f64,
    s1: f64,
    cfg: &ShootingConfig,
) -> Result<(f64, Trajectory<2>)> {
    let eval = |b: f64| -> Result<(f64, Trajectory<2>)> {
        let tr = integrate_from_origin(dual, b, s0, s1, cfg)?;
        Ok((tr.last().1[0] - target, tr))
    };
    if target.abs() >= FRAC_PI_2 * (1.0 - 1e-12) {
        return Err(Error::Divergence {
            last_t: FRAC_PI_2 - s1,
            reason: format!("value {target} at the join cannot be reached from the right end"),
        });
    }
    let guess = if target == 0.0 { 0.0 } else { target / s1 };
    if guess == 0.0 {
        let (_, tr) = eval(0.0)?;
        return Ok((0.0, tr));
    }
    // the reflected solution is increasing in its slope
    let (mut lo, mut hi) = if target > 0.0 { (0.0, guess) } else { (guess, 0.0) };
    let mut f_lo = eval(lo)?.0;
    let mut f_hi = eval(hi)?.0;
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        expansions += 1;
        if expansions > 200 {
            return Err(Error::NonConvergence {
                what: "end-slope bracketing",
                iterations: expansions,
                residual: f_lo.abs().min(f_hi.abs()),
            });
        }
        if target > 0.0 {
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = eval(hi)?.0;
        } else {
            hi = lo;
            f_hi = f_lo;
            lo *= 2.0;
            f_lo = eval(lo)?.0;
        }
    }
    let tol = 1e-14 * (1.0 + target.abs());
    for b in [lo, hi] {
        let (f, tr) = eval(b)?;
        if f.abs() <= tol {
            return Ok((b, tr));
        }
    }
    let mut side = 0i8;
    for _ in 0..cfg.max_bisection_iters {
        let mut b = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(b > lo && b < hi) {
            b = 0.5 * (lo + hi);
        }
        let (f, tr) = eval(b)?;
        if f.abs() <= tol || (hi - lo) <= 1e-15 * (lo.abs() + hi.abs()) {
            return Ok((b, tr));
        }
        if f.signum() == f_lo.signum() {
            lo = b;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = b;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    let b = 0.5 * (lo + hi);
    let (f, tr) = eval(b)?;
    if f.abs() <= 1e-10 {
        return Ok((b, tr));
    }
    Err(Error::NonConvergence { what: "end-slope matching", iterations: cfg.max_bisection_iters, residual: f.abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotResult {
    /// The shooting parameter `a = r'(0+)`.
    pub slope: f64,
    pub profile: NumericProfile,
    pub terminal_value: f64,
    pub terminal_gap: f64,
    pub converged: bool,
    pub iterations: usize,
    pub join_defect: f64,
    /// Largest equation residual on `[2 t_start, pi/2 - 2 t_end_offset]`.
    pub max_residual: f64,
}

fn terminal_gap(integ: &Integration, boundary: BoundaryData) -> f64 {
    if integ.k == boundary.k() {
        integ.terminal_offset().abs()
    } else {
        (integ.terminal_value() - boundary.terminal_value()).abs()
    }
}

fn shot_from(
    integ: Integration,
    boundary: BoundaryData,
    cfg: &ShootingConfig,
    iterations: usize,
) -> Result<ShotResult> {
    let terminal_gap = terminal_gap(&integ, boundary);
    let max_residual = integ.max_residual(2.0 * cfg.t_start, FRAC_PI_2 - 2.0 * cfg.t_end_offset)?;
    Ok(ShotResult {
        slope: integ.slope,
        converged: terminal_gap < cfg.terminal_tol,
        terminal_value: integ.terminal_value(),
        terminal_gap,
        iterations,
        join_defect: integ.join_defect,
        max_residual,
        profile: integ.profile,
    })
}

/// A single shot at a fixed slope, without root finding.
pub fn shoot_slope(params: &SpaceParams, a: f64, boundary: BoundaryData, cfg: &ShootingConfig) -> Result<ShotResult> {
    let integ = integrate(params, a, cfg)?;
    shot_from(integ, boundary, cfg, 0)
}

/// Searches the configured bracket for a slope whose profile ends within
/// `terminal_tol` of `k pi/2`.
///
/// Every positive slope reaches `pi/2`, so the terminal map is degenerate in
/// `a`; an endpoint of the bracket that already meets the tolerance is
/// accepted as is. Otherwise the terminal gap must change sign on the bracket
/// and secant steps (with bisection fallback) refine it.
pub fn shoot(params: &SpaceParams, boundary: BoundaryData, cfg: &ShootingConfig) -> Result<ShotResult> {
    cfg.validate()?;
    let (lo, hi) = (cfg.bracket.0.min(cfg.bracket.1), cfg.bracket.0.max(cfg.bracket.1));
    let target = boundary.terminal_value();
    let f = |a: f64| -> Result<(f64, Integration)> {
        let integ = integrate(params, a, cfg)?;
        Ok((integ.terminal_value() - target, integ))
    };
    let (mut f_lo, integ_lo) = f(lo)?;
    let (mut f_hi, integ_hi) = f(hi)?;
    let best = if f_lo.abs() <= f_hi.abs() { (f_lo, integ_lo) } else { (f_hi, integ_hi) };
    if best.0.abs() < cfg.terminal_tol {
        return shot_from(best.1, boundary, cfg, 0);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    let (mut a_lo, mut a_hi) = (lo, hi);
    let mut last = best.1;
    for it in 1..=cfg.max_bisection_iters {
        let secant = (a_lo * f_hi - a_hi * f_lo) / (f_hi - f_lo);
        let mid = 0.5 * (a_lo + a_hi);
        // fall back to bisection when the secant leaves the inner half
        let a = if secant > a_lo + 0.25 * (a_hi - a_lo) && secant < a_hi - 0.25 * (a_hi - a_lo) { secant } else { mid };
        let (fa, integ) = f(a)?;
        if fa.abs() < cfg.terminal_tol {
            return shot_from(integ, boundary, cfg, it);
        }
        if fa.signum() == f_lo.signum() {
            a_lo = a;
            f_lo = fa;
        } else {
            a_hi = a;
            f_hi = fa;
        }
        last = integ;
    }
    shot_from(last, boundary, cfg, cfg.max_bisection_iters)
}

/// Largest `|ode residual|` of a numeric profile over its nodes and interval
/// midpoints inside `[lo, hi]`.
pub fn max_residual(params: &SpaceParams, profile: &NumericProfile, lo: f64, hi: f64) -> Result<f64> {
    let grid = profile.grid();
    let prof = Profile::Numeric(profile.clone());
    let mut worst = 0.0f64;
    let mut check = |t: f64| -> Result<()> {
        if t >= lo && t <= hi {
            let j: Jet = prof.eval(t)?;
            worst = worst.max(residual_from_jet(params, &j, t).abs());
        }
        Ok(())
    };
    for w in grid.windows(2) {
        check(w[0])?;
        check(0.5 * (w[0] + w[1]))?;
    }
    check(grid[grid.len() - 1])?;
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sp(n: u32, p: u32) -> SpaceParams {
        SpaceParams::new(n, p).unwrap()
    }

    fn sup_error(integ: &Integration) -> f64 {
        let a = integ.slope;
        integ
            .profile
            .grid()
            .iter()
            .zip(integ.profile.values())
            .map(|(t, r)| (r - (a * t.tan()).atan()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn cubic_coefficient_matches_family_taylor_series() {
        // arctan(a tan t) = a t + a (1 - a^2) t^3 / 3 + O(t^5)
        for (n, p) in [(1, 0), (2, 0), (3, 1), (5, 2), (7, 6)] {
            for a in [-4.0, -0.25, 0.0, 0.5, 1.0, 3.0] {
                let c3 = series_cubic_coefficient(&sp(n, p), a);
                assert_abs_diff_eq!(c3, a * (1.0 - a * a) / 3.0, epsilon = 1e-13);
            }
        }
        assert!(series_cubic_coefficient(&sp(3, 1), 1.0).abs() < 1e-15);
        assert_eq!(series_cubic_coefficient(&sp(3, 1), 0.0), 0.0);
        let (r0, v0) = series_start(&sp(3, 1), 2.0, 1e-3);
        assert_abs_diff_eq!(r0, (2.0 * 1e-3f64.tan()).atan(), epsilon = 1e-14);
        assert_abs_diff_eq!(v0, 2.0 / (4.0 * 1e-3f64.sin().powi(2) + 1e-3f64.cos().powi(2)), epsilon = 1e-10);
        let (r5, v5) = series_start_quintic(&sp(3, 1), 2.0, 1e-3);
        assert_abs_diff_eq!(r5, (2.0 * 1e-3f64.tan()).atan(), epsilon = 1e-17);
        assert_abs_diff_eq!(v5, 2.0 / (4.0 * 1e-3f64.sin().powi(2) + 1e-3f64.cos().powi(2)), epsilon = 1e-15);
    }

    #[test]
    fn quintic_coefficient_matches_family_taylor_series() {
        // t^5 coefficient of arctan(a tan t) is a^5/5 - a^3/3 + 2a/15
        for (n, p) in [(1, 0), (2, 0), (3, 1), (4, 2), (5, 0), (7, 3)] {
            for a in [-4.0f64, -0.25, 0.5, 1.0, 3.0] {
                let (_, c5) = series_coefficients(&sp(n, p), a);
                let want = a.powi(5) / 5.0 - a.powi(3) / 3.0 + 2.0 * a / 15.0;
                assert!((c5 - want).abs() < 1e-12 * want.abs().max(1.0), "{n} {p} {a}");
            }
        }
    }

    #[test]
    fn nearest_odd_multiples() {
        assert_eq!(nearest_odd(0.1), 1);
        assert_eq!(nearest_odd(3.0), 1);
        assert_eq!(nearest_odd(-0.1), -1);
        assert_eq!(nearest_odd(4.0), 3);
        assert_eq!(nearest_odd(-3.5), -3);
    }

    #[test]
    fn identity_is_recovered() {
        let integ = integrate(&sp(3, 1), 1.0, &ShootingConfig::default()).unwrap();
        assert!(sup_error(&integ) < 1e-8, "{}", sup_error(&integ));
        assert_eq!(integ.k, 1);
        assert!(integ.join_defect < 1e-9);
    }

    #[test]
    fn family_members_are_recovered() {
        let cfg = ShootingConfig::default();
        let i2 = integrate(&sp(2, 0), 2.0, &cfg).unwrap();
        assert!(sup_error(&i2) < 1e-6);
        let neg = integrate(&sp(3, 1), -0.5, &cfg).unwrap();
        assert!(sup_error(&neg) < 1e-6);
        assert_eq!(neg.k, -1);
        assert_abs_diff_eq!(neg.end_slope, -2.0, epsilon = 1e-6);
    }

    #[test]
    fn zero_slope_is_the_zero_solution() {
        let integ = integrate(&sp(3, 1), 0.0, &ShootingConfig::default()).unwrap();
        assert_eq!(integ.k, 0);
        assert!(integ.profile.values().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn config_validation() {
        let cfg = ShootingConfig { t_start: 0.0, ..Default::default() };
        assert!(integrate(&sp(2, 0), 1.0, &cfg).is_err());
        let cfg = ShootingConfig { t_join: 1.6, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = ShootingConfig { abs_tol: -1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fixed_slope_terminal_gap() {
        let b = BoundaryData::new(1).unwrap();
        let shot = shoot_slope(&sp(2, 0), 3.0, b, &ShootingConfig::default()).unwrap();
        assert!(shot.terminal_gap < 1e-4);
        let expected = FRAC_PI_2 - (3.0 * (FRAC_PI_2 - 1e-6).tan()).atan();
        assert_abs_diff_eq!(shot.terminal_gap, expected, epsilon = 1e-9);
    }

    #[test]
    fn shooting_converges_on_degenerate_family() {
        let b = BoundaryData::new(1).unwrap();
        let cfg = ShootingConfig { bracket: (0.5, 2.0), ..Default::default() };
        let shot = shoot(&sp(3, 1), b, &cfg).unwrap();
        assert!(shot.converged && shot.terminal_gap < 1e-6);
        assert!(shot.max_residual < 1e-6, "residual {}", shot.max_residual);
    }

    #[test]
    fn shooting_without_sign_change_is_a_bracket_error() {
        let b = BoundaryData::new(1).unwrap();
        let cfg = ShootingConfig { bracket: (-2.0, -0.5), ..Default::default() };
        assert!(matches!(shoot(&sp(2, 0), b, &cfg), Err(Error::Bracket { .. })));
    }
}
