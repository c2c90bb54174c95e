//! Profiles `r(t)`, the reduced harmonic-map equation
//!
//! ```text
//! r'' + [(2n-2p-1) cot t - (2p+1) tan t] r'
//!     + [p / cos^2 t - (n-p-1) / sin^2 t] sin 2r - sin 4r / sin^2 2t = 0
//! ```
//!
//! with `r(0) = 0`, `r(pi/2) = k pi/2`, and the Brouwer degree tables for
//! `(k, r)`-maps.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::family::{jet_unchecked, FamilyParam};
use crate::geometry::{trace_p_inv_pdot, trace_p_inv_pdot_shifted, SpaceParams};
use crate::{check_open_interval, Error, Result};

/// `r`, its first two derivatives and `sin 2r`, `cos 2r` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
    pub sin2r: f64,
    pub cos2r: f64,
}

impl Jet {
    fn from_values(r: f64, dr: f64, ddr: f64) -> Self {
        let (sin2r, cos2r) = (2.0 * r).sin_cos();
        Self { r, dr, ddr, sin2r, cos2r }
    }
}

/// A profile sampled on a strictly increasing grid inside `(0, pi/2)`.
///
/// Between nodes `r` is the cubic Hermite interpolant of `(r, r')` and `r'`
/// the one of `(r', r'')`; `r''` is the derivative of the latter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericProfile {
    t: Vec<f64>,
    r: Vec<f64>,
    dr: Vec<f64>,
    ddr: Vec<f64>,
}

impl NumericProfile {
    pub fn new(t: Vec<f64>, r: Vec<f64>, dr: Vec<f64>, ddr: Vec<f64>) -> Result<Self> {
        let len = t.len();
        if len < 2 {
            return Err(Error::InvalidParams("numeric profile needs at least 2 points".into()));
        }
        if r.len() != len || dr.len() != len || ddr.len() != len {
            return Err(Error::InvalidParams("profile arrays differ in length".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("profile grid must be strictly increasing".into()));
        }
        if !(t[0] > 0.0 && t[len - 1] < FRAC_PI_2) {
            return Err(Error::InvalidParams("profile grid must lie inside (0, pi/2)".into()));
        }
        if [&t, &r, &dr, &ddr].iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidParams("profile contains non-finite values".into()));
        }
        Ok(Self { t, r, dr, ddr })
    }

    /// Samples `f(t) = (r, r', r'')` on `points` uniform nodes of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> (f64, f64, f64)) -> Result<Self> {
        let points = points.max(2);
        let t: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
        let (mut r, mut dr, mut ddr) = (Vec::new(), Vec::new(), Vec::new());
        for &ti in &t {
            let (a, b, c) = f(ti);
            r.push(a);
            dr.push(b);
            ddr.push(c);
        }
        Self::new(t, r, dr, ddr)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dr
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.ddr
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn eval(&self, t: f64) -> Result<Jet> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::Evaluation { t, reason: format!("outside the sampled range [{lo}, {hi}]") });
        }
        let i = match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Ok(Jet::from_values(self.r[i], self.dr[i], self.ddr[i])),
            Err(i) => i - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (h00, h10, h01, h11) = hermite(s);
        let (d00, d10, d01, d11) = hermite_derivative(s);
        let r = h00 * self.r[i] + h10 * h * self.dr[i] + h01 * self.r[i + 1] + h11 * h * self.dr[i + 1];
        let dr = h00 * self.dr[i] + h10 * h * self.ddr[i] + h01 * self.dr[i + 1] + h11 * h * self.ddr[i + 1];
        let ddr = (d00 * self.dr[i] + d01 * self.dr[i + 1]) / h + d10 * self.ddr[i] + d11 * self.ddr[i + 1];
        Ok(Jet::from_values(r, dr, ddr))
    }
}

fn hermite(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
}

fn hermite_derivative(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Profile {
    /// `arctan(rho tan t) + ell pi`.
    ClosedForm {
        rho: f64,
        ell: i64,
    },
    /// `kappa_ell = ell pi/2`.
    Constant {
        ell: i64,
    },
    Numeric(NumericProfile),
}

impl Profile {
    pub fn eval(&self, t: f64) -> Result<Jet> {
        match self {
            Profile::ClosedForm { rho, ell } => {
                check_open_interval(t)?;
                let j = jet_unchecked(FamilyParam { rho: *rho, ell: *ell }, t);
                Ok(Jet { r: j.r, dr: j.dr, ddr: j.ddr, sin2r: j.sin2r, cos2r: j.cos2r })
            }
            Profile::Constant { ell } => {
                check_open_interval(t)?;
                // sin(ell pi) = 0 and cos(ell pi) = (-1)^ell exactly
                let cos2r = if ell.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                Ok(Jet { r: *ell as f64 * FRAC_PI_2, dr: 0.0, ddr: 0.0, sin2r: 0.0, cos2r })
            }
            Profile::Numeric(p) => p.eval(t),
        }
    }
}

/// The reduced equation evaluated at `t`.
pub fn ode_residual(params: &SpaceParams, profile: &Profile, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    let j = profile.eval(t)?;
    Ok(residual_from_jet(params, &j, t))
}

pub(crate) fn residual_from_jet(params: &SpaceParams, j: &Jet, t: f64) -> f64 {
    let sin2t = (2.0 * t).sin();
    let sin4r = 2.0 * j.sin2r * j.cos2r;
    j.ddr + params.first_order_coefficient(t) * j.dr + params.sin2r_coefficient(t) * j.sin2r - sin4r / (sin2t * sin2t)
}

/// Same quantity as [`ode_residual`], assembled from the normal tension
/// `r'' + 1/2 r' Tr(P_t^-1 P_t') - 1/2 Tr(P_t^-1 P'_{r(t)})`.
pub fn ode_residual_via_traces(params: &SpaceParams, profile: &Profile, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    let j = profile.eval(t)?;
    let a = trace_p_inv_pdot(params, t)?;
    let b = trace_p_inv_pdot_shifted(params, t, j.r)?;
    Ok(j.ddr + 0.5 * j.dr * a - 0.5 * b)
}

/// Target winding `r(pi/2) = k pi/2`, `k` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryData {
    k: i64,
}

impl BoundaryData {
    pub fn new(k: i64) -> Result<Self> {
        if !admissible_k(k) {
            return Err(Error::InvalidParams(format!("k must be odd (got {k})")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn terminal_value(&self) -> f64 {
        self.k as f64 * FRAC_PI_2
    }
}

/// `(|r(eps)|, |r(pi/2 - eps) - k pi/2|)`.
pub fn boundary_gap(profile: &Profile, boundary: BoundaryData, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < PI / 4.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, pi/4), got {eps}")));
    }
    let left = profile.eval(eps)?.r.abs();
    let right = (profile.eval(FRAC_PI_2 - eps)?.r - boundary.terminal_value()).abs();
    Ok((left, right))
}

/// Smooth `(k, r)`-maps of this action need `k = j + 1` with `j` even.
pub fn admissible_k(k: i64) -> bool {
    k.rem_euclid(2) == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: i64) -> Self {
        if v.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Brouwer degree of a `(k, r)`-map with `k = j |W|/2 + 1`.
///
/// | `j` | codims `(N0, N1)` | `|W|` | degree |
/// |-----|------------------|-------|--------|
/// | even | both odd | any | `k` |
/// | even | otherwise | any | `+1` |
/// | odd | both odd | any | `k` |
/// | odd | both even | `not in 4Z` | `0` |
/// | odd | even, odd | `not in 8Z` | `-1` |
/// | odd | otherwise | | `+1` |
pub fn brouwer_degree(codim0: u32, codim1: u32, weyl_order: u32, k: i64, j_parity: Parity) -> Result<i64> {
    if codim0 == 0 || codim1 == 0 {
        return Err(Error::InvalidParams("codimensions must be positive".into()));
    }
    if weyl_order == 0 || !weyl_order.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "the Weyl group is dihedral, its order must be even and positive (got {weyl_order})"
        )));
    }
    let twice = 2 * (k - 1);
    let w = i64::from(weyl_order);
    if twice % w != 0 || Parity::of(twice / w) != j_parity {
        return Err(Error::InvalidParams(format!(
            "k = {k} is not of the form j |W|/2 + 1 with j {j_parity:?} and |W| = {weyl_order}"
        )));
    }
    let (odd0, odd1) = (codim0 % 2 == 1, codim1 % 2 == 1);
    let degree = match j_parity {
        Parity::Even => {
            if odd0 && odd1 {
                k
            } else {
                1
            }
        }
        Parity::Odd => match (odd0, odd1) {
            (true, true) => k,
            (false, false) if !weyl_order.is_multiple_of(4) => 0,
            (false, true) if !weyl_order.is_multiple_of(8) => -1,
            _ => 1,
        },
    };
    Ok(degree)
}
