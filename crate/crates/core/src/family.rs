//! The explicit solution families `r_{rho,l}(t) = arctan(rho tan t) + l pi`
//! and the constants `kappa_l = l pi/2`.
//!
//! Derivatives and the double-angle functions are taken from the rational
//! identities in `D = rho^2 sin^2 t + cos^2 t`, not from `r` itself:
//!
//! ```text
//! r'       = rho / D
//! r''      = (rho - rho^3) sin 2t / D^2
//! sin 2r   = rho sin 2t / D
//! cos 2r   = (cos^2 t - rho^2 sin^2 t) / D
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::tension::Profile;
use crate::{check_open_interval, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParam {
    pub rho: f64,
    pub ell: i64,
}

impl FamilyParam {
    pub fn new(rho: f64, ell: i64) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidParams(format!("rho must be finite (got {rho})")));
        }
        Ok(Self { rho, ell })
    }

    /// A member usable as a boundary value solution; `rho = 0` is the zero map,
    /// which never reaches an odd multiple of `pi/2`.
    pub fn for_boundary(rho: f64) -> Result<Self> {
        if rho == 0.0 {
            return Err(Error::InvalidParams("rho = 0 does not satisfy the boundary conditions".into()));
        }
        Self::new(rho, 0)
    }

    pub fn profile(&self) -> Profile {
        Profile::ClosedForm { rho: self.rho, ell: self.ell }
    }
}

/// Value, derivatives and double-angle functions of a family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyJet {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
    pub sin2r: f64,
    pub cos2r: f64,
}

/// Evaluates without the domain check; `t` must lie in `(0, pi/2)`.
pub(crate) fn jet_unchecked(fp: FamilyParam, t: f64) -> FamilyJet {
    let rho = fp.rho;
    let (s, c) = t.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let d = rho * rho * s2 + c2;
    let sin2t = 2.0 * s * c;
    FamilyJet {
        r: (rho * t.tan()).atan() + fp.ell as f64 * PI,
        dr: rho / d,
        ddr: (rho - rho * rho * rho) * sin2t / (d * d),
        sin2r: rho * sin2t / d,
        cos2r: (c2 - rho * rho * s2) / d,
    }
}

pub fn family_eval(fp: FamilyParam, t: f64) -> Result<FamilyJet> {
    check_open_interval(t)?;
    Ok(jet_unchecked(fp, t))
}

/// `r' (1 + tan^2 r) tan t - (1 + tan^2 t) tan r`, the radial holomorphicity
/// condition. Zero for every family member, independently of the sign of rho.
pub fn holomorphicity_residual(profile: &Profile, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    let jet = profile.eval(t)?;
    let (tan_t, tan_r) = match profile {
        // tan r = rho tan t exactly, avoiding the round trip through atan
        Profile::ClosedForm { rho, .. } => (t.tan(), rho * t.tan()),
        _ => {
            if jet.r.cos().abs() < 1e-12 {
                return Err(Error::Pole { t, r: jet.r });
            }
            (t.tan(), jet.r.tan())
        }
    };
    Ok(jet.dr * (1.0 + tan_r * tan_r) * tan_t - (1.0 + tan_t * tan_t) * tan_r)
}

/// `sup_{t in [delta, pi/2)} |r_{rho,0}(t) - sign(rho) pi/2|`.
///
/// `|r_{rho,0}|` increases monotonically in `t`, so the supremum sits at
/// `t = delta` and equals `pi/2 - arctan(|rho| tan delta)`.
pub fn convergence_gap(rho: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < FRAC_PI_2) {
        return Err(Error::InvalidParams(format!("delta must lie in (0, pi/2), got {delta}")));
    }
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::InvalidParams(format!("rho must be finite and nonzero, got {rho}")));
    }
    Ok(FRAC_PI_2 - (rho.abs() * delta.tan()).atan())
}

/// `d r_{rho,0} / d rho = tan t / (1 + rho^2 tan^2 t)`.
pub fn deformation_mode(rho: f64, t: f64) -> f64 {
    let tan = t.tan();
    tan / (1.0 + rho * rho * tan * tan)
}

/// The deformation mode together with its first two `t`-derivatives.
///
/// With `D = rho^2 sin^2 t + cos^2 t` the mode is `sin 2t / (2D)`.
pub fn deformation_jet(rho: f64, t: f64) -> (f64, f64, f64) {
    let (s, c) = t.sin_cos();
    let sin2t = 2.0 * s * c;
    let cos2t = c * c - s * s;
    let rho2 = rho * rho;
    let d = rho2 * s * s + c * c;
    let dd = (rho2 - 1.0) * sin2t;
    let ddd = 2.0 * (rho2 - 1.0) * cos2t;
    // xi = N / D with N = sin 2t / 2
    let num = 0.5 * sin2t;
    let dnum = cos2t;
    let ddnum = -2.0 * sin2t;
    let xi = num / d;
    let dxi = (dnum * d - num * dd) / (d * d);
    let ddxi = (ddnum - 2.0 * dxi * dd - xi * ddd) / d;
    (xi, dxi, ddxi)
}
