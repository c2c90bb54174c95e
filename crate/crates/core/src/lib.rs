//! Equivariant harmonic self-maps of complex projective space.
//!
//! The natural action of `SU(p+1) x SU(n-p)` on `CP^n` has cohomogeneity one,
//! with orbit space `[0, pi/2]`. Maps of the form `g.gamma(t) -> g.gamma(r(t))`
//! are harmonic exactly when the profile `r` solves a singular second-order
//! ODE. This crate evaluates that ODE, the explicit solution families
//! `arctan(rho tan t) + l pi`, recovers them by two-sided shooting, and
//! computes the equivariant stability spectrum both numerically and from the
//! Jacobi-polynomial closed form.
//!
//! Module map:
//!
//! * [`geometry`]: action constants, the orbit endomorphism `P_t` and a Gram
//!   matrix oracle rebuilding it from the Fubini-Study metric.
//! * [`tension`]: profiles, the reduced ODE residual, boundary data and the
//!   Brouwer degree table.
//! * [`family`]: the closed-form solution families and their identities.
//! * [`shooting`]: series starts, adaptive integration and shooting.
//! * [`spectral`]: the Sturm-Liouville stability problem, Jacobi polynomials
//!   and index/nullity counts.

pub mod error;
pub mod family;
pub mod geometry;
pub mod shooting;
pub mod spectral;
pub mod tension;

pub use error::{Error, Result};
pub use family::FamilyParam;
pub use geometry::{OrbitEndomorphism, SpaceParams};
pub use shooting::{ShootingConfig, ShotResult};
pub use spectral::{SpectrumResult, SturmLiouvilleProblem};
pub use tension::{BoundaryData, NumericProfile, Profile};

use std::f64::consts::FRAC_PI_2;

/// Rejects `t` outside the open orbit interval `(0, pi/2)`.
pub(crate) fn check_open_interval(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 && t < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain { t })
    }
}
