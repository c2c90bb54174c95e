//! The equivariant stability spectrum.
//!
//! The Jacobi operator restricted to equivariant variations is the
//! Sturm-Liouville operator `L xi = -(w xi')'/w + V xi` on `(0, pi/2)`, with
//! `w = sin^(2n-2p-1) t cos^(2p+1) t` and `V` the potential built from the
//! background profile. It is discretised by a flux-form finite difference
//! scheme with Dirichlet conditions at `eps` and `pi/2 - eps`; the similarity
//! `eta = sqrt(w) xi` makes the matrix symmetric tridiagonal.

pub mod jacobi;
pub mod tridiagonal;

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

pub use jacobi::{
    closed_spectrum, jacobi_derivative, jacobi_eval, jacobi_ode_residual, line_eigenfunction, line_transform_residual,
    line_transform_residual_with, JacobiParams,
};
pub use tridiagonal::SymTridiagonal;

use crate::family::deformation_jet;
use crate::geometry::SpaceParams;
use crate::tension::Profile;
use crate::{check_open_interval, Error, Result};

pub const DEFAULT_NULLITY_TOL: f64 = 1e-3;
pub const DEFAULT_EPS: f64 = 1e-6;
pub const MIN_GRID: usize = 16;

/// `ln w(t)`.
pub fn log_weight(params: &SpaceParams, t: f64) -> f64 {
    let m = 2.0 * params.nf() - 2.0 * params.pf() - 1.0;
    m * t.sin().ln() + (2.0 * params.pf() + 1.0) * t.cos().ln()
}

pub fn weight(params: &SpaceParams, t: f64) -> f64 {
    log_weight(params, t).exp()
}

/// The potential `2(n-p-1) cos 2r/sin^2 t - 2p cos 2r/cos^2 t + 4 cos 4r/sin^2 2t`.
pub fn potential(params: &SpaceParams, profile: &Profile, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    let j = profile.eval(t)?;
    Ok(potential_from_cos2r(params, j.cos2r, t))
}

fn potential_from_cos2r(params: &SpaceParams, cos2r: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let sin2t = 2.0 * s * c;
    let cos4r = 2.0 * cos2r * cos2r - 1.0;
    2.0 * f64::from(params.q()) * cos2r / (s * s) - 2.0 * params.pf() * cos2r / (c * c) + 4.0 * cos4r / (sin2t * sin2t)
}

/// `L xi` with `lambda = 0` at the deformation mode `d r_{rho,0} / d rho`.
pub fn zero_mode_residual(params: &SpaceParams, rho: f64, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    if !rho.is_finite() {
        return Err(Error::InvalidParams(format!("rho must be finite (got {rho})")));
    }
    let (xi, dxi, ddxi) = deformation_jet(rho, t);
    let v = potential(params, &Profile::ClosedForm { rho, ell: 0 }, t)?;
    Ok(-ddxi - params.first_order_coefficient(t) * dxi + v * xi)
}

/// Counts of eigenvalues below `-tol` and inside `[-tol, tol]`.
pub fn count_index_nullity(eigenvalues: &[f64], tol: f64) -> (usize, usize) {
    let index = eigenvalues.iter().filter(|&&l| l < -tol).count();
    let nullity = eigenvalues.iter().filter(|&&l| l.abs() <= tol).count();
    (index, nullity)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SturmLiouvilleProblem {
    params: SpaceParams,
    profile: Profile,
    grid_size: usize,
    eps: f64,
}

impl SturmLiouvilleProblem {
    /// `grid_size` interior points on `[eps, pi/2 - eps]`.
    pub fn new(params: SpaceParams, profile: Profile, grid_size: usize, eps: f64) -> Result<Self> {
        if grid_size < MIN_GRID {
            return Err(Error::InvalidParams(format!("grid size {grid_size} below the minimum {MIN_GRID}")));
        }
        if !(0.0..0.25 * FRAC_PI_2).contains(&eps) {
            return Err(Error::InvalidParams(format!("boundary offset {eps} outside [0, pi/8)")));
        }
        Ok(Self { params, profile, grid_size, eps })
    }

    /// Background `r_{rho,0}` with the default offset.
    pub fn for_family(params: SpaceParams, rho: f64, grid_size: usize) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidParams(format!("rho must be finite (got {rho})")));
        }
        Self::new(params, Profile::ClosedForm { rho, ell: 0 }, grid_size, DEFAULT_EPS)
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.eps, FRAC_PI_2 - self.eps)
    }

    pub fn step(&self) -> f64 {
        (FRAC_PI_2 - 2.0 * self.eps) / (self.grid_size + 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.step();
        (1..=self.grid_size).map(|i| self.eps + i as f64 * h).collect()
    }

    pub fn with_grid_size(&self, grid_size: usize) -> Result<Self> {
        Self::new(self.params, self.profile.clone(), grid_size, self.eps)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.params, self.profile.clone(), self.grid_size, eps)
    }

    pub fn potential(&self, t: f64) -> Result<f64> {
        potential(&self.params, &self.profile, t)
    }
}

/// The symmetric tridiagonal matrix of the discretised operator.
pub fn discretize(problem: &SturmLiouvilleProblem) -> Result<SymTridiagonal> {
    let params = problem.params();
    let h = problem.step();
    let h2 = h * h;
    let grid = problem.grid();
    let lw: Vec<f64> = grid.iter().map(|&t| log_weight(params, t)).collect();
    // ln w at the half points t_i +- h/2, i.e. eps + (i + 1/2) h for i = 0..=N
    let lw_half: Vec<f64> =
        (0..=grid.len()).map(|i| log_weight(params, problem.eps() + (i as f64 + 0.5) * h)).collect();
    let mut diag = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let flux = (lw_half[i] - lw[i]).exp() + (lw_half[i + 1] - lw[i]).exp();
        diag.push(flux / h2 + problem.potential(t)?);
    }
    let off = (0..grid.len() - 1).map(|i| -(lw_half[i + 1] - 0.5 * (lw[i] + lw[i + 1])).exp() / h2).collect();
    SymTridiagonal::new(diag, off)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Values of each eigenfunction `xi` on [`SpectrumResult::grid`],
    /// normalised so that `sum w xi^2 h = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
    pub step: f64,
    pub index: usize,
    pub nullity: usize,
    pub tol: f64,
}

impl SpectrumResult {
    pub fn with_tol(mut self, tol: f64) -> Self {
        let (index, nullity) = count_index_nullity(&self.eigenvalues, tol);
        self.index = index;
        self.nullity = nullity;
        self.tol = tol;
        self
    }

    /// `sum w xi_a xi_b h` over the grid.
    pub fn weighted_inner(&self, params: &SpaceParams, a: usize, b: usize) -> f64 {
        self.grid
            .iter()
            .zip(self.eigenvectors[a].iter().zip(&self.eigenvectors[b]))
            .map(|(&t, (x, y))| weight(params, t) * x * y * self.step)
            .sum()
    }
}

pub fn index_nullity(result: &SpectrumResult) -> (usize, usize) {
    count_index_nullity(&result.eigenvalues, result.tol)
}

/// The `count` smallest eigenvalues of the discretised problem.
pub fn eigen_smallest(problem: &SturmLiouvilleProblem, count: usize) -> Result<SpectrumResult> {
    let values = smallest_eigenvalues(problem, count)?;
    let matrix = discretize(problem)?;
    let grid = problem.grid();
    let h = problem.step();
    let mut etas: Vec<Vec<f64>> = Vec::with_capacity(count);
    for &lambda in &values {
        let v = matrix.eigenvector(lambda, &etas)?;
        etas.push(v);
    }
    let scale: Vec<f64> = grid.iter().map(|&t| (-0.5 * log_weight(problem.params(), t)).exp() / h.sqrt()).collect();
    let eigenvectors = etas.iter().map(|eta| eta.iter().zip(&scale).map(|(e, s)| e * s).collect()).collect();
    let (index, nullity) = count_index_nullity(&values, DEFAULT_NULLITY_TOL);
    Ok(SpectrumResult { eigenvalues: values, eigenvectors, grid, step: h, index, nullity, tol: DEFAULT_NULLITY_TOL })
}

/// Eigenvalues only; cheaper than [`eigen_smallest`].
pub fn smallest_eigenvalues(problem: &SturmLiouvilleProblem, count: usize) -> Result<Vec<f64>> {
    if count > problem.grid_size() / 4 {
        return Err(Error::InvalidParams(format!(
            "requested {count} eigenvalues from a grid of {}; at most a quarter of the grid is allowed",
            problem.grid_size()
        )));
    }
    let matrix = discretize(problem)?;
    (0..count).map(|k| matrix.eigenvalue(k)).collect()
}

/// Eigenvalues after Richardson extrapolation in the step and extrapolation
/// of the boundary offset to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Interior grid sizes with step `h`, `h/2`, `h/4`.
    pub grid_sizes: [usize; 3],
    /// Raw eigenvalues at offset `eps`, one row per grid size.
    pub raw: Vec<Vec<f64>>,
    /// `log2` of successive difference ratios; close to 2 in the
    /// asymptotic regime.
    pub observed_order: Vec<f64>,
    /// Change produced by the offset extrapolation.
    pub eps_correction: Vec<f64>,
    pub index: usize,
    pub nullity: usize,
    pub tol: f64,
}

impl RefinedSpectrum {
    pub fn with_tol(mut self, tol: f64) -> Self {
        let (index, nullity) = count_index_nullity(&self.eigenvalues, tol);
        self.index = index;
        self.nullity = nullity;
        self.tol = tol;
        self
    }
}

/// Raw eigenvalues on grids `N, 2N+1, 4N+3` and their two-stage extrapolation.
struct Ladder {
    sizes: [usize; 3],
    raw: Vec<Vec<f64>>,
    extrapolated: Vec<f64>,
}

fn richardson(problem: &SturmLiouvilleProblem, count: usize) -> Result<Ladder> {
    let n0 = problem.grid_size();
    let sizes = [n0, 2 * n0 + 1, 4 * n0 + 3];
    let raw =
        sizes.iter().map(|&n| smallest_eigenvalues(&problem.with_grid_size(n)?, count)).collect::<Result<Vec<_>>>()?;
    let extrapolated = (0..count)
        .map(|k| {
            let (a, b, c) = (raw[0][k], raw[1][k], raw[2][k]);
            let r1 = (4.0 * b - a) / 3.0;
            let r2 = (4.0 * c - b) / 3.0;
            (16.0 * r2 - r1) / 15.0
        })
        .collect();
    Ok(Ladder { sizes, raw, extrapolated })
}

/// Extrapolated spectrum for the problem's grid size and offset.
///
/// The offset correction assumes the shift from the Dirichlet condition at
/// `eps` scales like `eps^c`, `c` the smaller of the two singular-orbit
/// codimensions.
pub fn refined_spectrum(problem: &SturmLiouvilleProblem, count: usize) -> Result<RefinedSpectrum> {
    let Ladder { sizes: grid_sizes, raw, extrapolated: fine } = richardson(problem, count)?;
    let observed_order = (0..count)
        .map(|k| {
            let d1 = raw[0][k] - raw[1][k];
            let d2 = raw[1][k] - raw[2][k];
            (d1 / d2).abs().log2()
        })
        .collect();
    let (eigenvalues, eps_correction) = if problem.eps() > 0.0 {
        let half = richardson(&problem.with_eps(0.5 * problem.eps())?, count)?.extrapolated;
        let c = problem.params().codim0().min(problem.params().codim1()) as i32;
        let f = 2f64.powi(c);
        let ext: Vec<f64> = fine.iter().zip(&half).map(|(a, b)| (f * b - a) / (f - 1.0)).collect();
        let corr = ext.iter().zip(&fine).map(|(e, a)| e - a).collect();
        (ext, corr)
    } else {
        (fine, vec![0.0; count])
    };
    let (index, nullity) = count_index_nullity(&eigenvalues, DEFAULT_NULLITY_TOL);
    Ok(RefinedSpectrum {
        eigenvalues,
        grid_sizes,
        raw,
        observed_order,
        eps_correction,
        index,
        nullity,
        tol: DEFAULT_NULLITY_TOL,
    })
}
