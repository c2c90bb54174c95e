use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use clap::Args;
use rayon::prelude::*;

use cpn_harmonic::family::{convergence_gap, holomorphicity_residual};
use cpn_harmonic::geometry::{gram_oracle, pt_diagonal, trace_p_inv_pdot};
use cpn_harmonic::shooting::{shoot as shoot_k, shoot_slope};
use cpn_harmonic::spectral::{closed_spectrum, eigen_smallest, refined_spectrum};
use cpn_harmonic::tension::ode_residual;
use cpn_harmonic::{BoundaryData, Error, FamilyParam, Profile, ShootingConfig, SpaceParams, SturmLiouvilleProblem};

use crate::report::{Report, Value};
use crate::{OutputArgs, SpaceArgs};

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Domain { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn space(s: SpaceArgs) -> CliResult<SpaceParams> {
    Ok(SpaceParams::new(s.n, s.p)?)
}

fn nonzero_rho(rho: f64) -> CliResult<f64> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(CliError::Invalid(format!("rho must be finite and nonzero (got {rho})")));
    }
    Ok(rho)
}

/// `count` interior points of a uniform partition of `(0, pi/2)`.
fn interior(count: usize) -> CliResult<Vec<f64>> {
    if count == 0 {
        return Err(CliError::Invalid("grid must contain at least one point".into()));
    }
    Ok((1..=count).map(|i| FRAC_PI_2 * i as f64 / (count + 1) as f64).collect())
}

/// Holomorphicity residual of a closed-form member divided by the sum of the
/// magnitudes of its two terms, which grow like `tan^3 t` near `pi/2`.
fn relative_holomorphicity(profile: &Profile, rho: f64, t: f64) -> Result<f64, Error> {
    let raw = holomorphicity_residual(profile, t)?;
    let (tan_t, tan_r) = (t.tan(), rho * t.tan());
    let dr = profile.eval(t)?.dr;
    let scale = (dr * (1.0 + tan_r * tan_r) * tan_t).abs() + ((1.0 + tan_t * tan_t) * tan_r).abs();
    Ok(if scale > 0.0 { raw / scale } else { raw })
}

fn max_abs(values: impl IntoIterator<Item = Result<f64, Error>>) -> CliResult<f64> {
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(v?.abs());
    }
    Ok(worst)
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub ell: i64,
    /// Number of interior sample points.
    #[arg(long, default_value_t = 500)]
    pub grid: usize,
    /// Inner radius of the compact set used for the convergence gap.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Distance from the endpoints at which boundary values are read.
    #[arg(long, default_value_t = 1e-9)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_residual: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_holomorphic: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_boundary: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn verify(a: &VerifyArgs) -> CliResult<Report> {
    let params = space(a.space)?;
    let rho = nonzero_rho(a.rho)?;
    if !(a.eps > 0.0 && a.eps < PI / 4.0) {
        return Err(CliError::Invalid(format!("eps must lie in (0, pi/4), got {}", a.eps)));
    }
    let profile = FamilyParam::new(rho, a.ell)?.profile();
    let grid = interior(a.grid)?;
    let residual = max_abs(grid.iter().map(|&t| ode_residual(&params, &profile, t)))?;
    let holo = max_abs(grid.iter().map(|&t| relative_holomorphicity(&profile, rho, t)))?;
    let holo_raw = max_abs(grid.iter().map(|&t| holomorphicity_residual(&profile, t)))?;
    let ell_pi = a.ell as f64 * PI;
    let left = (profile.eval(a.eps)?.r - ell_pi).abs();
    let right = (profile.eval(FRAC_PI_2 - a.eps)?.r - ell_pi - rho.signum() * FRAC_PI_2).abs();
    let gap = convergence_gap(rho, a.delta)?;

    let mut report = Report::new("verify", vec!["quantity", "value", "tolerance", "pass"]);
    let mut check = |name: &str, value: f64, tol: Option<f64>| {
        let ok = tol.is_none_or(|tol| value <= tol);
        report.passed &= ok;
        report.push_row(vec![
            name.into(),
            value.into(),
            tol.map_or(Value::Empty, Value::Float),
            tol.map_or(Value::Empty, |_| ok.into()),
        ]);
    };
    check("max_ode_residual", residual, Some(a.tol_residual));
    check("max_relative_holomorphicity_residual", holo, Some(a.tol_holomorphic));
    check("boundary_gap_left", left, Some(a.tol_boundary));
    check("boundary_gap_right", right, Some(a.tol_boundary));
    check("convergence_gap", gap, None);
    report.note("n", params.n());
    report.note("p", params.p());
    report.note("rho", rho);
    report.note("ell", a.ell);
    report.note("k", 2 * a.ell + rho.signum() as i64);
    report.note("delta", a.delta);
    report.note("max_holomorphicity_residual", holo_raw);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    /// Number of eigenvalues, starting from the smallest.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Interior points of the coarsest grid; refinement adds 2N+1 and 4N+3.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Dirichlet offset from both endpoints.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Report the eigenvalues of a single grid without extrapolation.
    #[arg(long)]
    pub raw: bool,
    /// Eigenvalues within this distance of zero count towards the nullity.
    #[arg(long, default_value_t = 1e-3)]
    pub tol_null: f64,
    /// Allowed relative error against the closed-form spectrum.
    #[arg(long, default_value_t = 1e-3)]
    pub tol_closed: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn has_closed_spectrum(params: &SpaceParams, rho: f64) -> bool {
    params.n() % 2 == 1 && 2 * params.p() + 1 == params.n() && rho.abs() == 1.0
}

pub fn spectrum(a: &SpectrumArgs) -> CliResult<Report> {
    let params = space(a.space)?;
    if !a.rho.is_finite() {
        return Err(CliError::Invalid(format!("rho must be finite (got {})", a.rho)));
    }
    let problem = SturmLiouvilleProblem::for_family(params, a.rho, a.grid)?.with_eps(a.eps)?;
    let closed = has_closed_spectrum(&params, a.rho);
    let mut columns = vec!["j", "eigenvalue"];
    if closed {
        columns.extend(["closed_form", "rel_error"]);
    }
    columns.extend(["negative", "null"]);
    let mut report = Report::new("spectrum", columns);

    let eigenvalues = if a.count == 0 {
        Vec::new()
    } else if a.raw {
        eigen_smallest(&problem, a.count)?.eigenvalues
    } else {
        let refined = refined_spectrum(&problem, a.count)?;
        report.note("grid_sizes", Value::Text(format!("{:?}", refined.grid_sizes)));
        refined.eigenvalues
    };
    for (j, &lam) in eigenvalues.iter().enumerate() {
        let mut row = vec![Value::from(j), lam.into()];
        if closed {
            let exact = closed_spectrum(params.n(), j as u32)?;
            let err = (lam - exact).abs() / exact.abs().max(1.0);
            report.passed &= err <= a.tol_closed;
            row.extend([exact.into(), err.into()]);
        }
        row.extend([Value::from(lam < -a.tol_null), Value::from(lam.abs() <= a.tol_null)]);
        report.push_row(row);
    }
    report.note("n", params.n());
    report.note("p", params.p());
    report.note("rho", a.rho);
    report.note("index", eigenvalues.iter().filter(|&&l| l < -a.tol_null).count());
    report.note("nullity", eigenvalues.iter().filter(|&&l| l.abs() <= a.tol_null).count());
    report.note("refined", !a.raw);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Target winding r(pi/2) = k pi/2; must be odd.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Integrate a single trajectory with this initial slope.
    #[arg(long, allow_negative_numbers = true)]
    pub slope: Option<f64>,
    /// Slope bracket searched when matching k.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bracket: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_terminal: f64,
    /// Allowed equation residual of the computed profile.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_residual: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_abs: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_rel: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn shoot(a: &ShootArgs) -> CliResult<Report> {
    let params = space(a.space)?;
    let mut cfg = ShootingConfig {
        terminal_tol: a.tol_terminal,
        abs_tol: a.tol_abs,
        rel_tol: a.tol_rel,
        ..ShootingConfig::default()
    };
    let boundary = match (a.k, a.slope) {
        (Some(k), _) => BoundaryData::new(k)?,
        (None, Some(s)) => BoundaryData::new(if s < 0.0 { -1 } else { 1 })?,
        (None, None) => return Err(CliError::Invalid("one of --k or --slope is required".into())),
    };
    match &a.bracket {
        Some(b) => cfg.bracket = (b[0], b[1]),
        // positive slopes end at +pi/2, negative ones at -pi/2
        None if boundary.k() < 0 => cfg.bracket = (-cfg.bracket.1, -cfg.bracket.0),
        None => {}
    }
    cfg.validate()?;
    let shot = match a.slope {
        Some(s) => shoot_slope(&params, s, boundary, &cfg)?,
        None => shoot_k(&params, boundary, &cfg)?,
    };

    let mut report = Report::new("shoot", vec!["t", "r", "dr", "ddr"]);
    let prof = &shot.profile;
    for i in 0..prof.len() {
        report.push_row(vec![
            prof.grid()[i].into(),
            prof.values()[i].into(),
            prof.derivatives()[i].into(),
            prof.second_derivatives()[i].into(),
        ]);
    }
    let residual_ok = shot.max_residual <= a.tol_residual;
    report.passed = residual_ok && (a.slope.is_some() || shot.converged);
    report.note("n", params.n());
    report.note("p", params.p());
    report.note("k", boundary.k());
    report.note("slope", shot.slope);
    report.note("terminal_value", shot.terminal_value);
    report.note("terminal_gap", shot.terminal_gap);
    report.note("converged", shot.converged);
    report.note("iterations", shot.iterations);
    report.note("join_defect", shot.join_defect);
    report.note("max_residual", shot.max_residual);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepQuantity {
    Residual,
    Spectrum,
    Gap,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub what: SweepQuantity,
    #[arg(long = "n", default_value_t = 3)]
    pub n: u32,
    #[arg(long = "p", default_value_t = 1)]
    pub p: u32,
    /// Range `lo:hi` (uniform) or `lo:hi:log` (geometric), or a single value.
    /// `lo > hi` gives an empty sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: String,
    /// Number of points in the range.
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Grid size: sample points for `residual`, base grid for `spectrum`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Eigenvalues per spectrum.
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_residual: f64,
    /// Smallest eigenvalue accepted as non-negative.
    #[arg(long, default_value_t = 1e-3)]
    pub tol_stability: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol_null: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_range(text: &str, points: usize) -> CliResult<Vec<f64>> {
    let bad = || CliError::Invalid(format!("malformed range `{text}`; expected lo:hi or lo:hi:log"));
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let (lo, hi, log) = match parts.as_slice() {
        [v] => return Ok(if points == 0 { Vec::new() } else { vec![num(v)?] }),
        [lo, hi] => (num(lo)?, num(hi)?, false),
        [lo, hi, "log"] => (num(lo)?, num(hi)?, true),
        _ => return Err(bad()),
    };
    if log && (lo <= 0.0 || hi <= 0.0) {
        return Err(CliError::Invalid(format!("a log range needs positive ends (got {lo}:{hi})")));
    }
    if points == 0 || lo > hi {
        return Ok(Vec::new());
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let s = i as f64 / last;
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else if log {
                (lo.ln() + s * (hi.ln() - lo.ln())).exp()
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect())
}

pub fn sweep(a: &SweepArgs) -> CliResult<Report> {
    let params = space(SpaceArgs { n: a.n, p: a.p })?;
    let rhos = parse_range(&a.rho, a.points)?;
    let mut report = match a.what {
        SweepQuantity::Gap => {
            if !(a.delta > 0.0 && a.delta < FRAC_PI_2) {
                return Err(CliError::Invalid(format!("delta must lie in (0, pi/2), got {}", a.delta)));
            }
            let mut report = Report::new("sweep", vec!["rho", "delta", "gap"]);
            for &rho in &rhos {
                report.push_row(vec![rho.into(), a.delta.into(), convergence_gap(rho, a.delta)?.into()]);
            }
            report
        }
        SweepQuantity::Residual => {
            let grid = interior(a.grid.unwrap_or(500))?;
            let rows: Vec<(f64, f64)> = rhos
                .par_iter()
                .map(|&rho| {
                    let prof = Profile::ClosedForm { rho, ell: 0 };
                    let res = max_abs(grid.iter().map(|&t| ode_residual(&params, &prof, t)))?;
                    let holo = max_abs(grid.iter().map(|&t| relative_holomorphicity(&prof, rho, t)))?;
                    Ok((res, holo))
                })
                .collect::<CliResult<_>>()?;
            let mut report = Report::new("sweep", vec!["rho", "max_residual", "max_relative_holomorphicity"]);
            for (&rho, (res, holo)) in rhos.iter().zip(rows) {
                report.passed &= res <= a.tol_residual && holo <= a.tol_residual;
                report.push_row(vec![rho.into(), res.into(), holo.into()]);
            }
            report
        }
        SweepQuantity::Spectrum => {
            let grid = a.grid.unwrap_or(400);
            let spectra: Vec<Vec<f64>> = rhos
                .par_iter()
                .map(|&rho| {
                    let problem = SturmLiouvilleProblem::for_family(params, rho, grid)?;
                    Ok(refined_spectrum(&problem, a.count)?.eigenvalues)
                })
                .collect::<CliResult<_>>()?;
            const LAMBDA: [&str; 8] =
                ["lambda_0", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "lambda_5", "lambda_6", "lambda_7"];
            if a.count == 0 || a.count > LAMBDA.len() {
                return Err(CliError::Invalid(format!("count must lie in 1..={} for a sweep", LAMBDA.len())));
            }
            let mut columns = vec!["rho", "min_eigenvalue", "index", "nullity"];
            columns.extend(&LAMBDA[..a.count]);
            let mut report = Report::new("sweep", columns);
            for (&rho, eig) in rhos.iter().zip(spectra) {
                let min = eig[0];
                report.passed &= min >= -a.tol_stability;
                let mut row = vec![
                    rho.into(),
                    min.into(),
                    eig.iter().filter(|&&l| l < -a.tol_null).count().into(),
                    eig.iter().filter(|&&l| l.abs() <= a.tol_null).count().into(),
                ];
                row.extend(eig.into_iter().map(Value::Float));
                report.push_row(row);
            }
            report
        }
    };
    report.note("n", params.n());
    report.note("p", params.p());
    report.note("points", rhos.len());
    Ok(report)
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Number of interior sample points.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_oracle: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_trace: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn oracle(a: &OracleArgs) -> CliResult<Report> {
    let params = space(a.space)?;
    let mut report = Report::new("oracle", vec!["t", "gram_deviation", "trace_deviation"]);
    let (mut worst_gram, mut worst_trace) = (0.0f64, 0.0f64);
    for t in interior(a.grid)? {
        let gram = (gram_oracle(&params, t)? - pt_diagonal(&params, t)?.to_matrix()).amax();
        let trace = (0.5 * trace_p_inv_pdot(&params, t)? - params.first_order_coefficient(t)).abs();
        worst_gram = worst_gram.max(gram);
        worst_trace = worst_trace.max(trace);
        report.push_row(vec![t.into(), gram.into(), trace.into()]);
    }
    report.passed = worst_gram <= a.tol_oracle && worst_trace <= a.tol_trace;
    report.note("n", params.n());
    report.note("p", params.p());
    report.note("max_gram_deviation", worst_gram);
    report.note("max_trace_deviation", worst_trace);
    Ok(report)
}
