//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpn_harmonic::family::convergence_gap;
use cpn_harmonic::geometry::{gram_oracle, pt_diagonal, trace_p_inv_pdot};
use cpn_harmonic::shooting::{integrate, ShootingConfig};
use cpn_harmonic::spectral::{
    closed_spectrum, eigen_smallest, jacobi_ode_residual, line_transform_residual, refined_spectrum,
    zero_mode_residual, JacobiParams, SturmLiouvilleProblem,
};
use cpn_harmonic::tension::{brouwer_degree, ode_residual, Parity};
use cpn_harmonic::{Profile, SpaceParams};

const NP_SET: [(u32, u32); 5] = [(2, 0), (3, 1), (4, 2), (5, 0), (7, 3)];
const SPECTRAL_SET: [(u32, u32); 6] = [(2, 0), (3, 1), (4, 2), (5, 0), (5, 2), (7, 3)];
const RHOS: [f64; 8] = [0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn sp(n: u32, p: u32) -> SpaceParams {
    SpaceParams::new(n, p).expect("valid parameters")
}

/// `count` interior points of a uniform partition of `(0, pi/2)`.
fn interior(count: usize) -> impl Iterator<Item = f64> {
    (1..=count).map(move |i| FRAC_PI_2 * i as f64 / (count + 1) as f64)
}

fn closed_form_residuals() -> Outcome {
    let mut worst = 0.0f64;
    for (n, p) in NP_SET {
        for rho in [0.1, -0.1, 1.0, -1.0, 10.0, -10.0] {
            for ell in [-1, 0, 1] {
                let prof = Profile::ClosedForm { rho, ell };
                for t in interior(500) {
                    worst = worst.max(ode_residual(&sp(n, p), &prof, t).unwrap().abs());
                }
            }
        }
    }
    outcome(worst < 1e-9, format!("max |residual| = {worst:.3e} (bound 1e-9)"))
}

fn gram_oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for (n, p) in NP_SET {
        for t in interior(50) {
            let gram = gram_oracle(&sp(n, p), t).unwrap();
            let diag = pt_diagonal(&sp(n, p), t).unwrap().to_matrix();
            worst = worst.max((gram - diag).amax());
        }
    }
    outcome(worst < 1e-12, format!("max entry difference = {worst:.3e} (bound 1e-12)"))
}

fn trace_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (n, p) in NP_SET {
        let params = sp(n, p);
        let m = f64::from(2 * n - 2 * p - 1);
        let k = f64::from(2 * p + 1);
        for t in interior(50) {
            let formula = m / t.tan() - k * t.tan();
            let lib = 0.5 * trace_p_inv_pdot(&params, t).unwrap();
            // recomputed from the diagonal of P_t and the derivatives of its
            // three block functions
            let pt = pt_diagonal(&params, t).unwrap();
            let [m1, m2, m3] = params.multiplicities();
            let d1 = -(2.0 * t).sin() / pt.block1;
            let d2 = (2.0 * t).sin() / pt.block2;
            let d3 = 2.0 * (4.0 * t).sin() / (2.0 * t).sin().powi(2);
            let from_blocks = 0.5 * (m1 as f64 * d1 + m2 as f64 * d2 + m3 as f64 * d3);
            worst = worst.max((lib - formula).abs()).max((from_blocks - formula).abs());
        }
    }
    outcome(worst < 1e-10, format!("max deviation = {worst:.3e} (bound 1e-10)"))
}

fn shooting_recovery() -> Outcome {
    let cfg = ShootingConfig::default();
    let lo = 2.0 * cfg.t_start;
    let hi = FRAC_PI_2 - 2.0 * cfg.t_end_offset;
    let mut sup = 0.0f64;
    let mut residual = 0.0f64;
    for (n, p) in SPECTRAL_SET {
        for a in [0.25, -0.25, 1.0, -1.0, 4.0, -4.0] {
            let integ = match integrate(&sp(n, p), a, &cfg) {
                Ok(i) => i,
                Err(e) => return outcome(false, format!("({n},{p}) a={a}: {e}")),
            };
            let prof = Profile::Numeric(integ.profile.clone());
            let grid = integ.profile.grid();
            let mut points: Vec<f64> = grid.to_vec();
            points.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            for t in points {
                let r = prof.eval(t).unwrap().r;
                sup = sup.max((r - (a * t.tan()).atan()).abs());
            }
            residual = residual.max(integ.max_residual(lo, hi).unwrap());
        }
    }
    outcome(
        sup < 1e-6 && residual < 1e-6,
        format!(
            "sup |r - arctan(a tan t)| = {sup:.3e}, max residual on [2eps, pi/2-2eps] = {residual:.3e} (bounds 1e-6)"
        ),
    )
}

fn equivariant_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for n in [3u32, 5, 7] {
        let prob = SturmLiouvilleProblem::for_family(sp(n, (n - 1) / 2), 1.0, 2000).unwrap();
        let res = refined_spectrum(&prob, 4).unwrap();
        for (j, &lam) in res.eigenvalues.iter().enumerate() {
            let exact = closed_spectrum(n, j as u32).unwrap();
            // relative error, absolute for the zero eigenvalue
            let err = (lam - exact).abs() / exact.abs().max(1.0);
            worst = worst.max(err);
        }
        lines.push(format!("n={n}: {:.6?}", res.eigenvalues));
    }
    outcome(worst < 1e-3, format!("max relative error = {worst:.3e} (bound 1e-3); {}", lines.join("; ")))
}

fn weak_stability() -> Outcome {
    let mut smallest = f64::INFINITY;
    let mut asym = 0.0f64;
    for (n, p) in SPECTRAL_SET {
        for rho in [0.5, 1.0, 2.0, 5.0] {
            let pos = refined_spectrum(&SturmLiouvilleProblem::for_family(sp(n, p), rho, 1000).unwrap(), 3).unwrap();
            let neg = refined_spectrum(&SturmLiouvilleProblem::for_family(sp(n, p), -rho, 1000).unwrap(), 3).unwrap();
            smallest = smallest.min(pos.eigenvalues[0]).min(neg.eigenvalues[0]);
            for (a, b) in pos.eigenvalues.iter().zip(&neg.eigenvalues) {
                asym = asym.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    outcome(
        smallest >= -1e-3 && asym < 1e-8,
        format!("smallest eigenvalue = {smallest:.3e} (bound -1e-3), max rho/-rho mismatch = {asym:.3e} (bound 1e-8)"),
    )
}

fn zero_mode() -> Outcome {
    let mut worst = 0.0f64;
    let mut min_nullity = usize::MAX;
    for (n, p) in SPECTRAL_SET {
        for rho in RHOS {
            for t in interior(200) {
                worst = worst.max(zero_mode_residual(&sp(n, p), rho, t).unwrap().abs());
            }
            let prob = SturmLiouvilleProblem::for_family(sp(n, p), rho, 1000).unwrap();
            min_nullity = min_nullity.min(eigen_smallest(&prob, 3).unwrap().nullity);
            min_nullity = min_nullity.min(refined_spectrum(&prob, 3).unwrap().nullity);
        }
    }
    outcome(
        worst < 1e-8 && min_nullity >= 1,
        format!("max |L xi| = {worst:.3e} (bound 1e-8), smallest reported nullity = {min_nullity}"),
    )
}

fn jacobi() -> Outcome {
    let mut ode = 0.0f64;
    let mut line = 0.0f64;
    for n in [3u32, 5, 7] {
        for j in 0..=10 {
            let jp = JacobiParams::symmetric_for(n, j).unwrap();
            for i in 0..=200 {
                let y = -1.0 + 2.0 * f64::from(i) / 200.0;
                ode = ode.max(jacobi_ode_residual(jp, y).abs());
                let x = -10.0 + 20.0 * f64::from(i) / 200.0;
                line = line.max(line_transform_residual(n, j, x).unwrap().abs());
            }
        }
    }
    outcome(
        ode < 1e-8 && line < 1e-8,
        format!("Jacobi equation residual = {ode:.3e}, line-form residual = {line:.3e} (bounds 1e-8)"),
    )
}

fn convergence() -> Outcome {
    let delta: f64 = 0.1;
    let gap = convergence_gap(100.0, delta).unwrap();
    let formula = FRAC_PI_2 - (100.0 * delta.tan()).atan();
    // supremum of |r - pi/2| sampled over [delta, pi/2)
    let sampled = (0..=20_000)
        .map(|i| delta + (FRAC_PI_2 - delta) * f64::from(i) / 20_001.0)
        .map(|t| (FRAC_PI_2 - (100.0 * t.tan()).atan()).abs())
        .fold(0.0, f64::max);
    let rhos: Vec<f64> = (0..=40).map(|i| 100.0 * 10f64.powf(f64::from(i) / 20.0)).collect();
    let gaps: Vec<f64> = rhos.iter().map(|&r| convergence_gap(r, delta).unwrap()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = gaps[gaps.len() - 1];
    let passed = (gap - formula).abs() < 1e-9
        && (gap - sampled).abs() < 1e-9
        && (gap - 0.0993).abs() < 1e-4
        && monotone
        && last < 1e-3;
    outcome(passed, format!("gap(100, 0.1) = {gap:.12}, monotone = {monotone}, gap(1e4, 0.1) = {last:.6e}"))
}

fn degree_table() -> Outcome {
    use Parity::{Even, Odd};
    // (codim0, codim1, |W|, k, j parity, expected degree)
    let cells: [(u32, u32, u32, i64, Parity, i64); 12] = [
        (3, 5, 2, 3, Even, 3),
        (3, 4, 2, 3, Even, 1),
        (4, 3, 2, 3, Even, 1),
        (4, 6, 2, 3, Even, 1),
        (3, 5, 2, 2, Odd, 2),
        (3, 4, 2, 2, Odd, 1),
        (4, 6, 2, 2, Odd, 0),
        (4, 6, 4, 3, Odd, 1),
        (4, 6, 8, 5, Odd, 1),
        (4, 3, 2, 2, Odd, -1),
        (4, 3, 4, 3, Odd, -1),
        (4, 3, 8, 5, Odd, 1),
    ];
    let mut bad = Vec::new();
    for (c0, c1, w, k, j, want) in cells {
        match brouwer_degree(c0, c1, w, k, j) {
            Ok(d) if d == want => {}
            other => bad.push(format!("({c0},{c1},|W|={w},k={k},{j:?}) -> {other:?}, expected {want}")),
        }
    }
    let mut action_ok = true;
    for (n, p) in NP_SET {
        let params = sp(n, p);
        for k in [-3i64, -1, 1, 3, 5] {
            let d = brouwer_degree(params.codim0(), params.codim1(), params.weyl_order(), k, Even);
            action_ok &= d == Ok(1);
        }
    }
    let passed = bad.is_empty() && action_ok;
    let detail = if passed {
        "12/12 cells reproduced; degree +1 for every admissible k of this action".to_string()
    } else {
        format!("mismatches: {}; action degree +1: {action_ok}", bad.join(", "))
    };
    outcome(passed, detail)
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Option<f64>, Check); 10] = [
        ("closed-form solutions satisfy the reduced equation", Some(1.0), closed_form_residuals),
        ("Gram construction equals the diagonal orbit endomorphism", Some(1.0), gram_oracle_equivalence),
        ("trace identity for the first-order coefficient", None, trace_identity),
        ("shooting recovers the closed-form family", Some(10.0), shooting_recovery),
        ("equivariant spectrum 4j(j+n+2)", Some(60.0), equivariant_spectrum),
        ("equivariant weak stability and rho symmetry", None, weak_stability),
        ("deformation zero mode and nullity", None, zero_mode),
        ("Jacobi polynomials and the line form", None, jacobi),
        ("convergence gap on compacta", None, convergence),
        ("Brouwer degree table", None, degree_table),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= Duration::from_secs_f64(l));
        let passed = out.passed && in_time;
        if !passed {
            failures += 1;
        }
        let timing = match limit {
            Some(l) => format!("{:.3} s, limit {l} s", elapsed.as_secs_f64()),
            None => format!("{:.3} s", elapsed.as_secs_f64()),
        };
        println!("{} criterion {:>2}: {name}: {} [{timing}]", if passed { "PASS" } else { "FAIL" }, i + 1, out.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
