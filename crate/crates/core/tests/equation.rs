use std::f64::consts::{FRAC_PI_2, PI};

use cpn_harmonic::family::{family_eval, holomorphicity_residual};
use cpn_harmonic::geometry::{gram_oracle, pt_diagonal, trace_p_inv_pdot};
use cpn_harmonic::tension::{ode_residual, ode_residual_via_traces};
use cpn_harmonic::{FamilyParam, NumericProfile, Profile, SpaceParams};
use proptest::prelude::*;

fn space() -> impl Strategy<Value = SpaceParams> {
    (1u32..9).prop_flat_map(|n| (Just(n), 0..n)).prop_map(|(n, p)| SpaceParams::new(n, p).unwrap())
}

fn interior() -> impl Strategy<Value = f64> {
    0.02..FRAC_PI_2 - 0.02
}

/// Profile holding a single exact jet at `t`.
fn jet_at(t: f64, r: f64, dr: f64, ddr: f64) -> Profile {
    Profile::Numeric(NumericProfile::new(vec![t, t + 1e-3], vec![r, r], vec![dr, dr], vec![ddr, ddr]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gram_oracle_matches_diagonal(params in space(), t in interior()) {
        let d = (gram_oracle(&params, t).unwrap() - pt_diagonal(&params, t).unwrap().to_matrix()).amax();
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn half_trace_is_first_order_coefficient(params in space(), t in interior()) {
        let m = f64::from(2 * params.n() - 2 * params.p() - 1);
        let expected = m / t.tan() - f64::from(2 * params.p() + 1) * t.tan();
        let got = 0.5 * trace_p_inv_pdot(&params, t).unwrap();
        prop_assert!((got - expected).abs() < 1e-10 * (1.0 + expected.abs()));
    }

    #[test]
    fn family_solves_equation(params in space(), rho in -20.0..20.0f64, ell in -2i64..3, t in interior()) {
        let prof = FamilyParam::new(rho, ell).unwrap().profile();
        prop_assert!(ode_residual(&params, &prof, t).unwrap().abs() < 1e-9);
        prop_assert!(ode_residual_via_traces(&params, &prof, t).unwrap().abs() < 1e-8);
    }

    #[test]
    fn family_is_holomorphic(rho in -20.0..20.0f64, t in interior()) {
        let prof = FamilyParam::new(rho, 0).unwrap().profile();
        let scale = 1.0 + rho.abs() * t.tan().powi(3) + t.tan().powi(3) / rho.abs().max(1e-3);
        prop_assert!(holomorphicity_residual(&prof, t).unwrap().abs() < 1e-13 * scale);
    }

    /// `r(t) = k pi/2 + u(pi/2 - t)` with `k` odd turns the equation for
    /// `(n, p)` into the one for `(n, n - p - 1)` without changing the residual.
    #[test]
    fn reflection_duality(
        params in space(),
        t in interior(),
        r in -3.0..3.0f64,
        dr in -5.0..5.0f64,
        ddr in -5.0..5.0f64,
        k in prop::sample::select(vec![-3i64, -1, 1, 3]),
    ) {
        let s = FRAC_PI_2 - t;
        let u = r - k as f64 * FRAC_PI_2;
        let lhs = ode_residual(&params, &jet_at(t, r, dr, ddr), t).unwrap();
        let rhs = ode_residual(&params.dual(), &jet_at(s, u, -dr, ddr), s).unwrap();
        let scale = 1.0 + dr.abs() / (t.sin() * t.cos()) + 1.0 / (t.sin() * t.cos()).powi(2);
        prop_assert!((lhs - rhs).abs() < 1e-12 * scale, "{lhs} vs {rhs}");
    }

    /// Shifting `r` by `pi` and flipping its sign both preserve the equation.
    #[test]
    fn shift_and_sign_symmetry(params in space(), t in interior(), r in -3.0..3.0f64, dr in -5.0..5.0f64, ddr in -5.0..5.0f64) {
        let base = ode_residual(&params, &jet_at(t, r, dr, ddr), t).unwrap();
        let shifted = ode_residual(&params, &jet_at(t, r + PI, dr, ddr), t).unwrap();
        let flipped = ode_residual(&params, &jet_at(t, -r, -dr, -ddr), t).unwrap();
        let scale = 1.0 + base.abs() + 1.0 / (t.sin() * t.cos()).powi(2);
        prop_assert!((base - shifted).abs() < 1e-12 * scale);
        prop_assert!((base + flipped).abs() < 1e-12 * scale);
    }
}

#[test]
fn family_jet_matches_finite_differences() {
    let fp = FamilyParam::new(2.5, 1).unwrap();
    let h = 1e-4;
    for t in [0.2, 0.7, 1.3] {
        let j = family_eval(fp, t).unwrap();
        let r = |x: f64| family_eval(fp, x).unwrap().r;
        let fd1 = (r(t + h) - r(t - h)) / (2.0 * h);
        let fd2 = (r(t + h) - 2.0 * r(t) + r(t - h)) / (h * h);
        assert!((j.dr - fd1).abs() < 1e-7);
        assert!((j.ddr - fd2).abs() < 1e-5);
        assert!((j.sin2r - (2.0 * j.r).sin()).abs() < 1e-12);
        assert!((j.cos2r - (2.0 * j.r).cos()).abs() < 1e-12);
    }
}

#[test]
fn degenerate_and_dual_parameters() {
    let s = SpaceParams::new(4, 1).unwrap();
    assert_eq!(s.dual().dual(), s);
    assert_eq!(s.codim0(), s.dual().codim1());
    let one = SpaceParams::new(1, 0).unwrap();
    assert!(one.is_degenerate());
    assert!(gram_oracle(&one, 0.4).is_ok());
}
