//! Jacobi polynomials and the closed-form eigenfunctions on the line.

use serde::Serialize;

use crate::{Error, Result};

pub const MAX_DEGREE: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
    degree: u32,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64, degree: u32) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParams(format!("Jacobi parameters must exceed -1 (got {alpha}, {beta})")));
        }
        if degree > MAX_DEGREE {
            return Err(Error::InvalidParams(format!("Jacobi degree {degree} exceeds the cap {MAX_DEGREE}")));
        }
        Ok(Self { alpha, beta, degree })
    }

    /// The symmetric family `alpha = beta = (n+1)/2` used on the line.
    pub fn symmetric_for(n: u32, degree: u32) -> Result<Self> {
        let a = 0.5 * (f64::from(n) + 1.0);
        Self::new(a, a, degree)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// `P_j^(alpha, beta)(y)` by the three-term recurrence.
pub fn jacobi_eval(jp: JacobiParams, y: f64) -> f64 {
    recurrence(jp.alpha, jp.beta, jp.degree, y)
}

fn recurrence(a: f64, b: f64, degree: u32, y: f64) -> f64 {
    if degree == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * y;
    for k in 2..=degree {
        let k = f64::from(k);
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * y + a * a - b * b);
        let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^order/dy^order P_j^(alpha, beta)(y)`, from
/// `P_j' = (j + alpha + beta + 1)/2 P_{j-1}^(alpha+1, beta+1)`.
pub fn jacobi_derivative(jp: JacobiParams, y: f64, order: u32) -> f64 {
    if order > jp.degree {
        return 0.0;
    }
    let mut factor = 1.0;
    let (mut a, mut b, mut j) = (jp.alpha, jp.beta, jp.degree);
    for _ in 0..order {
        factor *= 0.5 * (f64::from(j) + a + b + 1.0);
        a += 1.0;
        b += 1.0;
        j -= 1;
    }
    factor * recurrence(a, b, j, y)
}

/// Left side of the Jacobi equation
/// `(1-y^2) u'' + [beta - alpha - (alpha+beta+2) y] u' + j(j+1+alpha+beta) u`.
pub fn jacobi_ode_residual(jp: JacobiParams, y: f64) -> f64 {
    let (a, b, j) = (jp.alpha, jp.beta, f64::from(jp.degree));
    let u = jacobi_eval(jp, y);
    let du = jacobi_derivative(jp, y, 1);
    let ddu = jacobi_derivative(jp, y, 2);
    (1.0 - y * y) * ddu + (b - a - (a + b + 2.0) * y) * du + j * (j + 1.0 + a + b) * u
}

/// `4j(j+n+2)`, the equivariant eigenvalues of the `|rho| = 1` background.
pub fn closed_spectrum(n: u32, j: u32) -> Result<f64> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("closed-form spectrum needs odd n (got {n})")));
    }
    let (n, j) = (f64::from(n), f64::from(j));
    Ok(4.0 * j * (j + n + 2.0))
}

/// `xi_j(x) = sech x P_j(tanh x)` with its first two derivatives.
pub fn line_eigenfunction(n: u32, j: u32, x: f64) -> Result<(f64, f64, f64)> {
    let jp = JacobiParams::symmetric_for(n, j)?;
    let y = x.tanh();
    let sech = 1.0 / x.cosh();
    let s2 = sech * sech;
    let (u, du, ddu) = (jacobi_eval(jp, y), jacobi_derivative(jp, y, 1), jacobi_derivative(jp, y, 2));
    // d/dx u(tanh x) = s2 u',  d2/dx2 = s2^2 u'' - 2 y s2 u'
    let f = u;
    let df = s2 * du;
    let ddf = s2 * s2 * ddu - 2.0 * y * s2 * du;
    // sech' = -y sech,  sech'' = sech (y^2 - s2)
    let xi = sech * f;
    let dxi = sech * (df - y * f);
    let ddxi = sech * (ddf - 2.0 * y * df + (y * y - s2) * f);
    Ok((xi, dxi, ddxi))
}

/// The line-coordinate eigenvalue equation
/// `xi'' - (n-1) tanh x xi' - n tanh^2 x xi + (lambda/4 + 1) sech^2 x xi`
/// at the closed-form eigenfunction, for an explicit `lambda`.
pub fn line_transform_residual_with(n: u32, j: u32, lambda: f64, x: f64) -> Result<f64> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("line form needs odd n (got {n})")));
    }
    if x.is_nan() || x.abs() > 20.0 {
        return Err(Error::InvalidParams(format!("line coordinate {x} outside [-20, 20]")));
    }
    let (xi, dxi, ddxi) = line_eigenfunction(n, j, x)?;
    let nf = f64::from(n);
    let y = x.tanh();
    let s2 = 1.0 / x.cosh().powi(2);
    Ok(ddxi - (nf - 1.0) * y * dxi - nf * y * y * xi + (0.25 * lambda + 1.0) * s2 * xi)
}

/// [`line_transform_residual_with`] at `lambda = 4j(j+n+2)`.
pub fn line_transform_residual(n: u32, j: u32, x: f64) -> Result<f64> {
    line_transform_residual_with(n, j, closed_spectrum(n, j)?, x)
}

/// `x = ln tan t`, the line coordinate.
pub fn line_coordinate(t: f64) -> f64 {
    t.tan().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(a: f64, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (a - f64::from(i)) / f64::from(i + 1))
    }

    /// Explicit sum `sum_s C(j+a, j-s) C(j+b, s) ((y-1)/2)^s ((y+1)/2)^(j-s)`.
    fn explicit(a: f64, b: f64, j: u32, y: f64) -> f64 {
        (0..=j)
            .map(|s| {
                binom(f64::from(j) + a, j - s)
                    * binom(f64::from(j) + b, s)
                    * (0.5 * (y - 1.0)).powi(s as i32)
                    * (0.5 * (y + 1.0)).powi((j - s) as i32)
            })
            .sum()
    }

    #[test]
    fn low_degrees() {
        let jp = JacobiParams::new(2.0, 2.0, 1).unwrap();
        assert!((jacobi_eval(jp, 0.5) - 1.5).abs() < 1e-15);
        for y in [-1.0, -0.3, 0.0, 0.9] {
            assert_eq!(jacobi_eval(JacobiParams::new(0.7, -0.4, 0).unwrap(), y), 1.0);
        }
        // Legendre P_2 = (3y^2 - 1)/2
        let leg = JacobiParams::new(0.0, 0.0, 2).unwrap();
        assert!((jacobi_eval(leg, 0.3) - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn endpoint_value() {
        // P_j(1) = C(j+alpha, j)
        for j in 0..=12 {
            let jp = JacobiParams::new(2.5, 1.0, j).unwrap();
            let want = binom(f64::from(j) + 2.5, j);
            assert!((jacobi_eval(jp, 1.0) - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(JacobiParams::new(-1.0, 0.0, 1).is_err());
        assert!(JacobiParams::new(0.0, f64::NAN, 1).is_err());
        assert!(JacobiParams::new(0.0, 0.0, 51).is_err());
        assert!(JacobiParams::new(0.0, 0.0, 50).is_ok());
    }

    #[test]
    fn ode_residual_small_for_all_needed_degrees() {
        for n in [3u32, 5, 7] {
            for j in 0..=10 {
                let jp = JacobiParams::symmetric_for(n, j).unwrap();
                for i in 0..20 {
                    let y = -1.0 + 2.0 * f64::from(i) / 19.0;
                    assert!(jacobi_ode_residual(jp, y).abs() < 1e-8, "n={n} j={j} y={y}");
                }
            }
        }
    }

    #[test]
    fn finite_difference_derivatives() {
        let jp = JacobiParams::new(2.0, 2.0, 6).unwrap();
        let h = 1e-5;
        for y in [-0.8, -0.1, 0.4, 0.75] {
            let fd1 = (jacobi_eval(jp, y + h) - jacobi_eval(jp, y - h)) / (2.0 * h);
            let fd2 = (jacobi_eval(jp, y + h) - 2.0 * jacobi_eval(jp, y) + jacobi_eval(jp, y - h)) / (h * h);
            assert!((fd1 - jacobi_derivative(jp, y, 1)).abs() < 1e-6);
            assert!((fd2 - jacobi_derivative(jp, y, 2)).abs() < 1e-3);
        }
        assert_eq!(jacobi_derivative(jp, 0.3, 7), 0.0);
    }

    #[test]
    fn closed_spectrum_values() {
        assert_eq!(closed_spectrum(3, 0).unwrap(), 0.0);
        assert_eq!(closed_spectrum(3, 1).unwrap(), 24.0);
        assert_eq!(closed_spectrum(7, 2).unwrap(), 88.0);
        assert!(closed_spectrum(4, 1).is_err());
    }

    #[test]
    fn line_residuals() {
        for x in [-20.0, -3.0, 0.0, 0.4, 5.0] {
            assert!(line_transform_residual(3, 0, x).unwrap().abs() < 1e-10);
        }
        assert!(line_transform_residual(3, 1, 0.7).unwrap().abs() < 1e-8);
        let wrong = line_transform_residual_with(3, 0, 1.0, 0.0).unwrap();
        assert!((wrong - 0.25).abs() < 1e-15);
        assert!(line_transform_residual(3, 1, 20.5).is_err());
        assert!(line_transform_residual(4, 1, 0.0).is_err());
    }

    #[test]
    fn eigenfunctions_have_j_zeros() {
        for n in [3u32, 5, 7] {
            for j in 0..=6 {
                let xs: Vec<f64> = (0..4000).map(|i| -10.0 + 20.0 * (f64::from(i) + 0.37) / 4000.0).collect();
                let vals: Vec<f64> = xs.iter().map(|&x| line_eigenfunction(n, j, x).unwrap().0).collect();
                let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
                assert_eq!(changes, j as usize, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn line_coordinate_maps_quarter_to_zero() {
        assert!(line_coordinate(std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((line_coordinate(1.0_f64.exp().atan()) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn recurrence_matches_explicit_sum(a in -0.9f64..5.0, b in -0.9f64..5.0, j in 0u32..12, y in -1.0f64..1.0) {
            let jp = JacobiParams::new(a, b, j).unwrap();
            let got = jacobi_eval(jp, y);
            let want = explicit(a, b, j, y);
            prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
        }

        #[test]
        fn symmetry_under_reflection(a in -0.9f64..4.0, b in -0.9f64..4.0, j in 0u32..15, y in -1.0f64..1.0) {
            // P_j^(a,b)(-y) = (-1)^j P_j^(b,a)(y)
            let l = jacobi_eval(JacobiParams::new(a, b, j).unwrap(), -y);
            let r = jacobi_eval(JacobiParams::new(b, a, j).unwrap(), y);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((l - sign * r).abs() <= 1e-10 * l.abs().max(1.0));
        }

        #[test]
        fn line_residual_vanishes(n in prop::sample::select(vec![3u32, 5, 7]), j in 0u32..=10, x in -10.0f64..10.0) {
            prop_assert!(line_transform_residual(n, j, x).unwrap().abs() < 1e-8);
        }
    }
}
