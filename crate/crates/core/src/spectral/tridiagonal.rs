//! Symmetric tridiagonal matrices: Sturm-sequence bisection for eigenvalues and
//! inverse iteration for eigenvectors.

use nalgebra::DMatrix;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParams(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - e2 / d;
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut rad = 0.0;
            if i > 0 {
                rad += self.off[i - 1].abs();
            }
            if i + 1 < n {
                rad += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - rad);
            hi = hi.max(self.diag[i] + rad);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::InvalidParams(format!(
                "eigenvalue {k} requested from a {}x{} matrix",
                self.dim(),
                self.dim()
            )));
        }
        let (mut lo, mut hi) = self.bounds();
        let span = (hi - lo).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * span;
        hi += 1e-12 * span;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Solves `(T - shift) x = b` by Gaussian elimination with partial
    /// pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        // rows stored as (a0, a1, a2) = entries in columns i, i+1, i+2
        let mut rows: Vec<[f64; 3]> =
            (0..n).map(|i| [self.diag[i] - shift, if i + 1 < n { self.off[i] } else { 0.0 }, 0.0]).collect();
        let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { self.off[i - 1] } else { 0.0 }).collect();
        let mut rhs = b.to_vec();
        let scale = self.bounds().1.abs().max(self.bounds().0.abs()).max(1.0);
        let guard = f64::EPSILON * scale;
        for i in 0..n.saturating_sub(1) {
            let below = sub[i + 1];
            if below.abs() > rows[i][0].abs() {
                // swap rows i and i+1; row i+1 is (below, d, e) in columns i..i+2
                let next = [below, rows[i + 1][0], rows[i + 1][1]];
                let cur = rows[i];
                rows[i] = next;
                sub[i + 1] = cur[0];
                rows[i + 1] = [cur[1], cur[2], 0.0];
                rhs.swap(i, i + 1);
                let m = sub[i + 1] / rows[i][0];
                rows[i + 1][0] -= m * rows[i][1];
                rows[i + 1][1] -= m * rows[i][2];
                rhs[i + 1] -= m * rhs[i];
            } else {
                if rows[i][0] == 0.0 {
                    rows[i][0] = guard;
                }
                let m = below / rows[i][0];
                rows[i + 1][0] -= m * rows[i][1];
                rhs[i + 1] -= m * rhs[i];
            }
        }
        if rows[n - 1][0] == 0.0 {
            rows[n - 1][0] = guard;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= rows[i][1] * x[i + 1];
            }
            if i + 2 < n {
                v -= rows[i][2] * x[i + 2];
            }
            x[i] = v / rows[i][0];
        }
        x
    }

    /// Unit eigenvector for the eigenvalue `lambda`, orthogonalised against
    /// `previous`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.dim();
        let scale = self.bounds().1.abs().max(self.bounds().0.abs()).max(1.0);
        let shift = lambda + 4.0 * f64::EPSILON * scale;
        // deterministic, non-degenerate start
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.618_033_988_75).fract()).collect();
        normalise(&mut x);
        let mut residual = f64::INFINITY;
        for it in 0..8 {
            let mut y = self.solve_shifted(shift, &x);
            for v in previous {
                let c = dot(&y, v);
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= c * vi;
                }
            }
            if normalise(&mut y) == 0.0 || y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonConvergence { what: "inverse iteration", iterations: it + 1, residual });
            }
            x = y;
            let tx = self.apply(&x);
            residual = tx.iter().zip(&x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
            if it >= 2 && residual <= 1e-9 * scale {
                break;
            }
        }
        if residual > 1e-6 * scale {
            return Err(Error::NonConvergence { what: "inverse iteration", iterations: 8, residual });
        }
        // fix the sign: first significant component positive
        let pivot = x.iter().copied().find(|v| v.abs() > 1e-8).unwrap_or(1.0);
        if pivot < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalise(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_eigenvalues() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k).unwrap() - exact).abs() < 1e-13);
        }
        assert!(t.eigenvalue(n).is_err());
    }

    #[test]
    fn agrees_with_dense_solver() {
        let diag: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let off: Vec<f64> = (0..29).map(|i| 0.5 + ((i * 3) % 5) as f64 * 0.3).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let mut dense: Vec<f64> = t.to_dense().symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for (k, d) in dense.iter().enumerate() {
            assert!((t.eigenvalue(k).unwrap() - d).abs() < 1e-11);
        }
        let mut prev: Vec<Vec<f64>> = Vec::new();
        for k in 0..4 {
            let lam = t.eigenvalue(k).unwrap();
            let v = t.eigenvector(lam, &prev).unwrap();
            let tv = t.apply(&v);
            assert!(tv.iter().zip(&v).all(|(a, b)| (a - lam * b).abs() < 1e-9));
            for w in &prev {
                assert!(dot(&v, w).abs() < 1e-10);
            }
            prev.push(v);
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let t = laplacian(20);
        let mut last = 0;
        for i in 0..=50 {
            let c = t.count_below(-0.5 + 0.1 * i as f64);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(t.count_below(10.0), 20);
        assert_eq!(t.count_below(-1.0), 0);
    }

    #[test]
    fn shape_is_checked() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
    }
}
