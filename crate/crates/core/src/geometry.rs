//! Constants of the `SU(p+1) x SU(n-p)` action on `CP^n` and the orbit
//! endomorphism `P_t`.
//!
//! `P_t` is defined on the complement `n` of the principal isotropy algebra by
//! `Q(P_t X, Y) = g_FS(X*, Y*)` at `gamma(t) = [cos t e_1 + sin t e_{p+2}]`.
//! In the basis `(N1, N2, N3, N4, D)` it is diagonal with blocks
//! `cos^2 t` (x 2p), `sin^2 t` (x 2(n-p-1)) and `(eta^2/4) sin^2 2t` (x 1).
//! [`gram_oracle`] rebuilds the same matrix from scratch: it differentiates the
//! one-parameter subgroups at `gamma(t)` in affine coordinates and pairs the
//! resulting tangent vectors with the Fubini-Study block.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::{check_open_interval, Error, Result};

pub type Complex64 = Complex<f64>;

/// The pair `(n, p)` fixing the action, `0 <= p < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpaceParams {
    n: u32,
    p: u32,
}

impl SpaceParams {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if p >= n {
            return Err(Error::InvalidParams(format!("p must satisfy 0 <= p < n (got n = {n}, p = {p})")));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub(crate) fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    pub(crate) fn pf(&self) -> f64 {
        f64::from(self.p)
    }

    /// `n - p - 1`, the size of the second orbit block (halved).
    pub fn q(&self) -> u32 {
        self.n - self.p - 1
    }

    /// Codimension of the singular orbit through `gamma(0)`.
    pub fn codim0(&self) -> u32 {
        2 * (self.n - self.p)
    }

    /// Codimension of the singular orbit through `gamma(pi/2)`.
    pub fn codim1(&self) -> u32 {
        2 * (self.p + 1)
    }

    pub fn weyl_order(&self) -> u32 {
        2
    }

    /// `eta^2 = 2 (n-p-1)/(n-p) + 2 p/(p+1)`.
    pub fn eta_squared(&self) -> f64 {
        let (n, p) = (self.nf(), self.pf());
        2.0 * (n - p - 1.0) / (n - p) + 2.0 * p / (p + 1.0)
    }

    /// `n = 1` collapses the `D` direction (`eta = 0`); the group is trivial.
    pub fn is_degenerate(&self) -> bool {
        self.n == 1
    }

    /// The parameters seen from the other singular orbit: substituting
    /// `t -> pi/2 - t` and `r -> k pi/2 + u` with `k` odd maps the reduced
    /// equation for `(n, p)` onto the one for `(n, n-p-1)`.
    pub fn dual(&self) -> Self {
        Self { n: self.n, p: self.q() }
    }

    /// `(2n-2p-1) cot t - (2p+1) tan t`, the first-order coefficient of the
    /// reduced equation and of the stability operator.
    pub fn first_order_coefficient(&self, t: f64) -> f64 {
        let (n, p) = (self.nf(), self.pf());
        (2.0 * n - 2.0 * p - 1.0) / t.tan() - (2.0 * p + 1.0) * t.tan()
    }

    /// `p / cos^2 t - (n-p-1) / sin^2 t`, multiplying `sin 2r` in the reduced
    /// equation.
    pub fn sin2r_coefficient(&self, t: f64) -> f64 {
        let (c, s) = (t.cos(), t.sin());
        self.pf() / (c * c) - f64::from(self.q()) / (s * s)
    }

    /// Block multiplicities `(2p, 2(n-p-1), 1)`; the last is 0 when degenerate.
    pub fn multiplicities(&self) -> [usize; 3] {
        [2 * self.p as usize, 2 * self.q() as usize, usize::from(!self.is_degenerate())]
    }

    /// `dim n = 2n - 1` (0 in the degenerate case).
    pub fn orbit_dimension(&self) -> usize {
        self.multiplicities().iter().sum()
    }
}

/// The three diagonal laws of `P_s`, with the `D` block normalised to
/// `sin^2 2s` (the factor `eta^2/4` cancels from every trace `P^-1 dP`).
#[derive(Debug, Clone, Copy)]
struct Blocks([f64; 3]);

impl Blocks {
    fn value(s: f64) -> Self {
        let (c, sn, s2) = (s.cos(), s.sin(), (2.0 * s).sin());
        Self([c * c, sn * sn, s2 * s2])
    }

    fn first(s: f64) -> Self {
        let s2 = (2.0 * s).sin();
        Self([-s2, s2, 2.0 * (4.0 * s).sin()])
    }

    fn second(s: f64) -> Self {
        let c2 = (2.0 * s).cos();
        Self([-2.0 * c2, 2.0 * c2, 8.0 * (4.0 * s).cos()])
    }

    /// `sum_i m_i num_i / den_i` with the `D` direction always counted once.
    fn trace_ratio(params: &SpaceParams, num: Self, den: Self) -> f64 {
        let m = [2.0 * params.pf(), 2.0 * f64::from(params.q()), 1.0];
        (0..3).filter(|&i| m[i] > 0.0).map(|i| m[i] * num.0[i] / den.0[i]).sum()
    }
}

/// Diagonal form of `P_t` in the ordered basis `(N1, N2, N3, N4, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitEndomorphism {
    pub t: f64,
    pub block1: f64,
    pub block2: f64,
    pub block3: f64,
    pub multiplicities: [usize; 3],
}

impl OrbitEndomorphism {
    /// The diagonal, each block value repeated by its multiplicity.
    pub fn diagonal(&self) -> Vec<f64> {
        let vals = [self.block1, self.block2, self.block3];
        vals.iter().zip(self.multiplicities).flat_map(|(&v, m)| std::iter::repeat_n(v, m)).collect()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal()))
    }
}

pub fn eta_squared(params: &SpaceParams) -> f64 {
    params.eta_squared()
}

/// `P_t` from its closed form.
pub fn pt_diagonal(params: &SpaceParams, t: f64) -> Result<OrbitEndomorphism> {
    check_open_interval(t)?;
    let b = Blocks::value(t);
    Ok(OrbitEndomorphism {
        t,
        block1: b.0[0],
        block2: b.0[1],
        block3: params.eta_squared() / 4.0 * b.0[2],
        multiplicities: params.multiplicities(),
    })
}

/// `Tr(P_t^-1 dP_t/dt)`, equal to `2[(2n-2p-1) cot t - (2p+1) tan t]`.
pub fn trace_p_inv_pdot(params: &SpaceParams, t: f64) -> Result<f64> {
    check_open_interval(t)?;
    Ok(Blocks::trace_ratio(params, Blocks::first(t), Blocks::value(t)))
}

/// `Tr(P_t^-1 (dP/ds)|_{s=r})`.
pub fn trace_p_inv_pdot_shifted(params: &SpaceParams, t: f64, r: f64) -> Result<f64> {
    check_open_interval(t)?;
    Ok(Blocks::trace_ratio(params, Blocks::first(r), Blocks::value(t)))
}

/// `Tr(P_t^-1 (d^2P/ds^2)|_{s=r})`; half of it is the potential of the
/// equivariant stability operator.
pub fn trace_p_inv_pddot_shifted(params: &SpaceParams, t: f64, r: f64) -> Result<f64> {
    check_open_interval(t)?;
    Ok(Blocks::trace_ratio(params, Blocks::second(r), Blocks::value(t)))
}

/// The Fubini-Study metric at `gamma(t)` in affine coordinates, as a
/// `2n x 2n` array in the frame `(d/dz_1..d/dz_n, d/dzbar_1..d/dzbar_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBlock {
    pub t: f64,
    pub entries: DMatrix<f64>,
}

impl MetricBlock {
    pub fn at(params: &SpaceParams, t: f64) -> Result<Self> {
        check_open_interval(t)?;
        let n = params.n as usize;
        let p = params.p as usize;
        let c2 = t.cos().powi(2);
        let mut entries = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            let d = if j == p { c2 } else { 1.0 };
            let v = 0.5 * c2 * d;
            entries[(j, n + j)] = v;
            entries[(n + j, j)] = v;
        }
        Ok(Self { t, entries })
    }

    fn n(&self) -> usize {
        self.entries.nrows() / 2
    }

    /// The Hermitian pairing `h(Z, Zbar)` for `Z = sum c_j d/dz_j`.
    pub fn hermitian_norm(&self, c: &[Complex64]) -> f64 {
        let n = self.n();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += c[j] * c[k].conj() * self.entries[(j, n + k)];
            }
        }
        acc.re
    }

    /// The real metric in the frame `(d/dx_1..d/dx_n, d/dy_1..d/dy_n)`, via
    /// `d/dx = d/dz + d/dzbar` and `d/dy = i d/dz - i d/dzbar`.
    pub fn real_metric(&self) -> DMatrix<f64> {
        let n = self.n();
        let h = &self.entries;
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let (zz, zb, bz, bb) = (h[(j, k)], h[(j, n + k)], h[(n + j, k)], h[(n + j, n + k)]);
                g[(j, k)] = zz + zb + bz + bb;
                g[(n + j, n + k)] = -zz + zb + bz - bb;
                // g(d/dx_j, d/dy_k) = i (zz - zb + bz - bb), zero for a real metric
                let mixed = zz - zb + bz - bb;
                g[(j, n + k)] = mixed;
                g[(n + k, j)] = mixed;
            }
        }
        g
    }

    /// Largest coefficient of the (purely imaginary) mixed `dx/dy` block.
    pub fn mixed_block_defect(&self) -> f64 {
        let n = self.n();
        let g = self.real_metric();
        g.view((0, n), (n, n)).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    N1,
    N2,
    N3,
    N4,
    D,
}

/// One element of the `Q`-orthonormal basis of `n`, an `(n+1) x (n+1)`
/// skew-Hermitian traceless matrix. `row`/`col` are 0-based for
/// `E_{j,k}`/`F_{j,k}` and unused for `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub kind: BasisKind,
    pub row: usize,
    pub col: usize,
    pub matrix: DMatrix<Complex64>,
}

/// The ordered basis `N1, N2, N3, N4, D` of `n`.
#[derive(Debug, Clone)]
pub struct ActionBasis {
    params: SpaceParams,
    /// Positive normalisation constant of `D`; `None` when degenerate.
    pub lambda: Option<f64>,
    pub elements: Vec<BasisElement>,
}

/// `Q(X, Y) = -1/2 Re Tr(XY)`.
pub fn q_inner(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> f64 {
    -0.5 * (x * y).trace().re
}

impl ActionBasis {
    pub fn new(params: &SpaceParams) -> Self {
        let n = params.n as usize;
        let p = params.p as usize;
        let dim = n + 1;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);

        let e_mat = |j: usize, k: usize| {
            let mut m = DMatrix::zeros(dim, dim);
            m[(j, k)] = one;
            m[(k, j)] = -one;
            m
        };
        let f_mat = |j: usize, k: usize| {
            let mut m = DMatrix::zeros(dim, dim);
            m[(j, k)] = i;
            m[(k, j)] = i;
            m
        };

        let mut elements = Vec::with_capacity(params.orbit_dimension());
        let first = 1..=p;
        let second = p + 2..=n;
        for k in first.clone() {
            elements.push(BasisElement { kind: BasisKind::N1, row: 0, col: k, matrix: e_mat(0, k) });
        }
        for k in first {
            elements.push(BasisElement { kind: BasisKind::N2, row: 0, col: k, matrix: f_mat(0, k) });
        }
        for k in second.clone() {
            elements.push(BasisElement { kind: BasisKind::N3, row: p + 1, col: k, matrix: e_mat(p + 1, k) });
        }
        for k in second {
            elements.push(BasisElement { kind: BasisKind::N4, row: p + 1, col: k, matrix: f_mat(p + 1, k) });
        }

        let lambda = if params.is_degenerate() {
            None
        } else {
            let (nf, pf) = (params.nf(), params.pf());
            let s = (pf + 1.0) * (nf - pf - 1.0) + (nf - pf) * pf;
            let lambda = (2.0 / ((pf + 1.0) * (nf - pf) * s)).sqrt();
            let mut d = DMatrix::zeros(dim, dim);
            for l in 0..dim {
                let v = if l == 0 {
                    pf * (nf - pf)
                } else if l <= p {
                    pf - nf
                } else if l == p + 1 {
                    -(pf + 1.0) * (nf - pf - 1.0)
                } else {
                    pf + 1.0
                };
                d[(l, l)] = i * (lambda * v);
            }
            elements.push(BasisElement { kind: BasisKind::D, row: 0, col: 0, matrix: d });
            Some(lambda)
        };

        Self { params: *params, lambda, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Action field `X*` at `gamma(t)`, obtained by differentiating
    /// `exp(sX).gamma(t)` at `s = 0` in the chart `z_j = Z_j / Z_0`. Returned in
    /// real coordinates `(x_1..x_n, y_1..y_n)`.
    pub fn action_field(&self, index: usize, t: f64) -> Result<Vec<f64>> {
        check_open_interval(t)?;
        let n = self.params.n as usize;
        let p = self.params.p as usize;
        let mut z = nalgebra::DVector::<Complex64>::zeros(n + 1);
        z[0] = Complex64::new(t.cos(), 0.0);
        z[p + 1] = Complex64::new(t.sin(), 0.0);
        let v = &self.elements[index].matrix * &z;
        let mut out = vec![0.0; 2 * n];
        for j in 1..=n {
            let w = v[j] / z[0] - z[j] * v[0] / (z[0] * z[0]);
            out[j - 1] = w.re;
            out[n + j - 1] = w.im;
        }
        Ok(out)
    }

    /// Action fields from the closed-form table, as complex coefficients on
    /// `(d/dz_1..d/dz_n, d/dzbar_1..d/dzbar_n)`.
    pub fn coordinate_fields(&self, t: f64) -> Result<Vec<Vec<Complex64>>> {
        check_open_interval(t)?;
        let n = self.params.n as usize;
        let p = self.params.p as usize;
        let i = Complex64::new(0.0, 1.0);
        let tan = t.tan();
        let eta = self.params.eta_squared().sqrt();
        let field = |slot: usize, a: Complex64| {
            let mut v = vec![Complex64::new(0.0, 0.0); 2 * n];
            v[slot] = a;
            v[n + slot] = a.conj();
            v
        };
        Ok(self
            .elements
            .iter()
            .map(|e| match e.kind {
                BasisKind::N1 => field(e.col - 1, Complex64::new(-1.0, 0.0)),
                BasisKind::N2 => field(e.col - 1, i),
                BasisKind::N3 => field(e.col - 1, Complex64::new(-tan, 0.0)),
                BasisKind::N4 => field(e.col - 1, i * tan),
                BasisKind::D => field(p, i * (-eta * tan)),
            })
            .collect())
    }
}

/// Matrix of `P_t` in the basis `(N1, N2, N3, N4, D)` rebuilt as the Gram
/// matrix `g_FS(X_j*, X_k*)` at `gamma(t)`.
pub fn gram_oracle(params: &SpaceParams, t: f64) -> Result<DMatrix<f64>> {
    check_open_interval(t)?;
    let basis = ActionBasis::new(params);
    let g = MetricBlock::at(params, t)?.real_metric();
    let fields = (0..basis.len())
        .map(|k| basis.action_field(k, t).map(nalgebra::DVector::from_vec))
        .collect::<Result<Vec<_>>>()?;
    let m = fields.len();
    let mut gram = DMatrix::zeros(m, m);
    for a in 0..m {
        let gx = &g * &fields[a];
        for b in 0..m {
            gram[(a, b)] = gx.dot(&fields[b]);
        }
    }
    Ok(gram)
}
