//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use super::matrix::{CMatrix, Cplx, ZERO};
use crate::error::{Error, Result};

/// Symmetry tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, stored as the columns of a unitary.
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, i: usize) -> Vec<Cplx> {
        self.vectors.column(i)
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Diagonalises a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius mass drops below
/// `1e-13 * max(1, ‖m‖_F)`.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let scale = m.max_abs().max(1.0);
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }

    let n = m.rows();
    // symmetrise so the rotations see an exactly Hermitian input
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let threshold = 1e-13 * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) block
    let g_pp = Cplx::new(c, 0.0);
    let g_pq = Cplx::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    // A ← A G (columns)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G† A (rows)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Cplx::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Cplx::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Polar unitary `W` of a square matrix `K = W |K|`.
///
/// On the kernel of `K` the factor is completed arbitrarily; anything
/// multiplied by `|K|` is unaffected by that choice.
pub fn polar_unitary(k: &CMatrix) -> Result<CMatrix> {
    let n = k.rows();
    let gram = k.adjoint().matmul(k);
    let eig = hermitian_eig(&gram)?;
    let smax = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cutoff = 1e-10 * smax.max(1e-300);
    let mut left: Vec<Vec<Cplx>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<Cplx>> = Vec::with_capacity(n);
    for i in 0..n {
        let sigma = eig.values[i].max(0.0).sqrt();
        if sigma <= cutoff {
            break;
        }
        let vi = eig.vector(i);
        let mut ui = k.mul_vec(&vi);
        for z in ui.iter_mut() {
            *z /= sigma;
        }
        // re-orthogonalise against earlier columns to absorb round-off
        for u in &left {
            let ov = super::matrix::inner(u, &ui);
            for (a, b) in ui.iter_mut().zip(u) {
                *a -= ov * b;
            }
        }
        let nu = super::matrix::norm(&ui);
        for z in ui.iter_mut() {
            *z /= nu;
        }
        left.push(ui);
        right.push(vi);
    }
    let rank = left.len();
    for i in rank..n {
        right.push(eig.vector(i));
    }
    super::matrix::complete_basis(&mut left, n);
    let mut w = CMatrix::zeros(n, n);
    for (u, v) in left.iter().zip(&right) {
        for r in 0..n {
            for c in 0..n {
                w[(r, c)] += u[r] * v[c].conj();
            }
        }
    }
    Ok(w)
}
