use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Cplx = Complex64;

pub const ZERO: Cplx = Cplx::new(0.0, 0.0);
pub const ONE: Cplx = Cplx::new(1.0, 0.0);
pub const I: Cplx = Cplx::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cplx>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cplx) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cplx>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Cplx::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[Cplx]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<Cplx> = values.iter().map(|&x| Cplx::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Cplx], b: &[Cplx]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Cplx>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        Self::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Cplx> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Cplx) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Cplx::new(s, 0.0))
    }

    pub fn trace(&self) -> Cplx {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitary_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let p = self.adjoint().matmul(self);
        p.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_defect() <= tol
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// `⟨u| self |v⟩`.
    pub fn sandwich(&self, u: &[Cplx], v: &[Cplx]) -> Cplx {
        let mv = self.mul_vec(v);
        inner(u, &mv)
    }
}

/// Kronecker product of two matrices.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[Cplx], b: &[Cplx]) -> Cplx {
    assert_eq!(a.len(), b.len(), "inner product length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Cplx]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron_vec(a: &[Cplx], b: &[Cplx]) -> Vec<Cplx> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn real(x: f64) -> Cplx {
    Cplx::new(x, 0.0)
}

/// Extends `first` (unit norm) to a unitary whose first column is `first`.
/// The remaining columns come from Gram-Schmidt over the standard basis.
pub fn unitary_with_first_column(first: &[Cplx]) -> Result<CMatrix> {
    let n = first.len();
    let nrm = norm(first);
    if (nrm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("column norm {nrm} is not 1")));
    }
    let mut cols: Vec<Vec<Cplx>> = vec![first.to_vec()];
    complete_basis(&mut cols, n);
    Ok(CMatrix::from_columns(&cols))
}

/// Appends standard-basis vectors, orthonormalised against `cols`, until the
/// set spans `C^n`. `cols` must already be orthonormal.
pub(crate) fn complete_basis(cols: &mut Vec<Vec<Cplx>>, n: usize) {
    // Candidates are tried in order of how little they overlap the existing
    // span, which keeps the Gram-Schmidt step well conditioned.
    while cols.len() < n {
        let mut best: Option<(f64, Vec<Cplx>)> = None;
        for k in 0..n {
            let mut v = vec![ZERO; n];
            v[k] = ONE;
            for _ in 0..2 {
                for c in cols.iter() {
                    let ov = inner(c, &v);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= ov * ci;
                    }
                }
            }
            let nv = norm(&v);
            if best.as_ref().is_none_or(|(b, _)| nv > *b) {
                best = Some((nv, v));
            }
        }
        let (nv, mut v) = best.expect("n > 0");
        for z in v.iter_mut() {
            *z /= nv;
        }
        cols.push(v);
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Cplx;

    fn index(&self, (r, c): (usize, usize)) -> &Cplx {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cplx {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Common single-qubit gates.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real_rows(&[&[h, h], &[h, -h]])
    }

    /// Real rotation taking `|0⟩` to `cos(a)|0⟩ + sin(a)|1⟩`.
    pub fn rotation(angle: f64) -> CMatrix {
        let (s, c) = angle.sin_cos();
        CMatrix::from_real_rows(&[&[c, -s], &[s, c]])
    }
}
