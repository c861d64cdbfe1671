//! Distance measures, purifications and the optimal distinguishing
//! measurement.

use super::eig::{hermitian_eig, polar_unitary};
use super::matrix::{complete_basis, inner, norm, CMatrix, Cplx, ZERO};
use super::measure::OrthogonalMeasurement;
use super::state::{positions, DensityMatrix, Layout, StateVector};
use crate::error::{Error, Result};

/// Sum of singular values. For Hermitian input this is `Σ|λ_i|`.
pub fn trace_norm(a: &CMatrix) -> f64 {
    assert!(a.is_square(), "trace norm of a non-square matrix");
    if a.hermitian_defect() <= 1e-12 * a.max_abs().max(1.0) {
        let sym = CMatrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
        let eig = hermitian_eig(&sym).expect("symmetrised matrix is Hermitian");
        return eig.values.iter().map(|l| l.abs()).sum();
    }
    // eigenvalues of [[0, A], [A†, 0]] are ±σ_i
    let n = a.rows();
    let dilation = CMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a[(i, j - n)],
        (false, true) => a[(j, i - n)].conj(),
        _ => ZERO,
    });
    let eig = hermitian_eig(&dilation).expect("dilation is Hermitian");
    0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>()
}

/// Positive square root of a density matrix.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    Ok(hermitian_eig(m)?.map_values(|l| l.max(0.0).sqrt()))
}

fn same_wires(r0: &DensityMatrix, r1: &DensityMatrix) -> Result<CMatrix> {
    if r0.wires().len() != r1.wires().len() {
        return Err(Error::WireMismatch(format!(
            "states on {:?} and {:?}",
            r0.wires(),
            r1.wires()
        )));
    }
    r1.aligned_to(r0)
}

/// `A` with `A A† = m`, columns `√λ_i v_i`.
fn factor(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    let w: Vec<f64> = eig.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok(CMatrix::from_fn(m.rows(), m.cols(), |i, j| eig.vectors[(i, j)] * w[j]))
}

/// Uhlmann fidelity as a squared overlap: `(Tr|√ρ0 √ρ1|)²`.
///
/// Evaluated as `trn(A†B)²` for factorizations `ρ0 = AA†`, `ρ1 = BB†`, which
/// keeps eigenvalue noise near zero from entering at first order.
pub fn fidelity(r0: &DensityMatrix, r1: &DensityMatrix) -> Result<f64> {
    let m1 = same_wires(r0, r1)?;
    let k = factor(r0.matrix())?.adjoint().matmul(&factor(&m1)?);
    let s = trace_norm(&k);
    Ok((s * s).clamp(0.0, 1.0))
}

fn default_ancillas(wires: &[String]) -> Vec<String> {
    wires.iter().map(|w| format!("{w}~")).collect()
}

/// Spectral purification `Σ √λ_i |i⟩ ⊗ |v_i⟩` with ancilla wires first,
/// labelled `"<wire>~"`.
pub fn purify(r: &DensityMatrix) -> Result<StateVector> {
    purify_with(r, &default_ancillas(r.wires()))
}

/// [`purify`] with caller-chosen ancilla labels (one per system wire).
pub fn purify_with<S: AsRef<str>>(r: &DensityMatrix, ancillas: &[S]) -> Result<StateVector> {
    if ancillas.len() != r.wires().len() {
        return Err(Error::WireMismatch(format!(
            "{} ancilla labels for {} wires",
            ancillas.len(),
            r.wires().len()
        )));
    }
    let eig = hermitian_eig(r.matrix())?;
    let d = r.dim();
    let mut amps = vec![ZERO; d * d];
    for (i, &lam) in eig.values.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        for s in 0..d {
            amps[i * d + s] = eig.vectors[(s, i)] * w;
        }
    }
    let mut wires: Vec<String> = ancillas.iter().map(|a| a.as_ref().to_string()).collect();
    wires.extend(r.wires().iter().cloned());
    StateVector::normalized(&wires, amps)
}

/// Purifications `ψ0, ψ1` (ancilla wires first, labelled `"<wire>~"`) with
/// `⟨ψ0|ψ1⟩ = √f(ρ0, ρ1)`, real and nonnegative.
pub fn maximally_parallel_purifications(
    r0: &DensityMatrix,
    r1: &DensityMatrix,
) -> Result<(StateVector, StateVector)> {
    let m1 = same_wires(r0, r1)?;
    let s0 = sqrt_psd(r0.matrix())?;
    let s1 = sqrt_psd(&m1)?;
    let w = polar_unitary(&s0.matmul(&s1))?;
    // amplitude matrix M[a, s] = (√ρ0)[s, a], and (√ρ1 W†)[s, a] for ψ1
    let t1 = s1.matmul(&w.adjoint());
    let d = r0.dim();
    let amps0 = (0..d * d).map(|k| s0[(k % d, k / d)]).collect();
    let amps1 = (0..d * d).map(|k| t1[(k % d, k / d)]).collect();
    let mut wires = default_ancillas(r0.wires());
    wires.extend(r0.wires().iter().cloned());
    Ok((
        StateVector::normalized(&wires, amps0)?,
        StateVector::normalized(&wires, amps1)?,
    ))
}

/// Amplitude matrix `M[l, r]` of `psi` split into `local` and the rest.
fn split_matrix(psi: &StateVector, local: &[usize]) -> CMatrix {
    let n = psi.wires().len();
    let layout = Layout::new(n, local);
    let amps = psi.amplitudes();
    CMatrix::from_fn(layout.offsets.len(), layout.bases.len(), |l, r| {
        amps[layout.bases[r] + layout.offsets[l]]
    })
}

/// Unitary `U` on `local_wires` (in the order given) with
/// `(U ⊗ I) psi = target` up to a global phase.
///
/// Requires the two states to agree on the complementary wires.
pub fn local_purification_transform<S: AsRef<str>>(
    psi: &StateVector,
    target: &StateVector,
    local_wires: &[S],
) -> Result<CMatrix> {
    let target = target.reorder(psi.wires())?;
    let pos = positions(psi.wires(), local_wires)?;
    let mp = split_matrix(psi, &pos);
    let mt = split_matrix(&target, &pos);
    // M†M is the (conjugated) reduced state on the complement
    let gp = mp.adjoint().matmul(&mp);
    let gt = mt.adjoint().matmul(&mt);
    let diff = trace_norm(&(&gp - &gt));
    if diff > 1e-8 {
        return Err(Error::ReducedMismatch(diff));
    }
    let eig = hermitian_eig(&gp)?;
    let d = mp.rows();
    let mut a_cols: Vec<Vec<Cplx>> = Vec::new();
    let mut c_cols: Vec<Vec<Cplx>> = Vec::new();
    for (i, &lam) in eig.values.iter().enumerate() {
        let sigma = lam.max(0.0).sqrt();
        if sigma < 1e-9 || a_cols.len() == d {
            break;
        }
        let b = eig.vector(i);
        let mut a = mp.mul_vec(&b);
        let mut c = mt.mul_vec(&b);
        for z in a.iter_mut().chain(c.iter_mut()) {
            *z /= sigma;
        }
        orthonormalize_against(&mut a, &a_cols);
        orthonormalize_against(&mut c, &c_cols);
        a_cols.push(a);
        c_cols.push(c);
    }
    complete_basis(&mut a_cols, d);
    complete_basis(&mut c_cols, d);
    let mut u = CMatrix::zeros(d, d);
    for (c, a) in c_cols.iter().zip(&a_cols) {
        u = &u + &CMatrix::outer(c, a);
    }
    Ok(u)
}

fn orthonormalize_against(v: &mut [Cplx], basis: &[Vec<Cplx>]) {
    for _ in 0..2 {
        for b in basis {
            let ov = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= ov * y;
            }
        }
    }
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Measurement onto the eigenvectors of `ρ0 − ρ1`.
///
/// Labels are `"+i"` / `"-i"` by the sign of eigenvalue `i` (zero counts as
/// `+`). Returns the L1 distance between the two outcome distributions,
/// which equals `trace_norm(ρ0 − ρ1)`.
pub fn optimal_distinguishing_measurement(
    r0: &DensityMatrix,
    r1: &DensityMatrix,
) -> Result<(OrthogonalMeasurement, f64)> {
    let m1 = same_wires(r0, r1)?;
    let m0 = r0.matrix();
    let eig = hermitian_eig(&(m0 - &m1))?;
    let mut projectors = Vec::new();
    let mut labels = Vec::new();
    for (i, &lam) in eig.values.iter().enumerate() {
        let v = eig.vector(i);
        projectors.push(CMatrix::outer(&v, &v));
        labels.push(format!("{}{i}", if lam >= 0.0 { '+' } else { '-' }));
    }
    let meas = OrthogonalMeasurement::new(projectors, labels)?;
    let l1 = l1_distance(&meas, m0, &m1);
    Ok((meas, l1))
}

/// L1 distance between the outcome distributions of `m` on two states.
pub fn l1_distance(m: &OrthogonalMeasurement, r0: &CMatrix, r1: &CMatrix) -> f64 {
    m.probabilities(r0)
        .iter()
        .zip(m.probabilities(r1))
        .map(|(p, q)| (p - q).abs())
        .sum()
}

/// Projectors onto the nonnegative and negative eigenspaces of `a`.
pub fn sign_projectors(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let eig = hermitian_eig(a)?;
    let pos = eig.map_values(|l| if l >= 0.0 { 1.0 } else { 0.0 });
    let neg = eig.map_values(|l| if l < 0.0 { 1.0 } else { 0.0 });
    Ok((pos, neg))
}
