//! Seeded random unitaries, states and measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, norm, CMatrix, Cplx};
use super::measure::OrthogonalMeasurement;
use super::state::{DensityMatrix, StateVector};

/// Deterministic generator used for every randomized sweep.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Cplx {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cplx::new(re, im)
}

/// Haar-distributed `n × n` unitary (Gram-Schmidt of a complex Ginibre
/// matrix).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Cplx>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Cplx> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let ov = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= ov * y;
                }
            }
        }
        let nv = norm(&v);
        if nv < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        cols.push(v);
    }
    CMatrix::from_columns(&cols)
}

/// Haar-random pure state on `wires`.
pub fn haar_state<R: Rng + ?Sized, S: AsRef<str>>(wires: &[S], rng: &mut R) -> StateVector {
    let d = 1usize << wires.len();
    let amps = (0..d).map(|_| gaussian(rng)).collect();
    StateVector::normalized(wires, amps).expect("Gaussian vector is nonzero")
}

/// Random mixed state: reduced state of a Haar-random pure state on twice
/// as many qubits.
pub fn random_density<R: Rng + ?Sized, S: AsRef<str>>(wires: &[S], rng: &mut R) -> DensityMatrix {
    let mut all: Vec<String> = wires.iter().map(|w| w.as_ref().to_string()).collect();
    all.extend((0..wires.len()).map(|i| format!("__env{i}")));
    haar_state(&all, rng)
        .partial_trace(wires)
        .expect("wires are present")
}

/// Rank-one measurement in a Haar-random basis of dimension `d`.
pub fn random_measurement<R: Rng + ?Sized>(d: usize, rng: &mut R) -> OrthogonalMeasurement {
    let u = haar_unitary(d, rng);
    let cols: Vec<Vec<Cplx>> = (0..d).map(|j| u.column(j)).collect();
    let labels = (0..d).map(|j| j.to_string()).collect();
    OrthogonalMeasurement::from_basis(&cols, labels).expect("unitary columns are orthonormal")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    (&g + &g.adjoint()).scale_real(0.5)
}
