//! Dense complex linear algebra and quantum-information primitives.

pub mod eig;
pub mod info;
pub mod matrix;
pub mod measure;
pub mod random;
pub mod state;

pub use eig::{hermitian_eig, polar_unitary, HermitianEig};
pub use info::{
    fidelity, l1_distance, local_purification_transform, maximally_parallel_purifications,
    optimal_distinguishing_measurement, purify, purify_with, sign_projectors, sqrt_psd,
    trace_norm,
};
pub use matrix::{gates, inner, kron_vec, norm, real, tensor, CMatrix, Cplx, I, ONE, ZERO};
pub use measure::{bit_label, OrthogonalMeasurement};
pub use state::{DensityMatrix, Mixture, StateVector};
