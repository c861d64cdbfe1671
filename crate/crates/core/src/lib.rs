//! Exact simulation of quantum bit escrow, the biased coin flip built on it,
//! and numerical checks of their binding, sealing and bias bounds.

pub mod adversaries;
pub mod analysis;
pub mod error;
pub mod protocols;
pub mod qmath;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use qmath::{CMatrix, Cplx, DensityMatrix, Mixture, OrthogonalMeasurement, StateVector};
