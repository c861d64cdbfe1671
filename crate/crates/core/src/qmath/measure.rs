//! Projective measurements.

use super::matrix::{CMatrix, Cplx};
use crate::error::{Error, Result};

const PROJ_TOL: f64 = 1e-9;

/// Complete set of orthogonal projectors with one label per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMeasurement {
    projectors: Vec<CMatrix>,
    labels: Vec<String>,
}

impl OrthogonalMeasurement {
    pub fn new(projectors: Vec<CMatrix>, labels: Vec<String>) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != labels.len() {
            return Err(Error::InvalidMeasurement(format!(
                "{} projectors with {} labels",
                projectors.len(),
                labels.len()
            )));
        }
        let d = projectors[0].rows();
        for (i, p) in projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {i} is {}x{}, expected {d}x{d}",
                    p.rows(),
                    p.cols()
                )));
            }
            if p.hermitian_defect() > PROJ_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {i} is not Hermitian")));
            }
            if p.matmul(p).max_abs_diff(p) > PROJ_TOL {
                return Err(Error::InvalidMeasurement(format!("projector {i} is not idempotent")));
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                if projectors[i].matmul(&projectors[j]).max_abs() > PROJ_TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "projectors {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        let mut total = CMatrix::zeros(d, d);
        for p in &projectors {
            total = &total + p;
        }
        if total.max_abs_diff(&CMatrix::identity(d)) > PROJ_TOL {
            return Err(Error::InvalidMeasurement("projectors do not sum to I".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|l| seen.insert(l.as_str())) {
            return Err(Error::InvalidMeasurement("duplicate outcome label".into()));
        }
        Ok(OrthogonalMeasurement { projectors, labels })
    }

    /// Rank-one projectors onto the given orthonormal basis vectors.
    pub fn from_basis(vectors: &[Vec<Cplx>], labels: Vec<String>) -> Result<Self> {
        let projectors = vectors.iter().map(|v| CMatrix::outer(v, v)).collect();
        Self::new(projectors, labels)
    }

    /// Computational basis on `k` qubits; labels are bit strings (`"01"`).
    pub fn computational(k: usize) -> Self {
        let d = 1usize << k;
        let projectors = (0..d)
            .map(|i| {
                let mut p = CMatrix::zeros(d, d);
                p[(i, i)] = super::matrix::ONE;
                p
            })
            .collect();
        let labels = (0..d).map(|i| bit_label(i, k)).collect();
        OrthogonalMeasurement { projectors, labels }
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Outcome distribution `Tr(P_i ρ)` for a density matrix of matching size.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.projectors
            .iter()
            .map(|p| p.matmul(rho).trace().re)
            .collect()
    }
}

/// `i` written as `k` binary digits, most significant first.
pub fn bit_label(i: usize, k: usize) -> String {
    (0..k)
        .map(|j| if (i >> (k - 1 - j)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::matrix::real;
    use super::super::state::StateVector;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn computational_labels() {
        let m = OrthogonalMeasurement::computational(2);
        assert_eq!(m.labels(), ["00", "01", "10", "11"]);
    }

    #[test]
    fn rejects_incomplete_set() {
        let p = CMatrix::diag_real(&[1.0, 0.0]);
        assert!(OrthogonalMeasurement::new(vec![p.clone()], vec!["0".into()]).is_err());
        assert!(OrthogonalMeasurement::new(vec![p.clone(), p], vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn measure_basis_state() {
        let s = StateVector::basis(&["q"], 0).unwrap();
        let out = s.measure(&OrthogonalMeasurement::computational(1), &["q"]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 1.0);
        assert_eq!(out[0].2, "0");
    }

    #[test]
    fn measure_tilted_qubit() {
        let a = PI / 8.0;
        let s = StateVector::qubit("q", real(a.cos()), real(a.sin())).unwrap();
        let out = s.measure(&OrthogonalMeasurement::computational(1), &["q"]).unwrap();
        assert!((out[0].0 - 0.853553390593).abs() < 1e-12);
        assert!((out[1].0 - 0.146446609407).abs() < 1e-12);
    }
}
