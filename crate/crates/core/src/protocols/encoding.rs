//! The four-state encoding and its generalisation to arbitrary qubit
//! realizations.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmath::{real, CMatrix, Cplx, DensityMatrix, Mixture, OrthogonalMeasurement, StateVector};

use super::strategy::wires;

/// Escrow angle `θ ∈ (0, π/8]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EscrowParams {
    pub theta: f64,
}

impl EscrowParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI / 8.0 + 1e-15) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside (0, pi/8]")));
        }
        Ok(EscrowParams { theta })
    }
}

impl Default for EscrowParams {
    fn default() -> Self {
        EscrowParams { theta: PI / 8.0 }
    }
}

/// `φ_α = cos α |0⟩ + sin α |1⟩` on the deposit wire.
pub fn phi(alpha: f64) -> StateVector {
    StateVector::qubit(wires::DEPOSIT, real(alpha.cos()), real(alpha.sin()))
        .expect("unit vector")
}

/// Angle of `φ_{b,x}`.
pub fn phi_bx_angle(b: usize, x: usize, theta: f64) -> f64 {
    match (b, x) {
        (0, 0) => -theta,
        (0, 1) => theta,
        (1, 0) => PI / 2.0 - theta,
        (1, 1) => PI / 2.0 + theta,
        _ => panic!("b and x are bits"),
    }
}

pub fn phi_bx(b: usize, x: usize, theta: f64) -> StateVector {
    phi(phi_bx_angle(b, x, theta))
}

/// States `u_{b,j}` with weights `w_{b,j}` that Alice may deposit, plus the
/// verification measurement for each opening `(b, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingFamily {
    states: [Vec<Vec<Cplx>>; 2],
    weights: [Vec<f64>; 2],
    index_bits: usize,
    theta: Option<f64>,
}

impl EncodingFamily {
    /// `{φ_{b,x}}` with uniform `x`.
    pub fn four_state(theta: f64) -> Self {
        let states = [0, 1].map(|b| {
            (0..2)
                .map(|x| phi_bx(b, x, theta).amplitudes().to_vec())
                .collect()
        });
        EncodingFamily {
            states,
            weights: [vec![0.5, 0.5], vec![0.5, 0.5]],
            index_bits: 1,
            theta: Some(theta),
        }
    }

    /// Family from two single-qubit realizations with `2^m` states each
    /// (`m ≥ 1`).
    pub fn from_realizations(real0: &Mixture, real1: &Mixture) -> Result<Self> {
        let k = real0.states().len();
        if k != real1.states().len() || k < 2 || !k.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "realizations need the same power-of-two size >= 2, got {k} and {}",
                real1.states().len()
            )));
        }
        if real0.wires().len() != 1 || real1.wires().len() != 1 {
            return Err(Error::InvalidParameter("realizations must be single-qubit".into()));
        }
        let states = [real0, real1].map(|m| {
            m.states()
                .iter()
                .map(|s| s.amplitudes().to_vec())
                .collect()
        });
        Ok(EncodingFamily {
            states,
            weights: [real0.weights().to_vec(), real1.weights().to_vec()],
            index_bits: k.trailing_zeros() as usize,
            theta: None,
        })
    }

    pub fn index_bits(&self) -> usize {
        self.index_bits
    }

    pub fn size(&self) -> usize {
        1 << self.index_bits
    }

    pub fn state(&self, b: usize, j: usize) -> &[Cplx] {
        &self.states[b][j]
    }

    pub fn weights(&self, b: usize) -> &[f64] {
        &self.weights[b]
    }

    /// `ρ_b = Σ_j w_{b,j} |u_{b,j}⟩⟨u_{b,j}|` on the deposit wire.
    pub fn density(&self, b: usize) -> DensityMatrix {
        let mut m = CMatrix::zeros(2, 2);
        for (w, u) in self.weights[b].iter().zip(&self.states[b]) {
            m = &m + &CMatrix::outer(u, u).scale_real(*w);
        }
        DensityMatrix::new(&[wires::DEPOSIT], m).expect("mixture of unit vectors")
    }

    pub fn realization(&self, b: usize) -> Mixture {
        let states = self.states[b]
            .iter()
            .map(|u| StateVector::new(&[wires::DEPOSIT], u.clone()).expect("unit vector"))
            .collect();
        Mixture::new(self.weights[b].clone(), states).expect("valid weights")
    }

    /// Measurement Bob (or Alice, on return) performs to check the opening
    /// `(b, j)`, and the outcome index that accepts it.
    ///
    /// The four-state family uses the basis `{φ_{0,x}, φ_{1,x}}`; other
    /// families use `{u_{b,j}, u_{b,j}^⊥}`.
    pub fn verification(&self, b: usize, j: usize) -> (OrthogonalMeasurement, usize) {
        if self.theta.is_some() {
            let basis = [self.states[0][j].clone(), self.states[1][j].clone()];
            let m = OrthogonalMeasurement::from_basis(&basis, vec!["0".into(), "1".into()])
                .expect("orthonormal pair");
            (m, b)
        } else {
            let u = &self.states[b][j];
            let perp = vec![-u[1].conj(), u[0].conj()];
            let m = OrthogonalMeasurement::from_basis(
                &[u.clone(), perp],
                vec!["accept".into(), "reject".into()],
            )
            .expect("orthonormal pair");
            (m, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::trace_norm;

    #[test]
    fn phi_values() {
        assert!((phi(0.0).amplitudes()[0] - real(1.0)).norm() < 1e-15);
        assert!((phi(PI / 2.0).amplitudes()[1] - real(1.0)).norm() < 1e-15);
        let a = phi(PI / 8.0);
        assert!((a.amplitudes()[0].re - 0.923879532511).abs() < 1e-12);
        assert!((a.amplitudes()[1].re - 0.382683432365).abs() < 1e-12);
    }

    #[test]
    fn phi_bx_geometry() {
        let t = PI / 8.0;
        assert_eq!(phi_bx(0, 0, t), phi(-t));
        let ip = phi_bx(0, 0, t).inner(&phi_bx(0, 1, t)).unwrap();
        assert!((ip.re - (2.0 * t).cos()).abs() < 1e-12);
        assert!(phi_bx(0, 0, t).overlap(&phi_bx(1, 0, t)).unwrap() < 1e-15);
        assert!(phi_bx(0, 1, t).overlap(&phi_bx(1, 1, t)).unwrap() < 1e-15);
    }

    #[test]
    fn params_range() {
        assert!(EscrowParams::new(PI / 8.0).is_ok());
        assert!(EscrowParams::new(0.0).is_err());
        assert!(EscrowParams::new(0.5).is_err());
    }

    #[test]
    fn four_state_densities() {
        let f = EncodingFamily::four_state(PI / 8.0);
        let d = f.density(0).matrix() - f.density(1).matrix();
        assert!((trace_norm(&d) - 2f64.sqrt()).abs() < 1e-12);
        let c2 = (PI / 8.0).cos().powi(2);
        assert!((f.density(0).matrix()[(0, 0)].re - c2).abs() < 1e-12);
    }
}
