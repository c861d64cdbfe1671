//! Pure and mixed states on labelled qubit wires.
//!
//! Amplitude index bits follow the wire list: the first wire is the most
//! significant bit.

use std::collections::HashSet;

use super::eig::hermitian_eig;
use super::matrix::{inner, norm, CMatrix, Cplx, ONE, ZERO};
use super::measure::OrthogonalMeasurement;
use crate::error::{Error, Result};

/// Norm tolerance for [`StateVector`].
pub const NORM_TOL: f64 = 1e-10;
/// Branches lighter than this are dropped by [`StateVector::measure`].
pub const PRUNE_TOL: f64 = 1e-14;

/// Unit vector on an ordered list of qubit wires.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    wires: Vec<String>,
    amps: Vec<Cplx>,
}

fn check_unique(wires: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for w in wires {
        if !seen.insert(w.as_str()) {
            return Err(Error::WireMismatch(format!("duplicate wire `{w}`")));
        }
    }
    Ok(())
}

fn owned<S: AsRef<str>>(labels: &[S]) -> Vec<String> {
    labels.iter().map(|s| s.as_ref().to_string()).collect()
}

/// Positions of `labels` inside `wires`.
pub(crate) fn positions<S: AsRef<str>>(wires: &[String], labels: &[S]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(labels.len());
    for l in labels {
        let l = l.as_ref();
        let p = wires
            .iter()
            .position(|w| w == l)
            .ok_or_else(|| Error::UnknownWire(l.to_string()))?;
        if out.contains(&p) {
            return Err(Error::WireMismatch(format!("wire `{l}` listed twice")));
        }
        out.push(p);
    }
    Ok(out)
}

/// Index layout for acting on a subset of wires.
///
/// `offsets[l]` is the full-register offset of local index `l`, and `bases`
/// enumerates the full indices whose bits on the subset are all zero.
pub(crate) struct Layout {
    pub offsets: Vec<usize>,
    pub bases: Vec<usize>,
}

impl Layout {
    pub fn new(n: usize, pos: &[usize]) -> Self {
        let k = pos.len();
        let offsets = (0..1usize << k)
            .map(|l| {
                pos.iter()
                    .enumerate()
                    .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &p)| 1usize << (n - 1 - p))
                    .sum()
            })
            .collect();
        let mask: usize = pos.iter().map(|&p| 1usize << (n - 1 - p)).sum();
        let bases = (0..1usize << n).filter(|i| i & mask == 0).collect();
        Layout { offsets, bases }
    }
}

/// Applies an arbitrary `2^k × 2^k` operator to the amplitudes at `pos`.
pub(crate) fn apply_local(amps: &[Cplx], n: usize, op: &CMatrix, pos: &[usize]) -> Vec<Cplx> {
    let layout = Layout::new(n, pos);
    let d = layout.offsets.len();
    let mut out = vec![ZERO; amps.len()];
    let mut local = vec![ZERO; d];
    for &base in &layout.bases {
        for (l, off) in layout.offsets.iter().enumerate() {
            local[l] = amps[base + off];
        }
        if local.iter().all(|z| *z == ZERO) {
            continue;
        }
        for (r, off) in layout.offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, z) in local.iter().enumerate() {
                acc += op[(r, c)] * z;
            }
            out[base + off] = acc;
        }
    }
    out
}

impl StateVector {
    pub fn new<S: AsRef<str>>(wires: &[S], amps: Vec<Cplx>) -> Result<Self> {
        let wires = owned(wires);
        check_unique(&wires)?;
        if amps.len() != 1usize << wires.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << wires.len(),
                got: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let nrm = norm(&amps);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {nrm} is not 1")));
        }
        Ok(StateVector { wires, amps })
    }

    /// Normalises `amps` before validating.
    pub fn normalized<S: AsRef<str>>(wires: &[S], mut amps: Vec<Cplx>) -> Result<Self> {
        let nrm = norm(&amps);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        for z in amps.iter_mut() {
            *z /= nrm;
        }
        Self::new(wires, amps)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis<S: AsRef<str>>(wires: &[S], index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << wires.len()];
        if index >= amps.len() {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        amps[index] = ONE;
        Self::new(wires, amps)
    }

    /// Single qubit `a|0⟩ + b|1⟩`.
    pub fn qubit(wire: &str, a: Cplx, b: Cplx) -> Result<Self> {
        Self::new(&[wire], vec![a, b])
    }

    /// The empty register (one amplitude equal to 1).
    pub fn empty() -> Self {
        StateVector {
            wires: Vec::new(),
            amps: vec![ONE],
        }
    }

    pub fn wires(&self) -> &[String] {
        &self.wires
    }

    pub fn amplitudes(&self) -> &[Cplx] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn has_wire(&self, label: &str) -> bool {
        self.wires.iter().any(|w| w == label)
    }

    /// Copy with wire labels replaced position by position.
    pub fn relabel<S: AsRef<str>>(&self, wires: &[S]) -> Result<Self> {
        if wires.len() != self.wires.len() {
            return Err(Error::WireMismatch(format!(
                "relabel needs {} labels, got {}",
                self.wires.len(),
                wires.len()
            )));
        }
        let wires = owned(wires);
        check_unique(&wires)?;
        Ok(StateVector {
            wires,
            amps: self.amps.clone(),
        })
    }

    /// Permutes the wires into `order`, which must list every wire once.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.wires.len() {
            return Err(Error::WireMismatch(format!(
                "reorder needs all {} wires",
                self.wires.len()
            )));
        }
        let pos = positions(&self.wires, order)?;
        let layout = Layout::new(self.wires.len(), &pos);
        let amps = layout.offsets.iter().map(|&o| self.amps[o]).collect();
        Ok(StateVector {
            wires: owned(order),
            amps,
        })
    }

    /// `⟨self|other⟩`; `other` is brought into this wire order first.
    pub fn inner(&self, other: &StateVector) -> Result<Cplx> {
        let other = other.reorder(&self.wires)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|`, the phase-insensitive comparison used everywhere.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// `self ⊗ other`; wire labels must be disjoint.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mut wires = self.wires.clone();
        wires.extend(other.wires.iter().cloned());
        check_unique(&wires)?;
        let amps = super::matrix::kron_vec(&self.amps, &other.amps);
        Ok(StateVector { wires, amps })
    }

    /// Applies `u` to the wires `on` (first listed wire = most significant
    /// bit of `u`'s index).
    pub fn apply_unitary<S: AsRef<str>>(&self, u: &CMatrix, on: &[S]) -> Result<Self> {
        if !u.is_square() || u.rows() != 1usize << on.len() {
            return Err(Error::WireMismatch(format!(
                "{}x{} operator on {} wires",
                u.rows(),
                u.cols(),
                on.len()
            )));
        }
        let defect = u.unitary_defect();
        if defect > 1e-9 {
            return Err(Error::NotUnitary(defect));
        }
        let pos = positions(&self.wires, on).map_err(|e| match e {
            Error::UnknownWire(w) => Error::WireMismatch(format!("unknown wire `{w}`")),
            e => e,
        })?;
        Ok(StateVector {
            wires: self.wires.clone(),
            amps: apply_local(&self.amps, self.wires.len(), u, &pos),
        })
    }

    /// Applies a unitary already validated by the caller.
    pub(crate) fn apply_trusted(&self, u: &CMatrix, pos: &[usize]) -> Self {
        StateVector {
            wires: self.wires.clone(),
            amps: apply_local(&self.amps, self.wires.len(), u, pos),
        }
    }

    /// Unnormalised `op` applied on `on`; used for projections.
    pub(crate) fn apply_raw(&self, op: &CMatrix, pos: &[usize]) -> Vec<Cplx> {
        apply_local(&self.amps, self.wires.len(), op, pos)
    }

    /// Branches of an orthogonal measurement on `on`, in projector order.
    ///
    /// Branches with probability below [`PRUNE_TOL`] are omitted.
    pub fn measure<S: AsRef<str>>(
        &self,
        m: &OrthogonalMeasurement,
        on: &[S],
    ) -> Result<Vec<(f64, StateVector, String)>> {
        if m.dim() != 1usize << on.len() {
            return Err(Error::WireMismatch(format!(
                "measurement of dimension {} on {} wires",
                m.dim(),
                on.len()
            )));
        }
        let pos = positions(&self.wires, on).map_err(|e| match e {
            Error::UnknownWire(w) => Error::WireMismatch(format!("unknown wire `{w}`")),
            e => e,
        })?;
        let mut out = Vec::new();
        for (proj, label) in m.projectors().iter().zip(m.labels()) {
            let mut amps = self.apply_raw(proj, &pos);
            let prob: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if prob < PRUNE_TOL {
                continue;
            }
            let s = prob.sqrt();
            for z in amps.iter_mut() {
                *z /= s;
            }
            out.push((
                prob,
                StateVector {
                    wires: self.wires.clone(),
                    amps,
                },
                label.clone(),
            ));
        }
        Ok(out)
    }

    /// Removes a wire that is (numerically) in a computational basis state
    /// and returns that bit.
    pub fn discard_basis_wire(&self, label: &str) -> Result<(usize, StateVector)> {
        let p = positions(&self.wires, &[label])?[0];
        let n = self.wires.len();
        let shift = n - 1 - p;
        let weight1: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift) & 1 == 1)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let bit = if weight1 > 0.5 { 1 } else { 0 };
        let stray = if bit == 1 { 1.0 - weight1 } else { weight1 };
        if stray > 1e-9 {
            return Err(Error::InvalidState(format!(
                "wire `{label}` is not in a basis state (stray weight {stray:.3e})"
            )));
        }
        let amps: Vec<Cplx> = (0..1usize << (n - 1))
            .map(|j| {
                let hi = j >> shift;
                let lo = j & ((1 << shift) - 1);
                self.amps[(hi << (shift + 1)) | (bit << shift) | lo]
            })
            .collect();
        let mut wires = self.wires.clone();
        wires.remove(p);
        Ok((bit, StateVector::normalized(&wires, amps)?))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            wires: self.wires.clone(),
            matrix: CMatrix::outer(&self.amps, &self.amps),
        }
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let pos = positions(&self.wires, keep)?;
        let layout = Layout::new(self.wires.len(), &pos);
        let d = layout.offsets.len();
        let mut m = CMatrix::zeros(d, d);
        for &base in &layout.bases {
            for (r, ro) in layout.offsets.iter().enumerate() {
                let a = self.amps[base + ro];
                if a == ZERO {
                    continue;
                }
                for (c, co) in layout.offsets.iter().enumerate() {
                    m[(r, c)] += a * self.amps[base + co].conj();
                }
            }
        }
        Ok(DensityMatrix {
            wires: owned(keep),
            matrix: m,
        })
    }
}

/// Density matrix on an ordered list of wires.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    wires: Vec<String>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), positivity (eigenvalues ≥ −1e-9) and
    /// unit trace (1e-10).
    pub fn new<S: AsRef<str>>(wires: &[S], matrix: CMatrix) -> Result<Self> {
        let wires = owned(wires);
        check_unique(&wires)?;
        let d = 1usize << wires.len();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.rows(),
            });
        }
        if matrix.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = matrix.hermitian_defect();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < -1e-9 {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(DensityMatrix { wires, matrix })
    }

    /// Fully mixed state on `wires`.
    pub fn maximally_mixed<S: AsRef<str>>(wires: &[S]) -> Result<Self> {
        let d = 1usize << wires.len();
        Self::new(wires, CMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    pub fn wires(&self) -> &[String] {
        &self.wires
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Permutes the wires into `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.wires.len() {
            return Err(Error::WireMismatch(format!(
                "reorder needs all {} wires",
                self.wires.len()
            )));
        }
        let pos = positions(&self.wires, order)?;
        let off = Layout::new(self.wires.len(), &pos).offsets;
        let d = off.len();
        Ok(DensityMatrix {
            wires: owned(order),
            matrix: CMatrix::from_fn(d, d, |r, c| self.matrix[(off[r], off[c])]),
        })
    }

    /// The matrix expressed in the wire order of `reference`.
    pub fn aligned_to(&self, reference: &DensityMatrix) -> Result<CMatrix> {
        Ok(self.reorder(&reference.wires)?.matrix)
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let pos = positions(&self.wires, keep)?;
        let layout = Layout::new(self.wires.len(), &pos);
        let d = layout.offsets.len();
        let mut m = CMatrix::zeros(d, d);
        for &base in &layout.bases {
            for (r, ro) in layout.offsets.iter().enumerate() {
                for (c, co) in layout.offsets.iter().enumerate() {
                    m[(r, c)] += self.matrix[(base + ro, base + co)];
                }
            }
        }
        Ok(DensityMatrix {
            wires: owned(keep),
            matrix: m,
        })
    }

    /// `Tr(P ρ)` for an operator on the same wires.
    pub fn expectation(&self, p: &CMatrix) -> f64 {
        p.matmul(&self.matrix).trace().re
    }
}

/// Ensemble `{w_i, |φ_i⟩}` over a common wire list.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    weights: Vec<f64>,
    states: Vec<StateVector>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidState(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidState("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        let wires = states[0].wires.clone();
        let states = states
            .iter()
            .map(|s| s.reorder(&wires))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mixture { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn wires(&self) -> &[String] {
        self.states[0].wires()
    }

    pub fn density(&self) -> DensityMatrix {
        let d = self.states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m = &m + &CMatrix::outer(&s.amps, &s.amps).scale_real(*w);
        }
        DensityMatrix {
            wires: self.states[0].wires.clone(),
            matrix: m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{gates, real};
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        let h = real(FRAC_1_SQRT_2);
        StateVector::new(&["a", "b"], vec![h, ZERO, ZERO, h]).unwrap()
    }

    #[test]
    fn rejects_bad_norm_and_duplicates() {
        assert!(StateVector::new(&["a"], vec![ONE, ONE]).is_err());
        assert!(matches!(
            StateVector::new(&["a", "a"], vec![ONE, ZERO, ZERO, ZERO]),
            Err(Error::WireMismatch(_))
        ));
    }

    #[test]
    fn x_on_first_wire() {
        let s = StateVector::basis(&["w1", "w2"], 0).unwrap();
        let t = s.apply_unitary(&gates::pauli_x(), &["w1"]).unwrap();
        assert_eq!(t.amplitudes()[2], ONE);
        let same = s.apply_unitary(&CMatrix::identity(4), &["w1", "w2"]).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn apply_unitary_errors() {
        let s = StateVector::basis(&["a", "b"], 0).unwrap();
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(s.apply_unitary(&m, &["a"]), Err(Error::NotUnitary(_))));
        assert!(matches!(
            s.apply_unitary(&gates::pauli_x(), &["a", "b"]),
            Err(Error::WireMismatch(_))
        ));
        assert!(matches!(
            s.apply_unitary(&gates::pauli_x(), &["c"]),
            Err(Error::WireMismatch(_))
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let prod = StateVector::basis(&["a", "b"], 1).unwrap();
        let ra = prod.partial_trace(&["a"]).unwrap();
        assert!(ra.matrix().max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
        let rb = bell().partial_trace(&["b"]).unwrap();
        assert!(rb.matrix().max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
        assert!(matches!(bell().partial_trace(&["z"]), Err(Error::UnknownWire(_))));
    }

    #[test]
    fn reorder_swaps_bits() {
        let s = StateVector::basis(&["a", "b", "c"], 0b100).unwrap();
        let t = s.reorder(&["c", "b", "a"]).unwrap();
        assert_eq!(t.amplitudes()[0b001], ONE);
        assert!((t.overlap(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn discard_basis_wire() {
        let s = StateVector::basis(&["a", "b"], 0b01).unwrap();
        let (bit, rest) = s.discard_basis_wire("b").unwrap();
        assert_eq!(bit, 1);
        assert_eq!(rest.wires(), ["a".to_string()]);
        assert!(bell().discard_basis_wire("a").is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(&["a"], CMatrix::diag_real(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(&["a"], CMatrix::diag_real(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(&["a"], CMatrix::diag_real(&[0.5, 0.4])).is_err());
    }

    #[test]
    fn mixture_density() {
        let m = Mixture::new(
            vec![0.5, 0.5],
            vec![
                StateVector::basis(&["a"], 0).unwrap(),
                StateVector::basis(&["a"], 1).unwrap(),
            ],
        )
        .unwrap();
        assert!(m.density().matrix().max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
        assert!(Mixture::new(vec![0.7], vec![StateVector::basis(&["a"], 0).unwrap()]).is_err());
    }
}
