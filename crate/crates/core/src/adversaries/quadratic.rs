//! Alice's quadratic cheating strategy and Bob's weak measurement.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::honest::encode;
use crate::protocols::{wires, EncodingFamily, Op, Reg, StrategySpec, Verdict};
use crate::qmath::matrix::unitary_with_first_column;
use crate::qmath::{
    local_purification_transform, maximally_parallel_purifications, real, sign_projectors,
    CMatrix, Cplx, DensityMatrix, Mixture, OrthogonalMeasurement, StateVector, ZERO,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AliceQuadraticParams {
    pub alpha: f64,
    pub target_bit: usize,
}

impl AliceQuadraticParams {
    pub fn new(alpha: f64, target_bit: usize) -> Result<Self> {
        if !(0.0..=FRAC_PI_4 + 1e-15).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, pi/4]")));
        }
        if target_bit > 1 {
            return Err(Error::InvalidParameter(format!("target bit {target_bit}")));
        }
        Ok(AliceQuadraticParams { alpha, target_bit })
    }
}

/// Control-qubit basis: outcome index = claimed bit.
fn control_basis(params: &AliceQuadraticParams) -> OrthogonalMeasurement {
    let a = params.alpha;
    let v = |t: f64| vec![real(t.cos()), real(t.sin())];
    let (zero, one) = if params.target_bit == 0 {
        (v(a), v(a + FRAC_PI_2))
    } else {
        (v(-a), v(FRAC_PI_2 - a))
    };
    OrthogonalMeasurement::from_basis(&[zero, one], vec!["0".into(), "1".into()])
        .expect("orthonormal pair")
}

fn check_realizations(r: &DensityMatrix, m: &Mixture) -> Result<()> {
    let dev = m.density().aligned_to(r)?.max_abs_diff(r.matrix());
    if dev > 1e-9 {
        return Err(Error::RealizationMismatch(dev));
    }
    Ok(())
}

/// `Σ_j √w_j |j⟩_A ⊗ |u_j⟩` with the index register first.
fn realization_purification(m: &Mixture, a_wires: &[String]) -> Result<StateVector> {
    let k = m.states().len();
    let mut amps = vec![ZERO; 2 * k];
    for (j, (w, s)) in m.weights().iter().zip(m.states()).enumerate() {
        for (i, z) in s.amplitudes().iter().enumerate() {
            amps[2 * j + i] = z * w.sqrt();
        }
    }
    let mut labels = a_wires.to_vec();
    labels.push(wires::DEPOSIT.to_string());
    StateVector::new(&labels, amps)
}

/// Alice's quadratic strategy for the escrow game.
///
/// She deposits `(|0⟩ψ0 + |1⟩ψ1)/√2` built from maximally parallel
/// purifications of `r0`, `r1` and keeps the control and purifying
/// registers. To open she measures the control (basis `{φ_α, φ_α⊥}` for
/// target 0, its mirror for target 1), rotates the purifying register onto
/// the purification of the chosen realization and measures it to obtain the
/// index she announces.
///
/// Ancillas: 0 is the control, `1..=m` the index register.
pub fn alice_quadratic(
    params: AliceQuadraticParams,
    r0: &DensityMatrix,
    r1: &DensityMatrix,
    realizations: (&Mixture, &Mixture),
) -> Result<StrategySpec> {
    let params = AliceQuadraticParams::new(params.alpha, params.target_bit)?;
    if r0.wires().len() != 1 || r1.wires().len() != 1 {
        return Err(Error::InvalidParameter("deposit must be a single qubit".into()));
    }
    let r0 = DensityMatrix::new(&[wires::DEPOSIT], r0.matrix().clone())?;
    let r1 = DensityMatrix::new(&[wires::DEPOSIT], r1.matrix().clone())?;
    check_realizations(&r0, realizations.0)?;
    check_realizations(&r1, realizations.1)?;
    let family = EncodingFamily::from_realizations(realizations.0, realizations.1)?;
    let m = family.index_bits();

    let a_wires: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
    let (p0, p1) = maximally_parallel_purifications(&r0, &r1)?;
    // the purifying register is one qubit; pad to m qubits with |0⟩
    let pad = |psi: &StateVector| -> Result<StateVector> {
        let mut labels = vec![a_wires[0].clone()];
        labels.push(wires::DEPOSIT.to_string());
        let mut out = psi.relabel(&labels)?;
        for w in &a_wires[1..] {
            out = out.tensor(&StateVector::basis(&[w.as_str()], 0)?)?;
        }
        let mut order = a_wires.clone();
        order.push(wires::DEPOSIT.to_string());
        out.reorder(&order)
    };
    let psi = [pad(&p0)?, pad(&p1)?];
    let targets = [
        realization_purification(realizations.0, &a_wires)?,
        realization_purification(realizations.1, &a_wires)?,
    ];
    let u = [
        local_purification_transform(&psi[0], &targets[0], &a_wires)?,
        local_purification_transform(&psi[1], &targets[1], &a_wires)?,
    ];

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let beta: Vec<Cplx> = psi[0]
        .amplitudes()
        .iter()
        .chain(psi[1].amplitudes())
        .map(|z| z * h)
        .collect();
    let mut deposit_regs = vec![Reg::Anc(0)];
    deposit_regs.extend((1..=m).map(Reg::Anc));
    deposit_regs.push(Reg::msg(wires::DEPOSIT));
    let prep = unitary_with_first_column(&beta)?;

    let a_regs: Vec<Reg> = (1..=m).map(Reg::Anc).collect();
    let idx = wires::index(m);
    let reveal = vec![
        Op::measure(vec![Reg::Anc(0)], control_basis(&params), "b"),
        Op::branch(
            "b",
            u.iter()
                .map(|ub| vec![Op::unitary(a_regs.clone(), ub.clone())])
                .collect(),
        ),
        Op::measure(a_regs, OrthogonalMeasurement::computational(m), "x"),
        encode("b", &[wires::BIT.to_string()]),
        encode("x", &idx),
        Op::branch(
            "b",
            vec![
                vec![Op::Declare(Verdict::Zero)],
                vec![Op::Declare(Verdict::One)],
            ],
        ),
    ];
    let name = format!(
        "alice-quadratic(alpha={:.6},target={})",
        params.alpha, params.target_bit
    );
    let mut spec = StrategySpec::new(&name, 1 + m)
        .with_round("deposit", vec![Op::unitary(deposit_regs, prep)])
        .with_round("reveal", reveal);
    spec.index_bits = m;
    Ok(spec)
}

/// [`alice_quadratic`] for the four-state encoding at angle `theta`.
pub fn alice_quadratic_four_state(params: AliceQuadraticParams, theta: f64) -> Result<StrategySpec> {
    let f = EncodingFamily::four_state(theta);
    alice_quadratic(
        params,
        &f.density(0),
        &f.density(1),
        (&f.realization(0), &f.realization(1)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BobWeakParams {
    pub p: f64,
}

impl BobWeakParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
        }
        Ok(BobWeakParams { p })
    }
}

/// `R_v` with `R_v|0⟩ = |v⟩ = √(1−p)|0⟩ + √p|1⟩`.
pub fn weak_rotation(p: f64) -> CMatrix {
    let c = (1.0 - p).sqrt();
    let s = p.sqrt();
    CMatrix::from_real_rows(&[&[c, -s], &[s, c]])
}

/// The weak-measurement unitary on `(deposit ⊗ ancilla)`:
/// `P₊ ⊗ I + P₋ ⊗ R_v`, with `P±` the projectors onto the nonnegative and
/// negative eigenspaces of `r0 − r1`.
pub fn weak_measurement_unitary(p: f64, r0: &DensityMatrix, r1: &DensityMatrix) -> Result<CMatrix> {
    weak_measurement_unitary_with(r0, r1, &weak_rotation(p))
}

/// As [`weak_measurement_unitary`] with an arbitrary completion `rot` whose
/// first column is `|v⟩`.
pub fn weak_measurement_unitary_with(
    r0: &DensityMatrix,
    r1: &DensityMatrix,
    rot: &CMatrix,
) -> Result<CMatrix> {
    let d = r0.matrix() - &r1.aligned_to(r0)?;
    let (pos, neg) = sign_projectors(&d)?;
    Ok(&pos.kron(&CMatrix::identity(2)) + &neg.kron(rot))
}

/// Bob entangles the deposit with one ancilla through the weak-measurement
/// unitary while holding it, returns the deposit untouched afterwards and
/// keeps the ancilla.
pub fn bob_weak_measurement(
    params: BobWeakParams,
    r0: &DensityMatrix,
    r1: &DensityMatrix,
) -> Result<StrategySpec> {
    let params = BobWeakParams::new(params.p)?;
    let u = weak_measurement_unitary(params.p, r0, r1)?;
    Ok(bob_holding_unitary(&format!("bob-weak(p={:.6})", params.p), u, 1))
}

/// Bob applying `u` to `(deposit, B.anc0, …)` during `hold`.
pub fn bob_holding_unitary(name: &str, u: CMatrix, ancillas: usize) -> StrategySpec {
    let mut on = vec![Reg::msg(wires::DEPOSIT)];
    on.extend((0..ancillas).map(Reg::Anc));
    StrategySpec::new(name, ancillas).with_round("hold", vec![Op::unitary(on, u)])
}
