//! Sealing: what Bob learns about the escrowed bit, against how often he is
//! caught.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::{
    honest_escrow, phi_bx, run_escrow, wires, Challenge, EscrowParams, Op, Party, Reg,
    StrategySpec, Verdict,
};
use crate::qmath::{
    inner, kron_vec, optimal_distinguishing_measurement, trace_norm, CMatrix, Cplx, DensityMatrix,
    StateVector,
};

use super::BoundCheck;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SealingReport {
    pub theta: f64,
    /// Optimal guess probability of `b` from Bob's kept registers, minus ½.
    pub advantage_eps: f64,
    /// `¼ Σ ‖w′_{b,x}‖²`.
    pub detection_p: f64,
    /// Rejection probability from enumerating the return challenge.
    pub detection_enumerated: f64,
    /// `‖w′_{b,x}‖²` for `(b, x)` = 00, 01, 10, 11.
    pub w_norms: [f64; 4],
    /// `trn(ρ0^C − ρ1^C)` over the kept registers.
    pub kept_trace_distance: f64,
    /// Largest `|⟨w_{0,x}|w′_{1,x}⟩ + ⟨w′_{0,x}|w_{1,x}⟩|` over `x`.
    pub identity_residual: f64,
    /// [`sealing_bound`] at `detection_p`.
    pub bound_rhs: f64,
}

/// Bob's combined `hold` then `return` action as a unitary on
/// `(dep, B.anc0, …)`.
pub fn attack_unitary(bob: &StrategySpec) -> Result<(CMatrix, usize)> {
    bob.validate()?;
    let k = bob.ancillas;
    let mut labels = vec![wires::DEPOSIT.to_string()];
    labels.extend((0..k).map(|i| Party::Bob.ancilla(i)));
    let mut ops: Vec<(CMatrix, Vec<String>)> = Vec::new();
    for round in ["hold", "return"] {
        for op in bob.round(round) {
            match op {
                Op::Unitary { on, matrix } => {
                    let on = on
                        .iter()
                        .map(|r| match r {
                            Reg::Anc(i) => Ok(Party::Bob.ancilla(*i)),
                            Reg::Msg(w) if w == wires::DEPOSIT => Ok(w.clone()),
                            Reg::Msg(w) => Err(Error::NotUnitaryAttack(format!(
                                "round `{round}` acts on `{w}`"
                            ))),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    ops.push((matrix.clone(), on));
                }
                other => {
                    return Err(Error::NotUnitaryAttack(format!(
                        "round `{round}` contains {}",
                        op_kind(other)
                    )))
                }
            }
        }
    }
    for round in bob.rounds.keys() {
        if round != "hold" && round != "return" && round != "verify" {
            return Err(Error::NotUnitaryAttack(format!("unexpected round `{round}`")));
        }
    }
    let d = 1usize << (k + 1);
    let mut cols = Vec::with_capacity(d);
    for i in 0..d {
        let mut s = StateVector::basis(&labels, i)?;
        for (m, on) in &ops {
            s = s.apply_unitary(m, on)?;
        }
        cols.push(s.amplitudes().to_vec());
    }
    Ok((CMatrix::from_columns(&cols), k))
}

fn op_kind(op: &Op) -> &'static str {
    match op {
        Op::Unitary { .. } => "a unitary",
        Op::Measure { .. } => "a measurement",
        Op::Receive { .. } => "a receive",
        Op::Coin { .. } => "a coin",
        Op::Branch { .. } => "a branch",
        Op::Declare(_) => "a declaration",
    }
}

/// `(w_{b,x}, w′_{b,x})` of `U(φ_{b,x} ⊗ |0⟩)`.
pub fn w_decomposition(u: &CMatrix, theta: f64, b: usize, x: usize) -> (Vec<Cplx>, Vec<Cplx>) {
    let d = u.rows();
    let anc = d / 2;
    let mut zero = vec![Cplx::new(0.0, 0.0); anc];
    zero[0] = Cplx::new(1.0, 0.0);
    let phi = phi_bx(b, x, theta).amplitudes().to_vec();
    let alpha = u.mul_vec(&kron_vec(&phi, &zero));
    let project = |v: &[Cplx]| -> Vec<Cplx> {
        (0..anc)
            .map(|a| v[0].conj() * alpha[a] + v[1].conj() * alpha[anc + a])
            .collect()
    };
    let other = phi_bx(1 - b, x, theta).amplitudes().to_vec();
    (project(&phi), project(&other))
}

/// Bob's kept state conditioned on `b` after applying `u`.
fn kept_state(u: &CMatrix, theta: f64, b: usize) -> CMatrix {
    let anc = u.rows() / 2;
    let mut m = CMatrix::zeros(anc, anc);
    for x in 0..2 {
        let (w, wp) = w_decomposition(u, theta, b, x);
        m = &m + &CMatrix::outer(&w, &w).scale_real(0.5);
        m = &m + &CMatrix::outer(&wp, &wp).scale_real(0.5);
    }
    m
}

fn norm_sq(v: &[Cplx]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Detection `½ Σ_x ‖w′_{b,x}‖²` for a fixed `b`.
pub fn detection_given(u: &CMatrix, theta: f64, b: usize) -> f64 {
    0.5 * (0..2)
        .map(|x| norm_sq(&w_decomposition(u, theta, b, x).1))
        .sum::<f64>()
}

/// `K = 2¹⁵ cot²(2θ) + 4`.
pub fn sealing_constant(theta: f64) -> f64 {
    let cot = 1.0 / (2.0 * theta).tan();
    32768.0 * cot * cot + 4.0
}

/// Advantage allowed at detection `p`:
/// `½ √(1 − max(0, 1 − K p)²) + p/2`.
pub fn sealing_bound(theta: f64, p: f64) -> f64 {
    let c = (1.0 - sealing_constant(theta) * p).max(0.0);
    0.5 * (1.0 - c * c).max(0.0).sqrt() + p / 2.0
}

/// Sealing metrics of a unitary attack against honest Alice.
pub fn sealing_metrics(bob: &StrategySpec, theta: f64) -> Result<SealingReport> {
    let params = EscrowParams::new(theta)?;
    let (u, k) = attack_unitary(bob)?;
    let mut w_norms = [0.0; 4];
    for b in 0..2 {
        for x in 0..2 {
            w_norms[2 * b + x] = norm_sq(&w_decomposition(&u, theta, b, x).1);
        }
    }
    let detection_p = 0.25 * w_norms.iter().sum::<f64>();

    let identity_residual = (0..2)
        .map(|x| {
            let (w0, wp0) = w_decomposition(&u, theta, 0, x);
            let (w1, wp1) = w_decomposition(&u, theta, 1, x);
            (inner(&w0, &wp1) + inner(&wp0, &w1)).norm()
        })
        .fold(0.0, f64::max);

    let (kept_trace_distance, advantage_eps) = if k == 0 {
        (0.0, 0.0)
    } else {
        let labels: Vec<String> = (0..k).map(|i| Party::Bob.ancilla(i)).collect();
        let r0 = DensityMatrix::new(&labels, kept_state(&u, theta, 0))?;
        let r1 = DensityMatrix::new(&labels, kept_state(&u, theta, 1))?;
        let t = trace_norm(&(r0.matrix() - r1.matrix()));
        (t, 0.25 * t)
    };

    let mut honest_bob = bob.clone();
    if bob.round("verify").is_empty() {
        let (_, hb) = honest_escrow(params);
        honest_bob = honest_bob.with_round("verify", hb.round("verify").to_vec());
    }
    let (alice, _) = honest_escrow(params);
    let mut detection_enumerated = 0.0;
    for b in 0..2 {
        let d = run_escrow(&alice, &honest_bob, Challenge::ReturnToAlice, b)?;
        detection_enumerated += 0.5 * d.verdict_probability(Party::Alice, Some(Verdict::Err));
    }

    Ok(SealingReport {
        theta,
        advantage_eps,
        detection_p,
        detection_enumerated,
        w_norms,
        kept_trace_distance,
        identity_residual,
        bound_rhs: sealing_bound(theta, detection_p),
    })
}

/// Advantage measured with the optimal two-outcome measurement on Bob's
/// kept registers.
pub fn measured_advantage(bob: &StrategySpec, theta: f64) -> Result<f64> {
    let (u, k) = attack_unitary(bob)?;
    if k == 0 {
        return Ok(0.0);
    }
    let labels: Vec<String> = (0..k).map(|i| Party::Bob.ancilla(i)).collect();
    let r0 = DensityMatrix::new(&labels, kept_state(&u, theta, 0))?;
    let r1 = DensityMatrix::new(&labels, kept_state(&u, theta, 1))?;
    let (_, l1) = optimal_distinguishing_measurement(&r0, &r1)?;
    Ok(0.25 * l1)
}

/// `advantage_eps ≤ sealing_bound(θ, detection_p)`.
///
/// `observed / √p` (the empirical frontier) is in [`BoundCheck::ratio`]
/// via [`frontier_ratio`].
pub fn check_sealing_bound(report: &SealingReport, theta: f64) -> BoundCheck {
    BoundCheck::new(report.advantage_eps, sealing_bound(theta, report.detection_p))
}

/// `advantage_eps / √detection_p`, or `None` at zero detection.
pub fn frontier_ratio(report: &SealingReport) -> Option<f64> {
    (report.detection_p > 1e-15).then(|| report.advantage_eps / report.detection_p.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedSealingReport {
    pub theta: f64,
    /// From Bob's action before `b` is revealed.
    pub advantage_eps: f64,
    /// `d_0` of the `b = 0` action.
    pub detection_0: f64,
    /// `d_1` of the `b = 1` action.
    pub detection_1: f64,
    /// `d_1` had Bob kept the `b = 0` action.
    pub detection_1_unmodified: f64,
    /// `½(d_0 + d_1)`.
    pub p_mod: f64,
    /// `detection_1 / detection_0` (`None` at zero `d_0`).
    pub ratio: Option<f64>,
    pub bound: f64,
    pub pass: bool,
}

/// `(cot 2θ + csc 2θ)²`.
pub fn reveal_first_constant(theta: f64) -> f64 {
    let t = 2.0 * theta;
    (1.0 / t.tan() + 1.0 / t.sin()).powi(2)
}

/// Return challenge after Alice has announced `b`: Bob's total action is
/// `bob_pair.0` when `b = 0` and `bob_pair.1` when `b = 1`. The two must
/// agree before the announcement, so the advantage is that of
/// `bob_pair.0`.
///
/// Passes iff the advantage is within [`sealing_bound`] at
/// `min(1, 2κ p_mod)` with `κ` = [`reveal_first_constant`].
pub fn modified_sealing_check(
    bob_pair: (&StrategySpec, &StrategySpec),
    theta: f64,
) -> Result<ModifiedSealingReport> {
    EscrowParams::new(theta)?;
    let (u0, k0) = attack_unitary(bob_pair.0)?;
    let (u1, k1) = attack_unitary(bob_pair.1)?;
    if k0 != k1 {
        return Err(Error::NotUnitaryAttack(format!(
            "ancilla counts differ ({k0} vs {k1})"
        )));
    }
    let advantage_eps = if k0 == 0 {
        0.0
    } else {
        0.25 * trace_norm(&(&kept_state(&u0, theta, 0) - &kept_state(&u0, theta, 1)))
    };
    let detection_0 = detection_given(&u0, theta, 0);
    let detection_1 = detection_given(&u1, theta, 1);
    let p_mod = 0.5 * (detection_0 + detection_1);
    let bound = sealing_bound(theta, (2.0 * reveal_first_constant(theta) * p_mod).min(1.0));
    Ok(ModifiedSealingReport {
        theta,
        advantage_eps,
        detection_0,
        detection_1,
        detection_1_unmodified: detection_given(&u0, theta, 1),
        p_mod,
        ratio: (detection_0 > 1e-15).then(|| detection_1 / detection_0),
        bound,
        pass: advantage_eps <= bound + super::TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{bob_holding_unitary, bob_weak_measurement, identity_bob, BobWeakParams};
    use crate::protocols::EncodingFamily;
    use crate::qmath::random::{haar_unitary, seeded};
    use std::f64::consts::PI;

    const T: f64 = PI / 8.0;

    fn weak(p: f64) -> StrategySpec {
        let f = EncodingFamily::four_state(T);
        bob_weak_measurement(BobWeakParams::new(p).unwrap(), &f.density(0), &f.density(1)).unwrap()
    }

    #[test]
    fn identity_bob_reveals_nothing() {
        let r = sealing_metrics(&identity_bob(T), T).unwrap();
        assert_eq!(r.advantage_eps, 0.0);
        assert!(r.detection_p.abs() < 1e-15);
        assert!(r.w_norms.iter().all(|w| w.abs() < 1e-15));
        assert!(check_sealing_bound(&r, T).pass);
    }

    #[test]
    fn weak_quarter() {
        let r = sealing_metrics(&weak(0.25), T).unwrap();
        assert!((r.advantage_eps - 2f64.sqrt() * 0.5 / 4.0).abs() < 1e-9);
        assert!(r.detection_p <= 0.5 * (1.0 - 0.75f64.sqrt()) + 1e-9);
        assert!((r.detection_p - r.detection_enumerated).abs() < 1e-9);
        assert!(r.identity_residual < 1e-9);
        assert!(check_sealing_bound(&r, T).pass);
    }

    #[test]
    fn full_measurement() {
        let spec = weak(1.0);
        let r = sealing_metrics(&spec, T).unwrap();
        assert!((r.advantage_eps - 2f64.sqrt() / 4.0).abs() < 1e-9);
        assert!((r.detection_p - r.detection_enumerated).abs() < 1e-9);
        assert!((measured_advantage(&spec, T).unwrap() - r.advantage_eps).abs() < 1e-9);
    }

    #[test]
    fn measuring_bob_rejected() {
        let spec = crate::adversaries::full_measurement_bob().with_round("hold", vec![]);
        assert!(matches!(
            sealing_metrics(&spec, T),
            Err(Error::NotUnitaryAttack(_))
        ));
        let m = StrategySpec::new("m", 0).with_round(
            "hold",
            vec![Op::measure(
                vec![Reg::msg(wires::DEPOSIT)],
                crate::qmath::OrthogonalMeasurement::computational(1),
                "g",
            )],
        );
        assert!(matches!(sealing_metrics(&m, T), Err(Error::NotUnitaryAttack(_))));
    }

    #[test]
    fn haar_attacks() {
        let mut rng = seeded(21);
        for _ in 0..10 {
            let spec = bob_holding_unitary("h", haar_unitary(8, &mut rng), 2);
            let r = sealing_metrics(&spec, T).unwrap();
            assert!((r.detection_p - r.detection_enumerated).abs() < 1e-9);
            assert!(r.identity_residual < 1e-9);
            assert!(check_sealing_bound(&r, T).pass);
            assert!((measured_advantage(&spec, T).unwrap() - r.advantage_eps).abs() < 1e-9);
        }
    }

    #[test]
    fn modified_unconditional_matches_plain() {
        let spec = weak(0.3);
        let plain = sealing_metrics(&spec, T).unwrap();
        let m = modified_sealing_check((&spec, &spec), T).unwrap();
        assert!((m.advantage_eps - plain.advantage_eps).abs() < 1e-12);
        assert!((m.p_mod - plain.detection_p).abs() < 1e-12);
        assert!(m.pass);
        let id = identity_bob(T);
        assert!(modified_sealing_check((&id, &id), T).unwrap().pass);
    }

    #[test]
    fn modified_random_pairs() {
        let mut rng = seeded(22);
        for _ in 0..10 {
            let u = haar_unitary(4, &mut rng);
            let v = haar_unitary(4, &mut rng);
            let a0 = bob_holding_unitary("a0", u.clone(), 1);
            let a1 = bob_holding_unitary("a1", v.matmul(&u), 1);
            assert!(modified_sealing_check((&a0, &a1), T).unwrap().pass);
        }
    }
}
