//! Binding: how far Alice can shift her opening after the deposit.

use rand::Rng;
use serde::Serialize;

use crate::adversaries::bob_holding_unitary;
use crate::error::{Error, Result};
use crate::protocols::honest::encode;
use crate::protocols::{
    escrow_deposit_state, honest_escrow, run_escrow, wires, Challenge, EscrowParams, Op, Party,
    Reg, StrategySpec, Verdict,
};
use crate::qmath::random::haar_unitary;
use crate::qmath::{CMatrix, OrthogonalMeasurement};

use super::BoundCheck;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BindingReport {
    pub theta: f64,
    pub p0: f64,
    pub p1: f64,
    pub p_err: f64,
    pub q0: f64,
    pub q1: f64,
    pub q_err: f64,
    pub gamma_observed: f64,
    /// `(√p_err + √q_err) / cos 2θ`.
    pub bound: f64,
    /// `2√ε / cos 2θ` with `ε = max(p_err, q_err)`.
    pub theorem_bound: f64,
}

/// Fixes Alice's input bit inside her own deposit round.
pub fn with_input(spec: &StrategySpec, bit: usize) -> StrategySpec {
    let mut w = vec![0.0; 2];
    w[bit] = 1.0;
    let mut ops = vec![Op::Coin {
        weights: w,
        key: "input".into(),
    }];
    ops.extend(spec.round("deposit").iter().cloned());
    let mut out = spec.clone().with_round("deposit", ops);
    out.name = format!("{}[input={bit}]", spec.name);
    out
}

/// Runs both strategies against honest Bob with the reveal challenge.
///
/// `p_b` / `q_b` are the probabilities that Alice announces `b` (whatever
/// Bob's verdict), `p_err` / `q_err` that Bob rejects. Both strategies run
/// with record `input = 0`; use [`with_input`] to pin other inputs.
pub fn binding_metrics(
    alice0: &StrategySpec,
    alice1: &StrategySpec,
    theta: f64,
) -> Result<BindingReport> {
    let params = EscrowParams::new(theta)?;
    let r0 = escrow_deposit_state(alice0, 0)?;
    let r1 = escrow_deposit_state(alice1, 0)?;
    let dev = r0.matrix().max_abs_diff(r1.matrix());
    if dev > 1e-9 {
        return Err(Error::DepositMismatch(dev));
    }
    let (_, bob) = honest_escrow(params);
    let stats = |alice: &StrategySpec| -> Result<(f64, f64, f64)> {
        let d = run_escrow(alice, &bob, Challenge::RevealToBob, 0)?;
        Ok((
            d.message_probability(wires::BIT, 0),
            d.message_probability(wires::BIT, 1),
            d.verdict_probability(Party::Bob, Some(Verdict::Err)),
        ))
    };
    let (p0, p1, p_err) = stats(alice0)?;
    let (q0, q1, q_err) = stats(alice1)?;
    let c = (2.0 * theta).cos();
    Ok(BindingReport {
        theta,
        p0,
        p1,
        p_err,
        q0,
        q1,
        q_err,
        gamma_observed: (p0 - q0).abs().max((p1 - q1).abs()),
        bound: (p_err.sqrt() + q_err.sqrt()) / c,
        theorem_bound: 2.0 * p_err.max(q_err).sqrt() / c,
    })
}

/// `gamma_observed ≤ (√p_err + √q_err)/cos 2θ`.
pub fn check_binding_bound(report: &BindingReport) -> BoundCheck {
    BoundCheck::new(report.gamma_observed, report.bound)
}

/// `gamma_observed ≤ 2√ε/cos 2θ`.
pub fn check_binding_theorem(report: &BindingReport) -> BoundCheck {
    BoundCheck::new(report.gamma_observed, report.theorem_bound)
}

/// Alice with two ancilla qubits: deposits the first column of `prep` on
/// `(A.anc0, A.anc1, dep)`, then applies `opening` to the ancillas and
/// announces their measured value as `(b, x)`.
pub fn general_alice(prep: &CMatrix, opening: &CMatrix) -> StrategySpec {
    let anc = vec![Reg::Anc(0), Reg::Anc(1)];
    let mut all = anc.clone();
    all.push(Reg::msg(wires::DEPOSIT));
    let reveal = vec![
        Op::unitary(anc.clone(), opening.clone()),
        Op::measure(vec![Reg::Anc(0)], OrthogonalMeasurement::computational(1), "b"),
        Op::measure(vec![Reg::Anc(1)], OrthogonalMeasurement::computational(1), "x"),
        encode("b", &[wires::BIT.to_string()]),
        encode("x", &wires::index(1)),
        Op::branch(
            "b",
            vec![
                vec![Op::Declare(Verdict::Zero)],
                vec![Op::Declare(Verdict::One)],
            ],
        ),
    ];
    StrategySpec::new("general-alice", 2)
        .with_round("deposit", vec![Op::unitary(all, prep.clone())])
        .with_round("reveal", reveal)
}

/// Two Haar-random openings of one Haar-random deposit.
pub fn random_binding_pair<R: Rng + ?Sized>(rng: &mut R) -> (StrategySpec, StrategySpec) {
    let prep = haar_unitary(8, rng);
    let o0 = haar_unitary(4, rng);
    let o1 = haar_unitary(4, rng);
    (general_alice(&prep, &o0), general_alice(&prep, &o1))
}

/// Bob with two ancillas applying a Haar-random unitary while holding.
pub fn random_sealing_attack<R: Rng + ?Sized>(rng: &mut R) -> StrategySpec {
    bob_holding_unitary("haar-bob", haar_unitary(8, rng), 2)
}
