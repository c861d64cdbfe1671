//! Reference strategies: honest play and simple deviations.

use serde::Serialize;

use crate::protocols::honest::{self, declare_bit, declare_xor_keys, encode, verify, Index};
use crate::protocols::{
    phi_bx, wires, EncodingFamily, EscrowParams, Op, Party, Reg, StrategySpec, Verdict,
    COINFLIP_THETA,
};
use crate::qmath::matrix::unitary_with_first_column;
use crate::qmath::{sign_projectors, OrthogonalMeasurement, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProtocolKind {
    Escrow,
    Coinflip,
}

#[derive(Debug, Clone)]
pub struct Baseline {
    pub name: String,
    pub protocol: ProtocolKind,
    pub party: Party,
    pub spec: StrategySpec,
}

fn entry(name: &str, protocol: ProtocolKind, party: Party, mut spec: StrategySpec) -> Baseline {
    spec.name = name.to_string();
    Baseline {
        name: name.to_string(),
        protocol,
        party,
        spec,
    }
}

/// Honest parties plus the simple deviations, for `θ = π/8`.
pub fn baseline_strategies() -> Vec<Baseline> {
    use ProtocolKind::*;
    let p = EscrowParams::default();
    let fam = EncodingFamily::four_state(p.theta);
    let flip = EncodingFamily::four_state(COINFLIP_THETA);
    vec![
        entry("honest-alice", Escrow, Party::Alice, honest::escrow_alice(&fam)),
        entry("honest-bob", Escrow, Party::Bob, honest::escrow_bob(&fam)),
        entry("honest-alice", Coinflip, Party::Alice, honest::coinflip_alice(&flip)),
        entry("honest-bob", Coinflip, Party::Bob, honest::coinflip_bob(&flip)),
        entry("delayed-alice", Escrow, Party::Alice, delayed_alice_escrow(p.theta)),
        entry("delayed-alice", Coinflip, Party::Alice, delayed_alice_coinflip()),
        entry("claim-zero-alice", Escrow, Party::Alice, claim_zero_alice(p.theta)),
        entry("identity-bob", Escrow, Party::Bob, identity_bob(p.theta)),
        entry("full-measurement-bob", Coinflip, Party::Bob, full_measurement_bob()),
    ]
}

/// `½ Σ_{b,x} |b⟩|x⟩|φ_{b,x}⟩` on `(A.anc0, A.anc1, dep)`.
fn delayed_deposit(theta: f64) -> Op {
    let mut amps = vec![ZERO; 8];
    for b in 0..2 {
        for x in 0..2 {
            let phi = phi_bx(b, x, theta);
            for (s, z) in phi.amplitudes().iter().enumerate() {
                amps[(b * 2 + x) * 2 + s] = z * 0.5;
            }
        }
    }
    let u = unitary_with_first_column(&amps).expect("unit vector");
    Op::unitary(vec![Reg::Anc(0), Reg::Anc(1), Reg::msg(wires::DEPOSIT)], u)
}

fn read_choice() -> Vec<Op> {
    vec![
        Op::measure(vec![Reg::Anc(0)], OrthogonalMeasurement::computational(1), "b"),
        Op::measure(vec![Reg::Anc(1)], OrthogonalMeasurement::computational(1), "x"),
    ]
}

/// Alice entangling the deposit with a coherent copy of `(b, x)` and only
/// measuring it when asked to open. Ignores her input.
pub fn delayed_alice_escrow(theta: f64) -> StrategySpec {
    let fam = EncodingFamily::four_state(theta);
    let mut reveal = read_choice();
    reveal.extend([
        encode("b", &[wires::BIT.to_string()]),
        encode("x", &wires::index(1)),
        declare_bit("b"),
    ]);
    let mut check = read_choice();
    check.push(verify(&fam, wires::DEPOSIT, "b", Index::Whole("x"), &|b| {
        vec![Op::Declare(Verdict::from_bit(b))]
    }));
    StrategySpec::new("delayed-alice", 2)
        .with_round("deposit", vec![delayed_deposit(theta)])
        .with_round("reveal", reveal)
        .with_round("check", check)
}

/// Coin-flip version of [`delayed_alice_escrow`].
pub fn delayed_alice_coinflip() -> StrategySpec {
    let mut reveal = vec![Op::receive(wires::CHOICE, "bp")];
    reveal.extend(read_choice());
    reveal.extend([
        encode("b", &[wires::BIT.to_string()]),
        encode("x", &wires::index(1)),
        declare_xor_keys("b", "bp"),
    ]);
    StrategySpec::new("delayed-alice", 2)
        .with_round("deposit", vec![delayed_deposit(COINFLIP_THETA)])
        .with_round("reveal", reveal)
}

/// Honest deposit of the input, but always announces `b = 0` with the
/// honest index.
pub fn claim_zero_alice(theta: f64) -> StrategySpec {
    let honest = honest::escrow_alice(&EncodingFamily::four_state(theta));
    let deposit = honest.round("deposit").to_vec();
    let check = honest.round("check").to_vec();
    StrategySpec::new("claim-zero-alice", 0)
        .with_round("deposit", deposit)
        .with_round(
            "reveal",
            vec![encode("x", &wires::index(1)), Op::Declare(Verdict::Zero)],
        )
        .with_round("check", check)
}

/// Bob who leaves the deposit alone and verifies honestly.
pub fn identity_bob(theta: f64) -> StrategySpec {
    let mut s = honest::escrow_bob(&EncodingFamily::four_state(theta));
    s.name = "identity-bob".into();
    s
}

/// Coin-flip Bob measuring the deposit with the optimal distinguishing
/// measurement and choosing `b′` equal to his guess.
pub fn full_measurement_bob() -> StrategySpec {
    let fam = EncodingFamily::four_state(COINFLIP_THETA);
    let d = fam.density(0).matrix() - fam.density(1).matrix();
    let (pos, neg) = sign_projectors(&d).expect("hermitian");
    let m = OrthogonalMeasurement::new(vec![pos, neg], vec!["0".into(), "1".into()])
        .expect("complementary projectors");
    let verify = honest::coinflip_bob(&fam).round("verify").to_vec();
    StrategySpec::new("full-measurement-bob", 0)
        .with_round(
            "choose",
            vec![
                Op::measure(vec![Reg::msg(wires::DEPOSIT)], m, "bp"),
                encode("bp", &[wires::CHOICE.to_string()]),
            ],
        )
        .with_round("verify", verify)
}

/// Alice restricted to `φ_{0,1}` for 0 and `φ_{1,0}` for 1, otherwise honest.
/// Exposed for exploration only.
pub fn restricted_alice(theta: f64) -> StrategySpec {
    let fam = EncodingFamily::four_state(theta);
    let honest = honest::escrow_alice(&fam);
    let deposit = Op::branch(
        "input",
        (0..2)
            .map(|b| {
                let x = 1 - b;
                let u = unitary_with_first_column(fam.state(b, x)).expect("unit vector");
                let mut w = vec![0.0; 2];
                w[x] = 1.0;
                vec![
                    Op::Coin {
                        weights: w,
                        key: "x".into(),
                    },
                    Op::unitary(vec![Reg::msg(wires::DEPOSIT)], u),
                ]
            })
            .collect(),
    );
    StrategySpec::new("restricted-alice", 0)
        .with_round("deposit", vec![deposit])
        .with_round("reveal", honest.round("reveal").to_vec())
        .with_round("check", honest.round("check").to_vec())
}
