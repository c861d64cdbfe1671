//! Protocol state machines: bit escrow, the biased coin flip, and the weak
//! commitment composed from them.

pub mod encoding;
pub mod exec;
pub mod honest;
pub mod runners;
pub mod strategy;

pub use encoding::{phi, phi_bx, phi_bx_angle, EncodingFamily, EscrowParams};
pub use exec::{Enumerate, Message, Mode, Party, Phase, ProtocolState, Sample, Verdict};
pub use runners::{
    escrow_deposit_state, monte_carlo, run_coinflip, run_coinflip_with, run_escrow,
    run_escrow_with, run_weak_commitment, run_weak_commitment_with, Challenge, OutcomeBranch,
    OutcomeDistribution, SampledVerdicts, VerdictPair,
};
pub use strategy::{wires, Op, Reg, StrategySpec, MAX_ANCILLAS};

use std::f64::consts::PI;

/// Angle fixed by the coin-flip protocol.
pub const COINFLIP_THETA: f64 = PI / 8.0;

/// Honest escrow pair for the four-state encoding.
pub fn honest_escrow(params: EscrowParams) -> (StrategySpec, StrategySpec) {
    let f = EncodingFamily::four_state(params.theta);
    (honest::escrow_alice(&f), honest::escrow_bob(&f))
}

/// Honest coin-flip pair (`θ = π/8`).
pub fn honest_coinflip() -> (StrategySpec, StrategySpec) {
    let f = EncodingFamily::four_state(COINFLIP_THETA);
    (honest::coinflip_alice(&f), honest::coinflip_bob(&f))
}

/// Honest weak-commitment pair; the escrow uses `params`, the embedded coin
/// flip `θ = π/8`.
pub fn honest_weak_commitment(params: EscrowParams) -> (StrategySpec, StrategySpec) {
    let f = EncodingFamily::four_state(params.theta);
    let flip = EncodingFamily::four_state(COINFLIP_THETA);
    (honest::weak_alice(&f, &flip), honest::weak_bob(&f, &flip))
}
