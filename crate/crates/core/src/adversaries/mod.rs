//! Cheating strategies, baselines and the adversary optimizer.

pub mod baselines;
pub mod optimize;
pub mod quadratic;
pub mod space;

pub use baselines::{
    baseline_strategies, claim_zero_alice, delayed_alice_coinflip, delayed_alice_escrow,
    full_measurement_bob, identity_bob, restricted_alice, Baseline, ProtocolKind,
};
pub use optimize::{
    optimize, Evaluation, Evaluator, Objective, OptimizeResult, OptimizerConfig, Stage, TraceEntry,
    PENALTY,
};
pub use quadratic::{
    alice_quadratic, alice_quadratic_four_state, bob_holding_unitary, bob_weak_measurement,
    weak_measurement_unitary, weak_measurement_unitary_with, weak_rotation, AliceQuadraticParams,
    BobWeakParams,
};
pub use space::{
    angle_count, parameterize, state_from_angles, unitary_from_angles, AdversarySpace,
};
