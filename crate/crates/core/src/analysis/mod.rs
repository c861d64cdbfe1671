//! Metric extraction and checks against the binding, sealing and bias bounds.

pub mod bias;
pub mod binding;
pub mod sealing;

pub use bias::{bob_cap, coinflip_bias, BiasReport, HonestSide, ALICE_CAP};
pub use binding::{
    binding_metrics, check_binding_bound, check_binding_theorem, general_alice,
    random_binding_pair, random_sealing_attack, with_input, BindingReport,
};
pub use sealing::{
    attack_unitary, check_sealing_bound, detection_given, frontier_ratio, measured_advantage,
    modified_sealing_check, reveal_first_constant, sealing_bound, sealing_constant, sealing_metrics,
    w_decomposition, ModifiedSealingReport, SealingReport,
};

use serde::Serialize;

use crate::adversaries::Evaluation;
use crate::error::Result;
use crate::protocols::StrategySpec;

/// Slack allowed on every bound comparison.
pub const TOL: f64 = 1e-9;

/// Outcome of comparing an observed quantity with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    pub observed: f64,
    pub bound: f64,
    /// `observed / bound` (`None` for a zero bound).
    pub ratio: Option<f64>,
}

impl BoundCheck {
    pub fn new(observed: f64, bound: f64) -> Self {
        BoundCheck {
            pass: observed <= bound + TOL,
            observed,
            bound,
            ratio: (bound > 0.0).then(|| observed / bound),
        }
    }
}

/// Coin-flip evaluator for a cheating Alice against honest Bob.
pub fn evaluate_coinflip_alice(spec: &StrategySpec) -> Result<Evaluation> {
    let r = coinflip_bias(HonestSide::BobHonest, spec)?;
    Ok(Evaluation {
        win: r.cheater_win,
        advantage: r.cheater_win - 0.5,
        detection: r.err_prob,
    })
}

/// Coin-flip evaluator for a cheating Bob against honest Alice.
pub fn evaluate_coinflip_bob(spec: &StrategySpec) -> Result<Evaluation> {
    let r = coinflip_bias(HonestSide::AliceHonest, spec)?;
    Ok(Evaluation {
        win: r.cheater_win,
        advantage: r.cheater_win - 0.5,
        detection: r.err_prob,
    })
}

/// Escrow evaluator for a unitary Bob: sealing advantage and detection.
pub fn evaluate_sealing(theta: f64) -> impl Fn(&StrategySpec) -> Result<Evaluation> + Sync {
    move |spec| {
        let r = sealing_metrics(spec, theta)?;
        Ok(Evaluation {
            win: 0.5 + r.advantage_eps,
            advantage: r.advantage_eps,
            detection: r.detection_p,
        })
    }
}
