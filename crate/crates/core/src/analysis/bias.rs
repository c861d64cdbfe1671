//! Coin-flip bias against one honest player.

use serde::Serialize;

use crate::error::Result;
use crate::protocols::{honest_coinflip, run_coinflip, Party, StrategySpec, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HonestSide {
    AliceHonest,
    BobHonest,
}

impl HonestSide {
    pub fn party(self) -> Party {
        match self {
            HonestSide::AliceHonest => Party::Alice,
            HonestSide::BobHonest => Party::Bob,
        }
    }
}

/// Distribution of the honest player's verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasReport {
    pub honest: HonestSide,
    pub win_prob_0: f64,
    pub win_prob_1: f64,
    pub err_prob: f64,
    /// `max(win_prob_0, win_prob_1) − ½`.
    pub delta_observed: f64,
    /// Probability the cheater wins: outcome 0 for Bob, outcome 1 for Alice
    /// (a caught Alice loses).
    pub cheater_win: f64,
}

impl BiasReport {
    pub fn total(&self) -> f64 {
        self.win_prob_0 + self.win_prob_1 + self.err_prob
    }
}

/// Exact bias of `adversary` playing the coin flip against the honest party.
pub fn coinflip_bias(honest: HonestSide, adversary: &StrategySpec) -> Result<BiasReport> {
    let (ha, hb) = honest_coinflip();
    let d = match honest {
        HonestSide::AliceHonest => run_coinflip(&ha, adversary)?,
        HonestSide::BobHonest => run_coinflip(adversary, &hb)?,
    };
    let p = honest.party();
    let win_prob_0 = d.verdict_probability(p, Some(Verdict::Zero));
    let win_prob_1 = d.verdict_probability(p, Some(Verdict::One));
    let err_prob = d.verdict_probability(p, Some(Verdict::Err));
    Ok(BiasReport {
        honest,
        win_prob_0,
        win_prob_1,
        err_prob,
        delta_observed: win_prob_0.max(win_prob_1) - 0.5,
        cheater_win: match honest {
            HonestSide::AliceHonest => win_prob_0,
            HonestSide::BobHonest => win_prob_1,
        },
    })
}

/// `cos²(π/8)`: the best honest-Alice-side win probability for Bob.
pub fn bob_cap() -> f64 {
    (std::f64::consts::PI / 8.0).cos().powi(2)
}

/// Upper bound on a cheating Alice's win probability, `0.9143`
/// (rounded up from `(√8 − 1)/2`).
pub const ALICE_CAP: f64 = 0.9143;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{delayed_alice_coinflip, full_measurement_bob};

    #[test]
    fn honest_is_fair() {
        let (a, b) = honest_coinflip();
        for (side, adv) in [(HonestSide::AliceHonest, &b), (HonestSide::BobHonest, &a)] {
            let r = coinflip_bias(side, adv).unwrap();
            assert!(r.delta_observed.abs() < 1e-12);
            assert!(r.err_prob.abs() < 1e-15);
            assert!((r.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_measurement_bob_attains_cap() {
        let r = coinflip_bias(HonestSide::AliceHonest, &full_measurement_bob()).unwrap();
        assert!((r.cheater_win - bob_cap()).abs() < 1e-12);
        assert!((bob_cap() - 0.853_553_390_6).abs() < 1e-10);
    }

    #[test]
    fn delayed_alice_no_gain() {
        let r = coinflip_bias(HonestSide::BobHonest, &delayed_alice_coinflip()).unwrap();
        assert!((r.cheater_win - 0.5).abs() < 1e-12);
    }

    #[test]
    fn alice_cap_value() {
        assert!((8f64.sqrt() - 1.0) / 2.0 <= ALICE_CAP);
    }
}
