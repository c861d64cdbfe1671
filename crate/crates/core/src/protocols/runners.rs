//! Schedules for the escrow, coin-flip and weak-commitment protocols.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::exec::{Enumerate, Message, Mode, Party, Phase, ProtocolState, Sample, Session};
use super::strategy::{wires, StrategySpec};
use super::Verdict;
use crate::error::{Error, Result};
use crate::qmath::random::stream;
use crate::qmath::{CMatrix, DensityMatrix, StateVector};

/// Which check closes an escrow run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Challenge {
    RevealToBob,
    ReturnToAlice,
}

/// One leaf of the execution tree.
#[derive(Debug, Clone)]
pub struct OutcomeBranch {
    pub probability: f64,
    pub alice: Option<Verdict>,
    pub bob: Option<Verdict>,
    pub transcript: Vec<Message>,
    pub records: [BTreeMap<String, usize>; 2],
    pub state: StateVector,
}

impl OutcomeBranch {
    pub fn verdict(&self, party: Party) -> Option<Verdict> {
        match party {
            Party::Alice => self.alice,
            Party::Bob => self.bob,
        }
    }

    /// First transcript bit carried on `wire`.
    pub fn message(&self, wire: &str) -> Option<usize> {
        self.transcript.iter().find(|m| m.wire == wire).map(|m| m.bit)
    }
}

/// Joint verdict outcome `(alice, bob)`.
pub type VerdictPair = (Option<Verdict>, Option<Verdict>);

/// All leaves of a run.
#[derive(Debug, Clone, Default)]
pub struct OutcomeDistribution {
    pub branches: Vec<OutcomeBranch>,
}

impl OutcomeDistribution {
    fn from_states(states: Vec<(f64, ProtocolState)>) -> Self {
        let branches = states
            .into_iter()
            .map(|(p, s)| OutcomeBranch {
                probability: p,
                alice: s.verdicts[0],
                bob: s.verdicts[1],
                transcript: s.transcript,
                records: s.records,
                state: s.state,
            })
            .collect();
        OutcomeDistribution { branches }
    }

    pub fn total(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn probability(&self, pred: impl Fn(&OutcomeBranch) -> bool) -> f64 {
        self.branches
            .iter()
            .filter(|b| pred(b))
            .map(|b| b.probability)
            .sum()
    }

    pub fn verdict_probability(&self, party: Party, v: Option<Verdict>) -> f64 {
        self.probability(|b| b.verdict(party) == v)
    }

    /// Number of leaves in which `party` declared `Err`.
    pub fn err_branches(&self, party: Party) -> usize {
        self.branches
            .iter()
            .filter(|b| b.verdict(party) == Some(Verdict::Err))
            .count()
    }

    pub fn joint_verdicts(&self) -> BTreeMap<VerdictPair, f64> {
        let mut out = BTreeMap::new();
        for b in &self.branches {
            *out.entry((b.alice, b.bob)).or_insert(0.0) += b.probability;
        }
        out
    }

    /// Probability that `wire` was read as `bit` by its recipient.
    pub fn message_probability(&self, wire: &str, bit: usize) -> f64 {
        self.probability(|b| b.message(wire) == Some(bit))
    }

    /// `Σ_i p_i Tr_rest |ψ_i⟩⟨ψ_i|` over the leaves selected by `pred`
    /// (unnormalised when `pred` drops leaves).
    pub fn reduced_state<S: AsRef<str>>(
        &self,
        keep: &[S],
        pred: impl Fn(&OutcomeBranch) -> bool,
    ) -> Result<CMatrix> {
        let d = 1usize << keep.len();
        let mut m = CMatrix::zeros(d, d);
        for b in self.branches.iter().filter(|b| pred(b)) {
            let r = b.state.partial_trace(keep)?;
            m = &m + &r.matrix().scale_real(b.probability);
        }
        Ok(m)
    }
}

fn check_index_bits(alice: &StrategySpec, bob: &StrategySpec) -> Result<usize> {
    if alice.index_bits != bob.index_bits {
        return Err(Error::MalformedStrategy(format!(
            "`{}` opens with {} index bits but `{}` expects {}",
            alice.name, alice.index_bits, bob.name, bob.index_bits
        )));
    }
    Ok(alice.index_bits)
}

fn check_bit(bit: usize) -> Result<()> {
    if bit > 1 {
        return Err(Error::InvalidParameter(format!("{bit} is not a bit")));
    }
    Ok(())
}

fn escrow_deposit<M: Mode>(s: &mut Session<'_, M>) -> Result<()> {
    s.set_phase(Phase::Deposit);
    s.allocate(wires::DEPOSIT, Party::Alice)?;
    s.round(Party::Alice, "deposit")?;
    s.send(wires::DEPOSIT, Party::Bob)?;
    s.round(Party::Bob, "hold")
}

/// Protocol 1 with the given strategies, challenge and claimed bit.
///
/// Wire layout: `dep` (deposit qubit), `b` and the index wires (`x` for one
/// bit) for the opening; ancillas `A.anc*`, `B.anc*`. Rounds: Alice
/// `deposit`, Bob `hold`, then either Alice `reveal` / Bob `verify` or
/// Bob `return` / Alice `check`.
pub fn run_escrow(
    alice: &StrategySpec,
    bob: &StrategySpec,
    challenge: Challenge,
    claimed_bit: usize,
) -> Result<OutcomeDistribution> {
    run_escrow_with(alice, bob, challenge, claimed_bit, Enumerate)
}

pub fn run_escrow_with<M: Mode>(
    alice: &StrategySpec,
    bob: &StrategySpec,
    challenge: Challenge,
    claimed_bit: usize,
    mode: M,
) -> Result<OutcomeDistribution> {
    check_bit(claimed_bit)?;
    let bits = check_index_bits(alice, bob)?;
    let mut s = Session::new(alice, bob, mode)?;
    s.set_record(Party::Alice, "input", claimed_bit);
    escrow_deposit(&mut s)?;
    s.set_phase(Phase::Challenge);
    match challenge {
        Challenge::RevealToBob => {
            s.set_phase(Phase::Reveal);
            let mut msgs = vec![wires::BIT.to_string()];
            msgs.extend(wires::index(bits));
            for w in &msgs {
                s.allocate(w, Party::Alice)?;
            }
            s.round(Party::Alice, "reveal")?;
            for w in &msgs {
                s.send(w, Party::Bob)?;
            }
            s.round(Party::Bob, "verify")?;
        }
        Challenge::ReturnToAlice => {
            s.set_phase(Phase::Return);
            s.round(Party::Bob, "return")?;
            s.send(wires::DEPOSIT, Party::Alice)?;
            s.round(Party::Alice, "check")?;
        }
    }
    s.set_phase(Phase::Done);
    Ok(OutcomeDistribution::from_states(s.into_branches()))
}

/// Bob's view of the deposit right after Alice's `deposit` round.
pub fn escrow_deposit_state(alice: &StrategySpec, claimed_bit: usize) -> Result<DensityMatrix> {
    check_bit(claimed_bit)?;
    let idle = StrategySpec::new("idle", 0);
    let mut s = Session::new(alice, &idle, Enumerate)?;
    s.set_record(Party::Alice, "input", claimed_bit);
    s.allocate(wires::DEPOSIT, Party::Alice)?;
    s.round(Party::Alice, "deposit")?;
    let mut m = CMatrix::zeros(2, 2);
    for (p, st) in s.branches() {
        let r = st.state.partial_trace(&[wires::DEPOSIT])?;
        m = &m + &r.matrix().scale_real(*p);
    }
    DensityMatrix::new(&[wires::DEPOSIT], m)
}

fn coinflip_schedule<M: Mode>(s: &mut Session<'_, M>, prefix: &dyn Fn(&str) -> String, bits: usize, tag: &str) -> Result<()> {
    let round = |name: &str| {
        if tag.is_empty() {
            name.to_string()
        } else {
            format!("{tag}_{name}")
        }
    };
    let dep = prefix(wires::DEPOSIT);
    let choice = prefix(wires::CHOICE);
    let mut msgs = vec![prefix(wires::BIT)];
    msgs.extend(wires::index(bits).iter().map(|w| prefix(w)));

    s.allocate(&dep, Party::Alice)?;
    s.round(Party::Alice, &round("deposit"))?;
    s.send(&dep, Party::Bob)?;
    s.allocate(&choice, Party::Bob)?;
    s.round(Party::Bob, &round("choose"))?;
    s.send(&choice, Party::Alice)?;
    for w in &msgs {
        s.allocate(w, Party::Alice)?;
    }
    s.round(Party::Alice, &round("reveal"))?;
    for w in &msgs {
        s.send(w, Party::Bob)?;
    }
    s.round(Party::Bob, &round("verify"))
}

/// Protocol 2. Wires: `dep`, `bp` (Bob's guess), `b`, `x`. Rounds: Alice
/// `deposit`, Bob `choose`, Alice `reveal`, Bob `verify`. The result is
/// `b ⊕ b′`; Bob wins on 0 and Alice on 1.
pub fn run_coinflip(alice: &StrategySpec, bob: &StrategySpec) -> Result<OutcomeDistribution> {
    run_coinflip_with(alice, bob, Enumerate)
}

pub fn run_coinflip_with<M: Mode>(
    alice: &StrategySpec,
    bob: &StrategySpec,
    mode: M,
) -> Result<OutcomeDistribution> {
    let bits = check_index_bits(alice, bob)?;
    let mut s = Session::new(alice, bob, mode)?;
    s.set_phase(Phase::Deposit);
    let ident = |w: &str| w.to_string();
    coinflip_schedule(&mut s, &ident, bits, "")?;
    s.set_phase(Phase::Done);
    Ok(OutcomeDistribution::from_states(s.into_branches()))
}

/// Record key holding each party's view of the embedded coin flip
/// ([`Verdict::code`]).
pub const FLIP_RECORD: &str = "flip";

fn flip_view(s: &ProtocolState, party: Party) -> usize {
    s.record(party, FLIP_RECORD).unwrap_or(3)
}

/// Bob challenges Alice when his coin view says she lost.
fn reveal_demanded(s: &ProtocolState) -> bool {
    flip_view(s, Party::Bob) == 0
}

/// Alice challenges Bob when her coin view says he lost.
fn return_demanded(s: &ProtocolState) -> bool {
    flip_view(s, Party::Alice) == 1
}

/// Protocol 3: escrow deposit, Alice sends `b`, the coin flip is played on
/// `flip.*` wires (rounds prefixed `flip_`), then the loser is challenged.
///
/// A flip result of 0 means Alice lost and must send her index (`reveal_index`
/// / Bob `check_reveal`); 1 means Bob lost and must return the deposit
/// (`return` / Alice `check_return`). Each party acts on its own view of the
/// flip. A flip `Err` seen by Bob ends the run with Bob declaring `Err`.
/// Parties without a verdict afterwards run `conclude`.
pub fn run_weak_commitment(
    alice: &StrategySpec,
    bob: &StrategySpec,
    deposited_bit: usize,
) -> Result<OutcomeDistribution> {
    run_weak_commitment_with(alice, bob, deposited_bit, Enumerate)
}

pub fn run_weak_commitment_with<M: Mode>(
    alice: &StrategySpec,
    bob: &StrategySpec,
    deposited_bit: usize,
    mode: M,
) -> Result<OutcomeDistribution> {
    check_bit(deposited_bit)?;
    let bits = check_index_bits(alice, bob)?;
    let mut s = Session::new(alice, bob, mode)?;
    s.set_record(Party::Alice, "input", deposited_bit);
    escrow_deposit(&mut s)?;

    s.set_phase(Phase::Reveal);
    s.allocate(wires::BIT, Party::Alice)?;
    s.round(Party::Alice, "open_bit")?;
    s.send(wires::BIT, Party::Bob)?;
    s.round(Party::Bob, "receive_bit")?;

    s.set_phase(Phase::Challenge);
    coinflip_schedule(&mut s, &wires::flip, 1, "flip")?;
    s.update(
        |_| true,
        |st| {
            for p in [Party::Alice, Party::Bob] {
                let code = Verdict::code(st.verdicts[p.index()]);
                st.records[p.index()].insert(FLIP_RECORD.to_string(), code);
                st.verdicts[p.index()] = None;
            }
            if flip_view(st, Party::Bob) == 2 {
                st.verdicts[Party::Bob.index()] = Some(Verdict::Err);
            }
        },
    );

    let idx = wires::index(bits);
    s.update(reveal_demanded, |st| st.phase = Phase::Reveal);
    for w in &idx {
        s.allocate_when(w, Party::Alice, reveal_demanded)?;
    }
    s.round_when(Party::Alice, "reveal_index", reveal_demanded)?;
    for w in &idx {
        s.send_when(w, Party::Bob, reveal_demanded)?;
    }
    s.round_when(Party::Bob, "check_reveal", reveal_demanded)?;

    s.update(return_demanded, |st| st.phase = Phase::Return);
    s.round_when(Party::Bob, "return", return_demanded)?;
    s.send_when(wires::DEPOSIT, Party::Alice, return_demanded)?;
    s.round_when(Party::Alice, "check_return", return_demanded)?;

    for p in [Party::Alice, Party::Bob] {
        s.round_when(p, "conclude", |st| st.verdicts[p.index()].is_none())?;
    }
    s.set_phase(Phase::Done);
    Ok(OutcomeDistribution::from_states(s.into_branches()))
}

/// Relative frequencies of the joint verdicts over `samples` sampled runs.
#[derive(Debug, Clone)]
pub struct SampledVerdicts {
    pub samples: u64,
    pub counts: BTreeMap<VerdictPair, u64>,
}

impl SampledVerdicts {
    pub fn frequency(&self, key: &VerdictPair) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.samples as f64
    }
}

const CHUNK: u64 = 4096;

/// Runs `run` `samples` times with independent outcome draws. Chunks of
/// runs use their own generator stream, so the result does not depend on
/// the number of worker threads.
pub fn monte_carlo<F>(samples: u64, seed: u64, run: F) -> Result<SampledVerdicts>
where
    F: Fn(&mut Sample<&mut crate::qmath::random::SeededRng>) -> Result<OutcomeDistribution>
        + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<BTreeMap<VerdictPair, u64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut counts = BTreeMap::new();
            for _ in 0..n {
                let mut mode = Sample { rng: &mut rng };
                let dist = run(&mut mode)?;
                let leaf = &dist.branches[0];
                *counts.entry((leaf.alice, leaf.bob)).or_insert(0) += 1;
            }
            Ok(counts)
        })
        .collect();
    let mut counts = BTreeMap::new();
    for part in partial {
        for (k, v) in part? {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(SampledVerdicts { samples, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::encoding::{phi_bx, EscrowParams};
    use crate::protocols::strategy::{Op, Reg};
    use crate::protocols::{honest_coinflip, honest_escrow, honest_weak_commitment};
    use crate::qmath::gates;
    use crate::qmath::matrix::unitary_with_first_column;
    use std::f64::consts::PI;

    #[test]
    fn honest_coinflip_is_fair() {
        let (a, b) = honest_coinflip();
        let d = run_coinflip(&a, &b).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!((d.verdict_probability(Party::Bob, Some(Verdict::Zero)) - 0.5).abs() < 1e-12);
        assert!((d.verdict_probability(Party::Bob, Some(Verdict::One)) - 0.5).abs() < 1e-12);
        assert_eq!(d.err_branches(Party::Bob), 0);
        assert_eq!(d.err_branches(Party::Alice), 0);
        assert!(d.branches.iter().all(|br| br.alice == br.bob));
    }

    #[test]
    fn honest_escrow_accepts_for_every_theta() {
        for theta in [PI / 16.0, PI / 12.0, PI / 8.0] {
            let (a, b) = honest_escrow(EscrowParams::new(theta).unwrap());
            for bit in 0..2 {
                let want = Some(Verdict::from_bit(bit));
                let d = run_escrow(&a, &b, Challenge::RevealToBob, bit).unwrap();
                assert_eq!(d.err_branches(Party::Bob), 0);
                assert!((d.verdict_probability(Party::Bob, want) - 1.0).abs() < 1e-12);
                let d = run_escrow(&a, &b, Challenge::ReturnToAlice, bit).unwrap();
                assert_eq!(d.err_branches(Party::Alice), 0);
                assert!((d.verdict_probability(Party::Alice, want) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_opening_is_caught_half_the_time() {
        let t = PI / 8.0;
        let prep = unitary_with_first_column(phi_bx(0, 1, t).amplitudes()).unwrap();
        let alice = StrategySpec::new("liar", 0)
            .with_round("deposit", vec![Op::unitary(vec![Reg::msg("dep")], prep)])
            .with_round("reveal", vec![Op::unitary(vec![Reg::msg("b")], gates::pauli_x())]);
        let (_, bob) = honest_escrow(EscrowParams::default());
        let d = run_escrow(&alice, &bob, Challenge::RevealToBob, 0).unwrap();
        let expect = phi_bx(1, 0, t).inner(&phi_bx(0, 1, t)).unwrap().norm_sqr();
        assert!((expect - 0.5).abs() < 1e-12);
        assert!((d.verdict_probability(Party::Bob, Some(Verdict::One)) - 0.5).abs() < 1e-12);
        assert!((d.verdict_probability(Party::Bob, Some(Verdict::Err)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_guess_leaves_result_uniform() {
        let (alice, _) = honest_coinflip();
        let (_, honest_bob) = honest_coinflip();
        let mut bob = honest_bob.clone();
        bob.rounds.insert("choose".into(), vec![]);
        bob.rounds.insert(
            "verify".into(),
            {
                let mut ops = honest_bob.round("verify").to_vec();
                ops.insert(0, Op::Coin { weights: vec![1.0], key: "bp".into() });
                ops
            },
        );
        let d = run_coinflip(&alice, &bob).unwrap();
        assert!((d.verdict_probability(Party::Alice, Some(Verdict::Zero)) - 0.5).abs() < 1e-12);
        assert!((d.message_probability("bp", 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn honest_weak_commitment_accepts() {
        let (a, b) = honest_weak_commitment(EscrowParams::default());
        for bit in 0..2 {
            let d = run_weak_commitment(&a, &b, bit).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-12);
            assert_eq!(d.err_branches(Party::Alice) + d.err_branches(Party::Bob), 0);
            let want = Some(Verdict::from_bit(bit));
            assert!((d.probability(|br| br.alice == want && br.bob == want) - 1.0).abs() < 1e-12);
            // half the runs challenge each side
            let reveal = d.probability(|br| br.records[1].get("flip") == Some(&0));
            assert!((reveal - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn consumed_wire_is_malformed() {
        let (_, bob) = honest_escrow(EscrowParams::default());
        let alice = StrategySpec::new("eater", 0)
            .with_round("deposit", vec![Op::receive("dep", "oops")]);
        assert!(matches!(
            run_escrow(&alice, &bob, Challenge::RevealToBob, 0),
            Err(Error::MalformedStrategy(_))
        ));
        let thief = StrategySpec::new("thief", 0)
            .with_round("deposit", vec![Op::unitary(vec![Reg::msg("bp")], gates::pauli_x())]);
        assert!(run_escrow(&thief, &bob, Challenge::RevealToBob, 0).is_err());
    }

    #[test]
    fn sampling_matches_enumeration_roughly() {
        let (a, b) = honest_coinflip();
        let mc = monte_carlo(20_000, 11, |m| run_coinflip_with(&a, &b, m)).unwrap();
        let zero = (Some(Verdict::Zero), Some(Verdict::Zero));
        let f = mc.frequency(&zero);
        assert!((f - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt());
        let again = monte_carlo(20_000, 11, |m| run_coinflip_with(&a, &b, m)).unwrap();
        assert_eq!(mc.counts, again.counts);
    }
}
