//! Branch-tree executor shared by all protocol runners.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::strategy::{Op, Reg, StrategySpec};
use crate::error::{Error, Result};
use crate::qmath::state::positions;
use crate::qmath::{OrthogonalMeasurement, StateVector};

/// Final decision of a party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Zero,
    One,
    Err,
}

impl Verdict {
    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Verdict::Zero
        } else {
            Verdict::One
        }
    }

    pub fn bit(self) -> Option<usize> {
        match self {
            Verdict::Zero => Some(0),
            Verdict::One => Some(1),
            Verdict::Err => None,
        }
    }

    /// Record encoding: 0, 1, 2 for `Err`, 3 for no verdict.
    pub fn code(v: Option<Verdict>) -> usize {
        match v {
            Some(Verdict::Zero) => 0,
            Some(Verdict::One) => 1,
            Some(Verdict::Err) => 2,
            None => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Zero => write!(f, "0"),
            Verdict::One => write!(f, "1"),
            Verdict::Err => write!(f, "err"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn index(self) -> usize {
        match self {
            Party::Alice => 0,
            Party::Bob => 1,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Party::Alice => "A",
            Party::Bob => "B",
        }
    }

    /// Wire label of this party's ancilla `i`.
    pub fn ancilla(self, i: usize) -> String {
        format!("{}.anc{i}", self.prefix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Deposit,
    Challenge,
    Reveal,
    Return,
    Done,
}

/// A classical bit as read by its honest recipient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub sender: Party,
    pub wire: String,
    pub bit: usize,
}

/// One node of the execution tree.
#[derive(Debug, Clone)]
pub struct ProtocolState {
    pub state: StateVector,
    pub records: [BTreeMap<String, usize>; 2],
    pub verdicts: [Option<Verdict>; 2],
    pub transcript: Vec<Message>,
    pub owners: BTreeMap<String, Party>,
    pub phase: Phase,
}

impl ProtocolState {
    pub fn record(&self, party: Party, key: &str) -> Option<usize> {
        self.records[party.index()].get(key).copied()
    }
}

/// How the executor treats a probabilistic split.
pub trait Mode {
    /// Receives every outcome with its weight; returns the branches to keep
    /// and their (conditional) weights.
    fn pick<T>(&mut self, options: Vec<(f64, T)>) -> Vec<(f64, T)>;
}

impl<M: Mode> Mode for &mut M {
    fn pick<T>(&mut self, options: Vec<(f64, T)>) -> Vec<(f64, T)> {
        (**self).pick(options)
    }
}

/// Keeps every outcome.
#[derive(Debug, Default, Clone, Copy)]
pub struct Enumerate;

impl Mode for Enumerate {
    fn pick<T>(&mut self, options: Vec<(f64, T)>) -> Vec<(f64, T)> {
        options
    }
}

/// Draws one outcome per split.
#[derive(Debug)]
pub struct Sample<R> {
    pub rng: R,
}

impl<R: Rng> Mode for Sample<R> {
    fn pick<T>(&mut self, options: Vec<(f64, T)>) -> Vec<(f64, T)> {
        let total: f64 = options.iter().map(|(w, _)| w).sum();
        let mut u = self.rng.random::<f64>() * total;
        let last = options.len() - 1;
        for (i, (w, item)) in options.into_iter().enumerate() {
            if u < w || i == last {
                return vec![(1.0, item)];
            }
            u -= w;
        }
        unreachable!("options is nonempty")
    }
}

/// Executes a two-party schedule over a branch tree.
pub struct Session<'a, M: Mode> {
    strategies: [&'a StrategySpec; 2],
    origins: BTreeMap<String, Party>,
    branches: Vec<(f64, ProtocolState)>,
    mode: M,
}

impl<'a, M: Mode> Session<'a, M> {
    /// Validates both strategies and allocates their ancillas in `|0⟩`.
    pub fn new(alice: &'a StrategySpec, bob: &'a StrategySpec, mode: M) -> Result<Self> {
        alice.validate()?;
        bob.validate()?;
        let mut owners = BTreeMap::new();
        let mut wires = Vec::new();
        for (party, spec) in [(Party::Alice, alice), (Party::Bob, bob)] {
            for i in 0..spec.ancillas {
                let w = party.ancilla(i);
                owners.insert(w.clone(), party);
                wires.push(w);
            }
        }
        let state = if wires.is_empty() {
            StateVector::empty()
        } else {
            StateVector::basis(&wires, 0)?
        };
        let root = ProtocolState {
            state,
            records: [BTreeMap::new(), BTreeMap::new()],
            verdicts: [None, None],
            transcript: Vec::new(),
            owners,
            phase: Phase::Deposit,
        };
        Ok(Session {
            strategies: [alice, bob],
            origins: BTreeMap::new(),
            branches: vec![(1.0, root)],
            mode,
        })
    }

    pub fn strategy(&self, party: Party) -> &StrategySpec {
        self.strategies[party.index()]
    }

    pub fn branches(&self) -> &[(f64, ProtocolState)] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<(f64, ProtocolState)> {
        self.branches
    }

    /// Applies `f` to every branch where `when` holds.
    pub fn update(
        &mut self,
        when: impl Fn(&ProtocolState) -> bool,
        mut f: impl FnMut(&mut ProtocolState),
    ) {
        for (_, s) in self.branches.iter_mut() {
            if when(s) {
                f(s);
            }
        }
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.update(|_| true, |s| s.phase = phase);
    }

    pub fn set_record(&mut self, party: Party, key: &str, value: usize) {
        self.update(
            |_| true,
            |s| {
                s.records[party.index()].insert(key.to_string(), value);
            },
        );
    }

    /// Appends a fresh `|0⟩` message wire owned by `owner`.
    pub fn allocate(&mut self, wire: &str, owner: Party) -> Result<()> {
        self.allocate_when(wire, owner, |_| true)
    }

    pub fn allocate_when(
        &mut self,
        wire: &str,
        owner: Party,
        when: impl Fn(&ProtocolState) -> bool,
    ) -> Result<()> {
        self.origins.insert(wire.to_string(), owner);
        let fresh = StateVector::basis(&[wire], 0)?;
        for (_, s) in self.branches.iter_mut() {
            if when(s) {
                s.state = s.state.tensor(&fresh)?;
                s.owners.insert(wire.to_string(), owner);
            }
        }
        Ok(())
    }

    /// Hands a wire to `to`. The wire must still exist.
    pub fn send(&mut self, wire: &str, to: Party) -> Result<()> {
        self.send_when(wire, to, |_| true)
    }

    pub fn send_when(
        &mut self,
        wire: &str,
        to: Party,
        when: impl Fn(&ProtocolState) -> bool,
    ) -> Result<()> {
        for (_, s) in self.branches.iter_mut() {
            if when(s) {
                match s.owners.get_mut(wire) {
                    Some(owner) => *owner = to,
                    None => {
                        return Err(Error::MalformedStrategy(format!(
                            "wire `{wire}` was consumed before it could be sent"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs round `name` of `party`'s strategy on every branch.
    pub fn round(&mut self, party: Party, name: &str) -> Result<()> {
        self.round_when(party, name, |_| true)
    }

    pub fn round_when(
        &mut self,
        party: Party,
        name: &str,
        when: impl Fn(&ProtocolState) -> bool,
    ) -> Result<()> {
        let ops = self.strategies[party.index()].round(name);
        if ops.is_empty() {
            return Ok(());
        }
        let branches = std::mem::take(&mut self.branches);
        let mut out = Vec::with_capacity(branches.len());
        for (p, s) in branches {
            if when(&s) {
                let mut ctx = Ctx {
                    party,
                    origins: &self.origins,
                    mode: &mut self.mode,
                };
                for (q, t) in ctx.exec(ops, vec![(1.0, s)])? {
                    out.push((p * q, t));
                }
            } else {
                out.push((p, s));
            }
        }
        self.branches = out;
        Ok(())
    }
}

struct Ctx<'s, M: Mode> {
    party: Party,
    origins: &'s BTreeMap<String, Party>,
    mode: &'s mut M,
}

type Branches = Vec<(f64, ProtocolState)>;

impl<M: Mode> Ctx<'_, M> {
    fn wire(&self, s: &ProtocolState, reg: &Reg) -> Result<String> {
        let w = match reg {
            Reg::Anc(i) => self.party.ancilla(*i),
            Reg::Msg(m) => m.clone(),
        };
        match s.owners.get(&w) {
            Some(owner) if *owner == self.party => Ok(w),
            Some(_) => Err(Error::MalformedStrategy(format!(
                "{:?} does not hold wire `{w}`",
                self.party
            ))),
            None => Err(Error::MalformedStrategy(format!("wire `{w}` does not exist"))),
        }
    }

    fn wires(&self, s: &ProtocolState, regs: &[Reg]) -> Result<Vec<String>> {
        regs.iter().map(|r| self.wire(s, r)).collect()
    }

    fn exec(&mut self, ops: &[Op], mut branches: Branches) -> Result<Branches> {
        for op in ops {
            let mut next = Vec::with_capacity(branches.len());
            for (p, s) in branches {
                for (q, t) in self.step(op, s)? {
                    next.push((p * q, t));
                }
            }
            branches = next;
        }
        Ok(branches)
    }

    fn step(&mut self, op: &Op, mut s: ProtocolState) -> Result<Branches> {
        let me = self.party.index();
        match op {
            Op::Unitary { on, matrix } => {
                let wires = self.wires(&s, on)?;
                let pos = positions(s.state.wires(), &wires)?;
                s.state = s.state.apply_trusted(matrix, &pos);
                Ok(vec![(1.0, s)])
            }
            Op::Measure {
                on,
                measurement,
                key,
            } => {
                let wires = self.wires(&s, on)?;
                let outcomes = s.state.measure(measurement, &wires)?;
                let options = outcomes
                    .into_iter()
                    .map(|(p, st, label)| {
                        let idx = measurement.index_of(&label).expect("label from measurement");
                        (p, (st, idx))
                    })
                    .collect();
                Ok(self
                    .mode
                    .pick(options)
                    .into_iter()
                    .map(|(p, (st, idx))| {
                        let mut t = s.clone();
                        t.state = st;
                        t.records[me].insert(key.clone(), idx);
                        (p, t)
                    })
                    .collect())
            }
            Op::Receive { msg, key } => {
                let w = self.wire(&s, &Reg::Msg(msg.clone()))?;
                let comp = OrthogonalMeasurement::computational(1);
                let outcomes = s.state.measure(&comp, &[w.as_str()])?;
                let options = outcomes
                    .into_iter()
                    .map(|(p, st, label)| (p, (st, usize::from(label == "1"))))
                    .collect();
                let sender = self.origins.get(&w).copied().unwrap_or(self.party.other());
                let mut out = Vec::new();
                for (p, (st, bit)) in self.mode.pick(options) {
                    let mut t = s.clone();
                    let (_, rest) = st.discard_basis_wire(&w)?;
                    t.state = rest;
                    t.owners.remove(&w);
                    t.records[me].insert(key.clone(), bit);
                    t.transcript.push(Message {
                        sender,
                        wire: w.clone(),
                        bit,
                    });
                    out.push((p, t));
                }
                Ok(out)
            }
            Op::Coin { weights, key } => {
                let options = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, w)| (*w, i))
                    .collect();
                Ok(self
                    .mode
                    .pick(options)
                    .into_iter()
                    .map(|(p, i)| {
                        let mut t = s.clone();
                        t.records[me].insert(key.clone(), i);
                        (p, t)
                    })
                    .collect())
            }
            Op::Branch { key, cases } => {
                let v = s.records[me].get(key).copied().ok_or_else(|| {
                    Error::MalformedStrategy(format!("{:?} has no record `{key}`", self.party))
                })?;
                let case = cases.get(v).ok_or_else(|| {
                    Error::MalformedStrategy(format!(
                        "branch on `{key}` has {} cases, value {v}",
                        cases.len()
                    ))
                })?;
                self.exec(case, vec![(1.0, s)])
            }
            Op::Declare(v) => {
                s.verdicts[me] = Some(*v);
                Ok(vec![(1.0, s)])
            }
        }
    }
}

