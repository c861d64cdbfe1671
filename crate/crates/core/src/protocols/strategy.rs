//! Data-driven party programs.
//!
//! A [`StrategySpec`] maps round names to op lists. The protocol runners call
//! the rounds in a fixed schedule; a missing round is a no-op. Classical
//! values live in a per-party record map keyed by string.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qmath::{CMatrix, OrthogonalMeasurement};

use super::Verdict;

/// Most ancilla qubits a strategy may request.
pub const MAX_ANCILLAS: usize = 4;

/// A register reference inside a strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum Reg {
    /// Private ancilla qubit `i` of the executing party.
    Anc(usize),
    /// A message wire by its protocol name (`"dep"`, `"b"`, ...).
    Msg(String),
}

impl Reg {
    pub fn msg(name: &str) -> Self {
        Reg::Msg(name.to_string())
    }
}

/// One instruction of a round program.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    /// Unitary on the listed registers (first register = most significant).
    Unitary { on: Vec<Reg>, matrix: CMatrix },
    /// Orthogonal measurement; the outcome index is stored under `key`.
    Measure {
        on: Vec<Reg>,
        measurement: OrthogonalMeasurement,
        key: String,
    },
    /// Honest receipt of a classical bit: measure `msg` in the computational
    /// basis, store the bit under `key`, log it in the transcript and drop
    /// the wire.
    Receive { msg: String, key: String },
    /// Private classical randomness with the given outcome weights.
    Coin { weights: Vec<f64>, key: String },
    /// Runs `cases[records[key]]`.
    Branch { key: String, cases: Vec<Vec<Op>> },
    /// Sets this party's verdict.
    Declare(Verdict),
}

impl Op {
    pub fn unitary(on: Vec<Reg>, matrix: CMatrix) -> Self {
        Op::Unitary { on, matrix }
    }

    pub fn measure(on: Vec<Reg>, measurement: OrthogonalMeasurement, key: &str) -> Self {
        Op::Measure {
            on,
            measurement,
            key: key.to_string(),
        }
    }

    pub fn receive(msg: &str, key: &str) -> Self {
        Op::Receive {
            msg: msg.to_string(),
            key: key.to_string(),
        }
    }

    /// Fair coin.
    pub fn coin(key: &str) -> Self {
        Op::Coin {
            weights: vec![0.5, 0.5],
            key: key.to_string(),
        }
    }

    pub fn branch(key: &str, cases: Vec<Vec<Op>>) -> Self {
        Op::Branch {
            key: key.to_string(),
            cases,
        }
    }
}

/// A party's complete program.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub name: String,
    pub ancillas: usize,
    /// Number of classical index bits this strategy sends or expects when
    /// opening (1 for the four-state encoding).
    pub index_bits: usize,
    pub rounds: BTreeMap<String, Vec<Op>>,
}

impl StrategySpec {
    pub fn new(name: &str, ancillas: usize) -> Self {
        StrategySpec {
            name: name.to_string(),
            ancillas,
            index_bits: 1,
            rounds: BTreeMap::new(),
        }
    }

    pub fn with_round(mut self, round: &str, ops: Vec<Op>) -> Self {
        self.rounds.insert(round.to_string(), ops);
        self
    }

    pub fn round(&self, name: &str) -> &[Op] {
        self.rounds.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Structural checks: ancilla budget, register indices, matrix sizes,
    /// unitarity (1e-9), nonempty branch tables and coin weights.
    pub fn validate(&self) -> Result<()> {
        if self.ancillas > MAX_ANCILLAS {
            return Err(Error::MalformedStrategy(format!(
                "`{}` requests {} ancillas (max {MAX_ANCILLAS})",
                self.name, self.ancillas
            )));
        }
        for (round, ops) in &self.rounds {
            self.validate_ops(round, ops)?;
        }
        Ok(())
    }

    fn validate_regs(&self, round: &str, on: &[Reg]) -> Result<()> {
        for (i, r) in on.iter().enumerate() {
            if let Reg::Anc(a) = r {
                if *a >= self.ancillas {
                    return Err(Error::MalformedStrategy(format!(
                        "`{}` round `{round}` uses ancilla {a} of {}",
                        self.name, self.ancillas
                    )));
                }
            }
            if on[..i].contains(r) {
                return Err(Error::MalformedStrategy(format!(
                    "`{}` round `{round}` lists register {r:?} twice",
                    self.name
                )));
            }
        }
        Ok(())
    }

    fn validate_ops(&self, round: &str, ops: &[Op]) -> Result<()> {
        for op in ops {
            match op {
                Op::Unitary { on, matrix } => {
                    self.validate_regs(round, on)?;
                    if !matrix.is_square() || matrix.rows() != 1 << on.len() {
                        return Err(Error::MalformedStrategy(format!(
                            "`{}` round `{round}`: {}x{} unitary on {} registers",
                            self.name,
                            matrix.rows(),
                            matrix.cols(),
                            on.len()
                        )));
                    }
                    let defect = matrix.unitary_defect();
                    if defect > 1e-9 {
                        return Err(Error::NotUnitary(defect));
                    }
                }
                Op::Measure {
                    on, measurement, ..
                } => {
                    self.validate_regs(round, on)?;
                    if measurement.dim() != 1 << on.len() {
                        return Err(Error::MalformedStrategy(format!(
                            "`{}` round `{round}`: measurement of dimension {} on {} registers",
                            self.name,
                            measurement.dim(),
                            on.len()
                        )));
                    }
                }
                Op::Coin { weights, .. } => {
                    let total: f64 = weights.iter().sum();
                    if weights.is_empty()
                        || weights.iter().any(|w| w.is_nan() || *w < 0.0)
                        || (total - 1.0).abs() > 1e-12
                    {
                        return Err(Error::MalformedStrategy(format!(
                            "`{}` round `{round}`: bad coin weights {weights:?}",
                            self.name
                        )));
                    }
                }
                Op::Branch { cases, key } => {
                    if cases.is_empty() {
                        return Err(Error::MalformedStrategy(format!(
                            "`{}` round `{round}`: empty branch on `{key}`",
                            self.name
                        )));
                    }
                    for case in cases {
                        self.validate_ops(round, case)?;
                    }
                }
                Op::Receive { .. } | Op::Declare(_) => {}
            }
        }
        Ok(())
    }

    /// True when every op in the named rounds is a unitary or a declaration.
    pub fn is_unitary_only(&self, rounds: &[&str]) -> bool {
        rounds.iter().all(|r| {
            self.round(r)
                .iter()
                .all(|op| matches!(op, Op::Unitary { .. } | Op::Declare(_)))
        })
    }
}

/// Fixed per-round register assignments used by the runners.
pub mod wires {
    pub const DEPOSIT: &str = "dep";
    pub const BIT: &str = "b";
    pub const CHOICE: &str = "bp";

    /// Index wires for `bits` index bits: `"x"` for one bit, else
    /// `"x0"`, `"x1"`, ...
    pub fn index(bits: usize) -> Vec<String> {
        if bits == 1 {
            vec!["x".to_string()]
        } else {
            (0..bits).map(|i| format!("x{i}")).collect()
        }
    }

    /// The coin-flip wires of the weak commitment live under this prefix.
    pub fn flip(name: &str) -> String {
        format!("flip.{name}")
    }
}
