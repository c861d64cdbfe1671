//! Honest parties and the op-building helpers they share with the
//! adversaries.

use crate::qmath::matrix::unitary_with_first_column;
use crate::qmath::gates;

use super::encoding::EncodingFamily;
use super::strategy::{wires, Op, Reg, StrategySpec};
use super::Verdict;

/// How an opening index is held in a party's records.
#[derive(Debug, Clone, Copy)]
pub enum Index<'a> {
    /// A single record holding `j`.
    Whole(&'a str),
    /// One record per bit, most significant first.
    Bits(&'a [String]),
}

/// Runs `f(v)` for the value `v` stored across `keys` (one bit each, most
/// significant first).
pub fn branch_bits(keys: &[String], f: &dyn Fn(usize) -> Vec<Op>) -> Vec<Op> {
    fn go(keys: &[String], prefix: usize, f: &dyn Fn(usize) -> Vec<Op>) -> Vec<Op> {
        match keys.split_first() {
            None => f(prefix),
            Some((k, rest)) => vec![Op::branch(
                k,
                (0..2).map(|bit| go(rest, (prefix << 1) | bit, f)).collect(),
            )],
        }
    }
    go(keys, 0, f)
}

pub fn branch_index(index: Index<'_>, size: usize, f: &dyn Fn(usize) -> Vec<Op>) -> Vec<Op> {
    match index {
        Index::Whole(key) => vec![Op::branch(key, (0..size).map(f).collect())],
        Index::Bits(keys) => branch_bits(keys, f),
    }
}

/// Writes the record `key` (values `0..2^wires`) onto `wires` in `|0…0⟩`.
pub fn encode(key: &str, targets: &[String]) -> Op {
    let n = targets.len();
    Op::branch(
        key,
        (0..1usize << n)
            .map(|v| {
                (0..n)
                    .filter(|i| (v >> (n - 1 - i)) & 1 == 1)
                    .map(|i| Op::unitary(vec![Reg::msg(&targets[i])], gates::pauli_x()))
                    .collect()
            })
            .collect(),
    )
}

/// Receives each of `targets` into a record named after the wire.
pub fn receive_all(targets: &[String]) -> Vec<Op> {
    targets.iter().map(|w| Op::receive(w, w)).collect()
}

/// Draws `j` for the bit in `key_b` and prepares `u_{b,j}` on `wire`.
pub fn prepare(family: &EncodingFamily, key_b: &str, key_x: &str, wire: &str) -> Op {
    Op::branch(
        key_b,
        (0..2)
            .map(|b| {
                vec![
                    Op::Coin {
                        weights: family.weights(b).to_vec(),
                        key: key_x.to_string(),
                    },
                    Op::branch(
                        key_x,
                        (0..family.size())
                            .map(|j| {
                                let u = unitary_with_first_column(family.state(b, j))
                                    .expect("unit vector");
                                vec![Op::unitary(vec![Reg::msg(wire)], u)]
                            })
                            .collect(),
                    ),
                ]
            })
            .collect(),
    )
}

/// Checks the opening `(records[key_b], index)` against `wire`; on success
/// runs `accept(b)`, otherwise declares `Err`.
pub fn verify(
    family: &EncodingFamily,
    wire: &str,
    key_b: &str,
    index: Index<'_>,
    accept: &dyn Fn(usize) -> Vec<Op>,
) -> Op {
    Op::branch(
        key_b,
        (0..2)
            .map(|b| {
                branch_index(index, family.size(), &|j| {
                    let (m, ok) = family.verification(b, j);
                    let cases = (0..m.len())
                        .map(|o| {
                            if o == ok {
                                accept(b)
                            } else {
                                vec![Op::Declare(Verdict::Err)]
                            }
                        })
                        .collect();
                    vec![
                        Op::measure(vec![Reg::msg(wire)], m, "check"),
                        Op::branch("check", cases),
                    ]
                })
            })
            .collect(),
    )
}

pub(crate) fn declare_bit(key: &str) -> Op {
    Op::branch(
        key,
        vec![
            vec![Op::Declare(Verdict::Zero)],
            vec![Op::Declare(Verdict::One)],
        ],
    )
}

pub(crate) fn declare_xor(key_a: &str, b: usize) -> Op {
    Op::branch(
        key_a,
        (0..2)
            .map(|a| vec![Op::Declare(Verdict::from_bit(a ^ b))])
            .collect(),
    )
}

pub(crate) fn declare_xor_keys(key_a: &str, key_b: &str) -> Op {
    Op::branch(key_a, (0..2).map(|a| vec![declare_xor(key_b, a)]).collect())
}

/// Honest escrow depositor. Deposits the bit in record `"input"`.
///
/// Rounds: `deposit`, `reveal`, `check`.
pub fn escrow_alice(family: &EncodingFamily) -> StrategySpec {
    let idx = wires::index(family.index_bits());
    let mut s = StrategySpec::new("honest-alice", 0)
        .with_round(
            "deposit",
            vec![prepare(family, "input", "x", wires::DEPOSIT)],
        )
        .with_round(
            "reveal",
            vec![
                encode("input", &[wires::BIT.to_string()]),
                encode("x", &idx),
                declare_bit("input"),
            ],
        )
        .with_round(
            "check",
            vec![verify(family, wires::DEPOSIT, "input", Index::Whole("x"), &|b| {
                vec![Op::Declare(Verdict::from_bit(b))]
            })],
        );
    s.index_bits = family.index_bits();
    s
}

/// Honest escrow holder. Rounds: `verify`.
pub fn escrow_bob(family: &EncodingFamily) -> StrategySpec {
    let idx = wires::index(family.index_bits());
    let mut ops = vec![Op::receive(wires::BIT, wires::BIT)];
    ops.extend(receive_all(&idx));
    ops.push(verify(
        family,
        wires::DEPOSIT,
        wires::BIT,
        Index::Bits(&idx),
        &|b| vec![Op::Declare(Verdict::from_bit(b))],
    ));
    let mut s = StrategySpec::new("honest-bob", 0).with_round("verify", ops);
    s.index_bits = family.index_bits();
    s
}

/// Ops of the coin-flip depositor with wire names passed through `w`.
fn flip_alice_rounds(family: &EncodingFamily, w: &dyn Fn(&str) -> String, keys: [&str; 3]) -> [Vec<Op>; 2] {
    let [kb, kx, kbp] = keys;
    let idx: Vec<String> = wires::index(family.index_bits()).iter().map(|x| w(x)).collect();
    let deposit = vec![Op::coin(kb), prepare(family, kb, kx, &w(wires::DEPOSIT))];
    let reveal = vec![
        Op::receive(&w(wires::CHOICE), kbp),
        encode(kb, &[w(wires::BIT)]),
        encode(kx, &idx),
        declare_xor_keys(kb, kbp),
    ];
    [deposit, reveal]
}

fn flip_bob_rounds(family: &EncodingFamily, w: &dyn Fn(&str) -> String, keys: [&str; 2]) -> [Vec<Op>; 2] {
    let [kbp, kb] = keys;
    let idx: Vec<String> = wires::index(family.index_bits()).iter().map(|x| w(x)).collect();
    let choose = vec![Op::coin(kbp), encode(kbp, &[w(wires::CHOICE)])];
    let mut verify_ops = vec![Op::receive(&w(wires::BIT), kb)];
    verify_ops.extend(receive_all(&idx));
    let kbp_owned = kbp.to_string();
    verify_ops.push(verify(
        family,
        &w(wires::DEPOSIT),
        kb,
        Index::Bits(&idx),
        &move |b| vec![declare_xor(&kbp_owned, b)],
    ));
    [choose, verify_ops]
}

/// Honest coin-flip Alice. Rounds: `deposit`, `reveal`.
pub fn coinflip_alice(family: &EncodingFamily) -> StrategySpec {
    let [deposit, reveal] = flip_alice_rounds(family, &|s| s.to_string(), ["b", "x", "bp"]);
    let mut s = StrategySpec::new("honest-alice", 0)
        .with_round("deposit", deposit)
        .with_round("reveal", reveal);
    s.index_bits = family.index_bits();
    s
}

/// Honest coin-flip Bob. Rounds: `choose`, `verify`.
pub fn coinflip_bob(family: &EncodingFamily) -> StrategySpec {
    let [choose, verify] = flip_bob_rounds(family, &|s| s.to_string(), ["bp", "b"]);
    let mut s = StrategySpec::new("honest-bob", 0)
        .with_round("choose", choose)
        .with_round("verify", verify);
    s.index_bits = family.index_bits();
    s
}

/// Honest weak-commitment Alice. The escrow part uses `family`, the embedded
/// coin flip uses `flip`.
pub fn weak_alice(family: &EncodingFamily, flip: &EncodingFamily) -> StrategySpec {
    let idx = wires::index(family.index_bits());
    let [fdep, freveal] = flip_alice_rounds(flip, &wires::flip, ["fb", "fx", "fbp"]);
    let mut s = StrategySpec::new("honest-alice", 0)
        .with_round(
            "deposit",
            vec![prepare(family, "input", "x", wires::DEPOSIT)],
        )
        .with_round("open_bit", vec![encode("input", &[wires::BIT.to_string()])])
        .with_round("flip_deposit", fdep)
        .with_round("flip_reveal", freveal)
        .with_round("reveal_index", vec![encode("x", &idx)])
        .with_round(
            "check_return",
            vec![verify(family, wires::DEPOSIT, "input", Index::Whole("x"), &|b| {
                vec![Op::Declare(Verdict::from_bit(b))]
            })],
        )
        .with_round("conclude", vec![declare_bit("input")]);
    s.index_bits = family.index_bits();
    s
}

/// Honest weak-commitment Bob.
pub fn weak_bob(family: &EncodingFamily, flip: &EncodingFamily) -> StrategySpec {
    let idx = wires::index(family.index_bits());
    let [fchoose, fverify] = flip_bob_rounds(flip, &wires::flip, ["fbp", "fb"]);
    let mut check = receive_all(&idx);
    check.push(verify(
        family,
        wires::DEPOSIT,
        wires::BIT,
        Index::Bits(&idx),
        &|b| vec![Op::Declare(Verdict::from_bit(b))],
    ));
    let mut s = StrategySpec::new("honest-bob", 0)
        .with_round("receive_bit", vec![Op::receive(wires::BIT, wires::BIT)])
        .with_round("flip_choose", fchoose)
        .with_round("flip_verify", fverify)
        .with_round("check_reveal", check)
        .with_round("conclude", vec![declare_bit(wires::BIT)]);
    s.index_bits = family.index_bits();
    s
}
