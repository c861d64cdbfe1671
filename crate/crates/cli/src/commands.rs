//! Sweep subcommands.

use rayon::prelude::*;

use escrow_core::adversaries::{
    alice_quadratic_four_state, baseline_strategies, bob_weak_measurement, optimize,
    AdversarySpace, AliceQuadraticParams, BobWeakParams, Objective, OptimizerConfig, ProtocolKind,
};
use escrow_core::analysis::{
    binding_metrics, bob_cap, check_binding_bound, check_binding_theorem, check_sealing_bound,
    coinflip_bias, evaluate_coinflip_alice, evaluate_coinflip_bob, frontier_ratio,
    random_sealing_attack, sealing_bound, sealing_metrics, BiasReport, HonestSide, SealingReport,
    ALICE_CAP, TOL,
};
use escrow_core::protocols::{
    honest_coinflip, honest_escrow, run_escrow, Challenge, EncodingFamily, EscrowParams, Party,
    StrategySpec, Verdict,
};
use escrow_core::qmath::fidelity;
use escrow_core::qmath::random::seeded;
use escrow_core::Result;

use crate::config::RunConfig;
use crate::output::{Cell, RunSummary};

pub const COINFLIP_COLUMNS: [&str; 9] = [
    "name",
    "honest_side",
    "win_prob_0",
    "win_prob_1",
    "err_prob",
    "delta",
    "cheater_win",
    "cap",
    "pass",
];

pub const BINDING_COLUMNS: [&str; 11] = [
    "alpha",
    "advantage",
    "advantage_closed_form",
    "detection",
    "detection_closed_form",
    "detection_stated_cap",
    "gamma",
    "p_err",
    "q_err",
    "binding_bound",
    "pass",
];

pub const SEALING_COLUMNS: [&str; 11] = [
    "kind",
    "param",
    "advantage",
    "detection",
    "detection_enumerated",
    "kept_trace_distance",
    "predicted",
    "detection_cap",
    "bound",
    "frontier_ratio",
    "pass",
];

fn side_name(h: HonestSide) -> &'static str {
    match h {
        HonestSide::AliceHonest => "alice",
        HonestSide::BobHonest => "bob",
    }
}

fn bias_row(name: &str, side: &str, r: &BiasReport, cap: f64, pass: bool) -> Vec<Cell> {
    vec![
        name.into(),
        side.into(),
        r.win_prob_0.into(),
        r.win_prob_1.into(),
        r.err_prob.into(),
        r.delta_observed.into(),
        r.cheater_win.into(),
        cap.into(),
        pass.into(),
    ]
}

fn probe(
    space: &AdversarySpace,
    samples: u64,
    seed: u64,
    evaluator: &(dyn Fn(&StrategySpec) -> Result<escrow_core::adversaries::Evaluation> + Sync),
) -> Result<StrategySpec> {
    let mut cfg = OptimizerConfig::new(Objective::MaxWinProb, space.dim());
    cfg.grid_resolution = 8;
    cfg.grid_budget = samples.max(1) as usize;
    cfg.seed = seed;
    let r = optimize(space, &cfg, evaluator)?;
    space.build(&r.best_params)
}

/// Honest run, coin-flip baselines and optimizer probes against both caps.
pub fn cmd_coinflip(cfg: &RunConfig) -> Result<RunSummary> {
    let mut out = RunSummary::new("coinflip", COINFLIP_COLUMNS.to_vec());
    let (_, bob) = honest_coinflip();
    let honest = coinflip_bias(HonestSide::AliceHonest, &bob)?;
    let pass = (honest.win_prob_0 - 0.5).abs() <= 1e-12
        && (honest.win_prob_1 - 0.5).abs() <= 1e-12
        && honest.err_prob <= 1e-12;
    out.push(bias_row("honest", "both", &honest, 0.5, pass));

    let mut cases: Vec<(String, HonestSide, StrategySpec)> = baseline_strategies()
        .into_iter()
        .filter(|b| b.protocol == ProtocolKind::Coinflip && !b.name.starts_with("honest"))
        .map(|b| {
            let side = match b.party {
                Party::Alice => HonestSide::BobHonest,
                Party::Bob => HonestSide::AliceHonest,
            };
            (b.name, side, b.spec)
        })
        .collect();

    let probes = [
        (AdversarySpace::coinflip_alice_state(), HonestSide::BobHonest),
        (AdversarySpace::coinflip_alice_full(), HonestSide::BobHonest),
        (AdversarySpace::coinflip_bob_basis(), HonestSide::AliceHonest),
        (AdversarySpace::coinflip_bob_givens(), HonestSide::AliceHonest),
    ];
    for (space, side) in &probes {
        let spec = match side {
            HonestSide::BobHonest => probe(space, cfg.samples, cfg.seed, &evaluate_coinflip_alice)?,
            HonestSide::AliceHonest => probe(space, cfg.samples, cfg.seed, &evaluate_coinflip_bob)?,
        };
        cases.push((format!("optimizer-{}", space.name), *side, spec));
    }

    let reports: Vec<BiasReport> = cases
        .par_iter()
        .map(|(_, side, spec)| coinflip_bias(*side, spec))
        .collect::<Result<_>>()?;
    for ((name, side, _), r) in cases.iter().zip(&reports) {
        let cap = match side {
            HonestSide::AliceHonest => bob_cap(),
            HonestSide::BobHonest => ALICE_CAP,
        };
        out.push(bias_row(name, side_name(*side), r, cap, r.cheater_win <= cap + TOL));
    }
    Ok(out)
}

/// Quadratic Alice over the α grid, each paired with the α = 0 strategy for
/// the binding frontier.
pub fn cmd_escrow_binding(cfg: &RunConfig) -> Result<RunSummary> {
    let theta = cfg.theta;
    let f = EncodingFamily::four_state(theta);
    let fid = fidelity(&f.density(0), &f.density(1))?;
    let (_, bob) = honest_escrow(EscrowParams { theta });
    let zero = alice_quadratic_four_state(AliceQuadraticParams::new(0.0, 0)?, theta)?;

    let rows: Vec<Vec<Cell>> = cfg
        .alpha_grid
        .par_iter()
        .map(|&alpha| {
            let spec = alice_quadratic_four_state(AliceQuadraticParams::new(alpha, 0)?, theta)?;
            let d = run_escrow(&spec, &bob, Challenge::RevealToBob, 0)?;
            let advantage = d.message_probability("b", 0) - 0.5;
            let detection = d.verdict_probability(Party::Bob, Some(Verdict::Err));
            let b = binding_metrics(&spec, &zero, theta)?;
            let sharp = check_binding_bound(&b);
            let thm = check_binding_theorem(&b);
            Ok(vec![
                alpha.into(),
                advantage.into(),
                (fid.sqrt() * (2.0 * alpha).sin() / 2.0).into(),
                detection.into(),
                ((1.0 - fid) * alpha.sin().powi(2)).into(),
                (0.25 * alpha.sin().powi(2)).into(),
                b.gamma_observed.into(),
                b.p_err.into(),
                b.q_err.into(),
                b.bound.into(),
                (sharp.pass && thm.pass).into(),
            ])
        })
        .collect::<Result<_>>()?;

    let mut out = RunSummary::new("escrow-binding", BINDING_COLUMNS.to_vec());
    rows.into_iter().for_each(|r| out.push(r));
    Ok(out)
}

fn sealing_row(
    kind: &str,
    param: Cell,
    r: &SealingReport,
    theta: f64,
    predicted: Option<f64>,
    detection_cap: Option<f64>,
) -> Vec<Cell> {
    let within_cap = detection_cap.is_none_or(|c| r.detection_p <= c + TOL);
    let pass = check_sealing_bound(r, theta).pass && within_cap;
    vec![
        kind.into(),
        param,
        r.advantage_eps.into(),
        r.detection_p.into(),
        r.detection_enumerated.into(),
        r.kept_trace_distance.into(),
        predicted.into(),
        detection_cap.into(),
        sealing_bound(theta, r.detection_p).into(),
        frontier_ratio(r).into(),
        pass.into(),
    ]
}

/// Weak-measurement Bob over the p grid, then `samples` seeded Haar attacks.
pub fn cmd_escrow_sealing(cfg: &RunConfig) -> Result<RunSummary> {
    let theta = cfg.theta;
    let f = EncodingFamily::four_state(theta);
    let (r0, r1) = (f.density(0), f.density(1));

    let weak: Vec<Vec<Cell>> = cfg
        .p_grid
        .par_iter()
        .map(|&p| {
            let bob = bob_weak_measurement(BobWeakParams::new(p)?, &r0, &r1)?;
            let r = sealing_metrics(&bob, theta)?;
            let predicted = (2.0 * p).sqrt() / 4.0;
            let cap = 0.5 * (1.0 - (1.0 - p).sqrt());
            Ok(sealing_row("weak", p.into(), &r, theta, Some(predicted), Some(cap)))
        })
        .collect::<Result<_>>()?;

    let mut rng = seeded(cfg.seed);
    let attacks: Vec<StrategySpec> = (0..cfg.samples).map(|_| random_sealing_attack(&mut rng)).collect();
    let random: Vec<Vec<Cell>> = attacks
        .par_iter()
        .enumerate()
        .map(|(i, bob)| {
            let r = sealing_metrics(bob, theta)?;
            Ok(sealing_row("random", i.into(), &r, theta, None, None))
        })
        .collect::<Result<_>>()?;

    let mut out = RunSummary::new("escrow-sealing", SEALING_COLUMNS.to_vec());
    weak.into_iter().chain(random).for_each(|r| out.push(r));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(x) => *x,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn binding_endpoints() {
        let mut cfg = RunConfig::defaults(0);
        cfg.alpha_grid = vec![0.0, PI / 4.0];
        let s = cmd_escrow_binding(&cfg).unwrap();
        let (first, last) = (&s.rows[0], &s.rows[1]);
        assert!(num(&first[1]).abs() < 1e-12 && num(&first[3]).abs() < 1e-12);
        assert_eq!(first[10], Cell::Bool(true));
        assert!((num(&last[1]) - 0.353_553_390_593).abs() < 1e-9);
        assert_eq!(last[10], Cell::Bool(true));
    }

    #[test]
    fn sealing_weak_rows() {
        let mut cfg = RunConfig::defaults(3);
        cfg.p_grid = vec![0.0, 0.25];
        let s = cmd_escrow_sealing(&cfg).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert!(num(&s.rows[0][2]).abs() < 1e-12 && num(&s.rows[0][3]).abs() < 1e-12);
        assert!((num(&s.rows[1][2]) - 0.176_776_695_3).abs() < 1e-9);
        assert!(num(&s.rows[1][3]) <= 0.066_987 + 1e-6);
        assert_eq!(s.tally().failed, 0);
    }
}
