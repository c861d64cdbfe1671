//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use escrow_core::adversaries::{
    alice_quadratic_four_state, bob_weak_measurement, full_measurement_bob, optimize,
    AdversarySpace, AliceQuadraticParams, BobWeakParams, Objective, OptimizerConfig,
};
use escrow_core::analysis::{
    binding_metrics, bob_cap, check_binding_bound, check_sealing_bound, coinflip_bias,
    evaluate_coinflip_alice, evaluate_coinflip_bob, random_binding_pair, random_sealing_attack,
    sealing_metrics, HonestSide, ALICE_CAP,
};
use escrow_core::protocols::{
    honest_coinflip, honest_escrow, run_coinflip, run_coinflip_with, run_escrow, run_escrow_with,
    monte_carlo, Challenge, EncodingFamily, EscrowParams, OutcomeDistribution, Party, Verdict,
};
use escrow_core::qmath::random::{haar_state, haar_unitary, random_density, random_measurement, seeded};
use escrow_core::qmath::{
    fidelity, local_purification_transform, optimal_distinguishing_measurement, purify,
    trace_norm,
};
use escrow_core::Result;

const THETA: f64 = PI / 8.0;

struct Line {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, name: &'static str, pass: bool, detail: String) -> Line {
    Line { id, name, pass, detail }
}

fn ac1() -> Result<Line> {
    let (a, b) = honest_coinflip();
    let d = run_coinflip(&a, &b)?;
    let mut worst: f64 = 0.0;
    let mut errs = 0.0;
    for p in [Party::Alice, Party::Bob] {
        worst = worst.max((d.verdict_probability(p, Some(Verdict::Zero)) - 0.5).abs());
        worst = worst.max((d.verdict_probability(p, Some(Verdict::One)) - 0.5).abs());
        errs += d.verdict_probability(p, Some(Verdict::Err));
    }
    Ok(line(
        "AC1",
        "honest coin flip is fair",
        worst <= 1e-12 && errs == 0.0,
        format!("max |Pr - 0.5| = {worst:.3e}, Pr(err) = {errs}"),
    ))
}

fn ac2() -> Result<Line> {
    let cap = bob_cap();
    let fm = coinflip_bias(HonestSide::AliceHonest, &full_measurement_bob())?.cheater_win;
    let mut best: f64 = 0.0;
    for (space, budget) in [
        (AdversarySpace::coinflip_bob_givens(), 10_000),
        (AdversarySpace::coinflip_bob_basis(), 1_000),
    ] {
        let mut cfg = OptimizerConfig::new(Objective::MaxWinProb, space.dim());
        cfg.grid_resolution = 8;
        cfg.grid_budget = budget;
        cfg.simplex_iterations = 300;
        cfg.seed = 2;
        let r = optimize(&space, &cfg, &evaluate_coinflip_bob)?;
        best = best.max(r.trace.iter().map(|t| t.value).fold(0.0, f64::max));
    }
    Ok(line(
        "AC2",
        "cheating Bob capped at cos^2(pi/8)",
        (fm - cap).abs() <= 1e-9 && best <= cap + 1e-9,
        format!("full-measurement {fm:.10}, search max {best:.10}, cap {cap:.10}"),
    ))
}

fn ac3() -> Result<Line> {
    let mut best: f64 = 0.0;
    for space in [
        AdversarySpace::coinflip_alice_state(),
        AdversarySpace::coinflip_alice_full(),
    ] {
        let mut cfg = OptimizerConfig::new(Objective::MaxWinProb, space.dim());
        cfg.grid_resolution = 8;
        cfg.grid_budget = 2_000;
        cfg.simplex_iterations = 400;
        cfg.seed = 3;
        let r = optimize(&space, &cfg, &evaluate_coinflip_alice)?;
        best = best.max(r.best_value);
    }
    Ok(line(
        "AC3",
        "cheating Alice capped at 0.9143",
        best <= ALICE_CAP + 1e-9,
        format!("search max {best:.10}"),
    ))
}

fn quadratic_grid() -> Result<Vec<(f64, f64, f64)>> {
    let (_, bob) = honest_escrow(EscrowParams::default());
    (0..=4)
        .map(|k| {
            let alpha = k as f64 * PI / 16.0;
            let spec = alice_quadratic_four_state(AliceQuadraticParams::new(alpha, 0)?, THETA)?;
            let d = run_escrow(&spec, &bob, Challenge::RevealToBob, 0)?;
            Ok((
                alpha,
                d.message_probability("b", 0) - 0.5,
                d.verdict_probability(Party::Bob, Some(Verdict::Err)),
            ))
        })
        .collect()
}

fn ac4() -> Result<[Line; 2]> {
    let grid = quadratic_grid()?;
    let adv_err = grid
        .iter()
        .map(|(a, adv, _)| (adv - 0.5f64.sqrt() * (2.0 * a).sin() / 2.0).abs())
        .fold(0.0, f64::max);
    let over: Vec<String> = grid
        .iter()
        .filter(|(a, _, det)| *det > 0.25 * a.sin().powi(2) + 1e-9)
        .map(|(a, _, det)| format!("a={a:.4}: {det:.6} > {:.6}", 0.25 * a.sin().powi(2)))
        .collect();
    Ok([
        line(
            "AC4a",
            "quadratic Alice advantage = sqrt(f) sin(2a)/2",
            adv_err <= 1e-8,
            format!("max deviation {adv_err:.3e}"),
        ),
        line(
            "AC4b",
            "quadratic Alice detection <= 0.25 sin^2(a)",
            over.is_empty(),
            if over.is_empty() {
                "all grid points within cap".into()
            } else {
                over.join("; ")
            },
        ),
    ])
}

fn ac5() -> Result<Line> {
    let f = EncodingFamily::four_state(THETA);
    let (r0, r1) = (f.density(0), f.density(1));
    let (alice, _) = honest_escrow(EscrowParams::default());
    let full = trace_norm(&(r0.matrix() - r1.matrix()));
    let mut worst_dist: f64 = 0.0;
    let mut det_ok = true;
    let mut p1_dist = 0.0;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let bob = bob_weak_measurement(BobWeakParams::new(p)?, &r0, &r1)?;
        let r = sealing_metrics(&bob, THETA)?;
        worst_dist = worst_dist.max((r.kept_trace_distance - 2f64.sqrt() * p.sqrt()).abs());
        let mut det = 0.0;
        for b in 0..2 {
            let d = run_escrow(&alice, &bob, Challenge::ReturnToAlice, b)?;
            det += 0.5 * d.verdict_probability(Party::Alice, Some(Verdict::Err));
        }
        det_ok &= det <= 0.5 * (1.0 - (1.0 - p).sqrt()) + 1e-9;
        if k == 10 {
            p1_dist = r.kept_trace_distance;
        }
    }
    let p1_ok = (p1_dist - full).abs() <= 1e-8 && (full - 2f64.sqrt()).abs() <= 1e-8;
    Ok(line(
        "AC5",
        "weak-measurement Bob distance sqrt(2p), detection cap",
        worst_dist <= 1e-8 && det_ok && p1_ok,
        format!("max distance deviation {worst_dist:.3e}, detection within cap {det_ok}, p=1 distance {p1_dist:.10} vs {full:.10}"),
    ))
}

fn ac6() -> Result<Line> {
    let mut rng = seeded(6);
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let (a, b) = random_binding_pair(&mut rng);
        let r = binding_metrics(&a, &b, THETA)?;
        let c = check_binding_bound(&r);
        worst = worst.max(c.observed - c.bound);
        if !c.pass {
            failures += 1;
        }
    }
    Ok(line(
        "AC6",
        "binding frontier on 500 random pairs",
        failures == 0,
        format!("{failures} violations, max gamma - bound = {worst:.4}"),
    ))
}

fn ac7() -> Result<Line> {
    let mut rng = seeded(7);
    let (mut id_fail, mut bound_fail, mut w_fail) = (0, 0, 0);
    let mut ratio: f64 = 0.0;
    for _ in 0..500 {
        let bob = random_sealing_attack(&mut rng);
        let r = sealing_metrics(&bob, THETA)?;
        if (r.detection_p - r.detection_enumerated).abs() > 1e-9 {
            id_fail += 1;
        }
        if !check_sealing_bound(&r, THETA).pass {
            bound_fail += 1;
        }
        if r.identity_residual > 1e-9 {
            w_fail += 1;
        }
        if r.detection_p > 0.0 {
            ratio = ratio.max(r.advantage_eps / r.detection_p.sqrt());
        }
    }
    Ok(line(
        "AC7",
        "sealing frontier on 500 Haar-random attacks",
        id_fail + bound_fail + w_fail == 0,
        format!("detection identity failures {id_fail}, bound failures {bound_fail}, w-relation failures {w_fail}; max advantage/sqrt(p) = {ratio:.4}"),
    ))
}

fn ac8() -> Result<Line> {
    let mut rng = seeded(8);
    let mut fails = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = haar_state(&["q0", "q1"], &mut rng);
        let b = haar_state(&["q0", "q1"], &mut rng);
        let t = trace_norm(&(a.density().matrix() - b.density().matrix()));
        let ov = a.overlap(&b)?;
        worst = worst.max((t - 2.0 * (1.0 - ov * ov).max(0.0).sqrt()).abs());
    }
    if worst > 1e-9 {
        fails.push(format!("pure trace distance {worst:.2e}"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = random_density(&["q"], &mut rng).matrix() - random_density(&["q"], &mut rng).matrix();
        let b = random_density(&["r0", "r1"], &mut rng).matrix().clone();
        worst = worst.max((trace_norm(&a.kron(&b)) - trace_norm(&a) * trace_norm(&b)).abs());
    }
    if worst > 1e-8 {
        fails.push(format!("tensor multiplicativity {worst:.2e}"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = haar_state(&["q0", "q1"], &mut rng);
        let b = haar_state(&["q0", "q1"], &mut rng);
        worst = worst.max((fidelity(&a.density(), &b.density())? - a.overlap(&b)?.powi(2)).abs());
    }
    if worst > 1e-9 {
        fails.push(format!("pure fidelity {worst:.2e}"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = random_density(&["q0", "q1"], &mut rng);
        let back = purify(&r)?.partial_trace(&["q0", "q1"])?;
        worst = worst.max(back.matrix().max_abs_diff(r.matrix()));
    }
    if worst > 1e-9 {
        fails.push(format!("purify round trip {worst:.2e}"));
    }

    let mut violations = 0;
    for _ in 0..20 {
        let r0 = random_density(&["q0", "q1"], &mut rng);
        let r1 = random_density(&["q0", "q1"], &mut rng);
        let (_, best) = optimal_distinguishing_measurement(&r0, &r1)?;
        for _ in 0..100 {
            let m = random_measurement(4, &mut rng);
            let l1: f64 = m
                .probabilities(r0.matrix())
                .iter()
                .zip(m.probabilities(r1.matrix()))
                .map(|(a, b)| (a - b).abs())
                .sum();
            if l1 > best + 1e-8 {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        fails.push(format!("{violations} measurements beat the optimal one"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = random_density(&["s"], &mut rng);
        let psi = purify(&r)?;
        let local = haar_unitary(2, &mut rng);
        let target = psi.apply_unitary(&local, &["s~"])?;
        let u = local_purification_transform(&psi, &target, &["s~"])?;
        let mapped = psi.apply_unitary(&u, &["s~"])?;
        worst = worst.max(1.0 - mapped.overlap(&target)?);
    }
    if worst > 1e-8 {
        fails.push(format!("local transform {worst:.2e}"));
    }

    Ok(line(
        "AC8",
        "qmath oracle suite",
        fails.is_empty(),
        if fails.is_empty() {
            "all six identities hold".into()
        } else {
            fails.join("; ")
        },
    ))
}

const MC_SAMPLES: u64 = 1_000_000;

fn agree(enumerated: &OutcomeDistribution, sampled: &escrow_core::protocols::SampledVerdicts) -> (bool, f64) {
    let exact = enumerated.joint_verdicts();
    let n = sampled.samples as f64;
    let mut ok = sampled.counts.keys().all(|k| exact.contains_key(k));
    let mut worst: f64 = 0.0;
    for (k, &p) in &exact {
        let f = sampled.frequency(k);
        let sigma = (p * (1.0 - p) / n).sqrt();
        if sigma == 0.0 {
            ok &= f == p;
        } else {
            let z = (f - p).abs() / sigma;
            worst = worst.max(z);
            ok &= z <= 4.0;
        }
    }
    (ok, worst)
}

fn ac9() -> Result<Line> {
    let f = EncodingFamily::four_state(THETA);
    let (ha, hb) = honest_escrow(EscrowParams::default());
    let quad = alice_quadratic_four_state(AliceQuadraticParams::new(PI / 8.0, 0)?, THETA)?;
    let weak = bob_weak_measurement(BobWeakParams::new(0.5)?, &f.density(0), &f.density(1))?;
    let (fa, _) = honest_coinflip();
    let fm = full_measurement_bob();

    let mut details = Vec::new();
    let mut all = true;

    let e = run_escrow(&quad, &hb, Challenge::RevealToBob, 0)?;
    let s = monte_carlo(MC_SAMPLES, 91, |m| {
        run_escrow_with(&quad, &hb, Challenge::RevealToBob, 0, m)
    })?;
    let (ok, z) = agree(&e, &s);
    all &= ok;
    details.push(format!("quadratic-alice max z {z:.2}"));

    let e = run_escrow(&ha, &weak, Challenge::ReturnToAlice, 1)?;
    let s = monte_carlo(MC_SAMPLES, 92, |m| {
        run_escrow_with(&ha, &weak, Challenge::ReturnToAlice, 1, m)
    })?;
    let (ok, z) = agree(&e, &s);
    all &= ok;
    details.push(format!("weak-bob max z {z:.2}"));

    let e = run_coinflip(&fa, &fm)?;
    let s = monte_carlo(MC_SAMPLES, 93, |m| run_coinflip_with(&fa, &fm, m))?;
    let (ok, z) = agree(&e, &s);
    all &= ok;
    details.push(format!("full-measurement-bob max z {z:.2}"));

    Ok(line(
        "AC9",
        "Monte Carlo agrees with enumeration (N = 1e6, 4 sigma)",
        all,
        details.join(", "),
    ))
}

type Criterion = (&'static str, Box<dyn Fn() -> Result<Vec<Line>>>);

fn main() -> ExitCode {
    let checks: Vec<Criterion> = vec![
        ("AC1", Box::new(|| ac1().map(|l| vec![l]))),
        ("AC2", Box::new(|| ac2().map(|l| vec![l]))),
        ("AC3", Box::new(|| ac3().map(|l| vec![l]))),
        ("AC4", Box::new(|| ac4().map(Vec::from))),
        ("AC5", Box::new(|| ac5().map(|l| vec![l]))),
        ("AC6", Box::new(|| ac6().map(|l| vec![l]))),
        ("AC7", Box::new(|| ac7().map(|l| vec![l]))),
        ("AC8", Box::new(|| ac8().map(|l| vec![l]))),
        ("AC9", Box::new(|| ac9().map(|l| vec![l]))),
    ];
    // optional criterion ids, e.g. `cargo test --test acceptance -- AC8`
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, check) in checks {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let lines = match check() {
            Ok(lines) => lines,
            Err(e) => vec![Line {
                id: "ERR",
                name: "error",
                pass: false,
                detail: format!("{id}: {e}"),
            }],
        };
        let secs = start.elapsed().as_secs_f64();
        for l in lines {
            if !l.pass {
                failed += 1;
            }
            println!(
                "{:<5} {} {} ({}) [{secs:.1}s]",
                l.id,
                if l.pass { "PASS" } else { "FAIL" },
                l.name,
                l.detail
            );
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
