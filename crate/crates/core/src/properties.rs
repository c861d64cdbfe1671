//! Property tests spanning several modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use crate::adversaries::{unitary_from_angles, AdversarySpace};
use crate::analysis::{
    binding_metrics, bob_cap, check_binding_bound, check_sealing_bound, coinflip_bias,
    random_binding_pair, random_sealing_attack, sealing_metrics, HonestSide, ALICE_CAP,
};
use crate::protocols::{
    honest_escrow, run_escrow, run_escrow_with, Challenge, EscrowParams, Sample,
};
use crate::qmath::random::{haar_unitary, random_density, random_hermitian, random_measurement, seeded};
use crate::qmath::{fidelity, hermitian_eig, trace_norm, CMatrix};

const T: f64 = PI / 8.0;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn sample_point(space: &AdversarySpace, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = seeded(seed);
    space
        .bounds
        .iter()
        .map(|&(lo, hi)| rng.random_range(lo..hi))
        .collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), d in 1usize..9) {
        let a = random_hermitian(d, &mut seeded(seed));
        let e = hermitian_eig(&a).unwrap();
        let mut back = CMatrix::zeros(d, d);
        for (i, &l) in e.values.iter().enumerate() {
            let v = e.vector(i);
            back = &back + &CMatrix::outer(&v, &v).scale_real(l);
        }
        prop_assert!(back.max_abs_diff(&a) < 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn trace_norm_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let u = haar_unitary(4, &mut rng);
        let ta = trace_norm(&a);
        prop_assert!(ta >= 0.0);
        prop_assert!((trace_norm(&u.matmul(&a).matmul(&u.adjoint())) - ta).abs() < 1e-9);
        prop_assert!(trace_norm(&(&a + &b)) <= ta + trace_norm(&b) + 1e-9);
    }

    #[test]
    fn partial_trace_is_a_state(seed in any::<u64>()) {
        let r = random_density(&["a", "b", "c"], &mut seeded(seed));
        let red = r.partial_trace(&["c", "a"]).unwrap();
        prop_assert!((red.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert_eq!(red.wires(), &["c".to_string(), "a".to_string()][..]);
    }

    #[test]
    fn fidelity_symmetric_in_unit_interval(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let r0 = random_density(&["q0", "q1"], &mut rng);
        let r1 = random_density(&["q0", "q1"], &mut rng);
        let f01 = fidelity(&r0, &r1).unwrap();
        let f10 = fidelity(&r1, &r0).unwrap();
        prop_assert!((0.0..=1.0).contains(&f01));
        prop_assert!((f01 - f10).abs() < 1e-8);
        prop_assert!((fidelity(&r0, &r0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn measurement_probabilities_sum_to_one(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = seeded(seed);
        let m = random_measurement(1 << k, &mut rng);
        let labels: Vec<String> = (0..k).map(|i| format!("q{i}")).collect();
        let r = random_density(&labels, &mut rng);
        let p = m.probabilities(r.matrix());
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().all(|&x| x > -1e-12));
    }

    #[test]
    fn angle_unitaries_are_unitary(angles in prop::collection::vec(-10.0f64..10.0, 15)) {
        prop_assert!(unitary_from_angles(4, &angles).unwrap().unitary_defect() < 1e-10);
        prop_assert!(unitary_from_angles(2, &angles[..3]).unwrap().unitary_defect() < 1e-12);
    }

    #[test]
    fn escrow_distributions_sum_to_one(seed in any::<u64>(), bit in 0usize..2) {
        let space = AdversarySpace::escrow_bob(1);
        let bob = space.build(&sample_point(&space, seed)).unwrap();
        let (alice, _) = honest_escrow(EscrowParams::default());
        let d = run_escrow(&alice, &bob, Challenge::ReturnToAlice, bit).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-10);
        let a = run_escrow_with(&alice, &bob, Challenge::ReturnToAlice, bit, Sample { rng: seeded(seed) }).unwrap();
        let b = run_escrow_with(&alice, &bob, Challenge::ReturnToAlice, bit, Sample { rng: seeded(seed) }).unwrap();
        prop_assert_eq!(a.branches.len(), 1);
        prop_assert_eq!(a.branches[0].alice, b.branches[0].alice);
    }

    #[test]
    fn coinflip_caps_hold(seed in any::<u64>()) {
        for space in [AdversarySpace::coinflip_bob_basis(), AdversarySpace::coinflip_bob_givens()] {
            let r = coinflip_bias(HonestSide::AliceHonest, &space.build(&sample_point(&space, seed)).unwrap()).unwrap();
            prop_assert!((r.total() - 1.0).abs() < 1e-9);
            prop_assert!(r.cheater_win <= bob_cap() + 1e-9);
        }
        for space in [AdversarySpace::coinflip_alice_state(), AdversarySpace::coinflip_alice_full()] {
            let r = coinflip_bias(HonestSide::BobHonest, &space.build(&sample_point(&space, seed)).unwrap()).unwrap();
            prop_assert!((r.total() - 1.0).abs() < 1e-9);
            prop_assert!(r.cheater_win <= ALICE_CAP + 1e-9);
        }
    }

    #[test]
    fn binding_frontier(seed in any::<u64>()) {
        let (a, b) = random_binding_pair(&mut seeded(seed));
        let r = binding_metrics(&a, &b, T).unwrap();
        prop_assert!(r.p0 + r.p1 <= 1.0 + 1e-9);
        prop_assert!(check_binding_bound(&r).pass);
    }

    #[test]
    fn sealing_identities(seed in any::<u64>()) {
        let bob = random_sealing_attack(&mut seeded(seed));
        let r = sealing_metrics(&bob, T).unwrap();
        prop_assert!((r.detection_p - r.detection_enumerated).abs() < 1e-9);
        prop_assert!(r.identity_residual < 1e-9);
        prop_assert!((0.0..=0.5 + 1e-12).contains(&r.advantage_eps));
        prop_assert!(check_sealing_bound(&r, T).pass);
    }
}
