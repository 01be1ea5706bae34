//! Randomized property suites for the distance and entropy functions.

use leakdpt::entropy::{dmax, kl_divergence, rel_entropy, smoothed_dmax_classical, ClassicalDistribution};
use leakdpt::qcore::random::{random_density, random_probabilities, random_pure, random_unitary};
use leakdpt::qcore::{fidelity, partial_trace, pure_trace_distance, purified_distance, trace_distance, SubsystemSpec};
use leakdpt::rng;
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-8;

fn states(seed: u64, d: usize) -> (leakdpt::qcore::DensityOperator, leakdpt::qcore::DensityOperator) {
    let mut r = rng::stream(seed, d as u64);
    let rank = 1 + r.gen_range(0..d);
    (random_density(d, rank, &mut r), random_density(d, d, &mut r))
}

#[test]
fn thousand_instances_of_distance_inequalities() {
    let mut r = rng::stream(101, 0);
    for i in 0..1000 {
        let d = 2 + i % 5;
        let rho = random_density(d, 1 + r.gen_range(0..d), &mut r);
        let sigma = random_density(d, d, &mut r);
        let f = fidelity(&rho, &sigma).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap() / 2.0;
        assert!(
            1.0 - f <= t + TOL && t <= purified_distance(&rho, &sigma).unwrap() + TOL,
            "#{i}"
        );
        let rel = rel_entropy(&rho, &sigma).unwrap().finite().unwrap();
        let dm = dmax(&rho, &sigma).unwrap().finite().unwrap();
        assert!(rel + TOL >= 2.0 * t * t / std::f64::consts::LN_2, "Pinsker #{i}");
        assert!(rel <= dm + TOL, "D ≤ D∞ #{i}");
    }
}

#[test]
fn pure_state_trace_distance_matches_mixed_formula() {
    let mut r = rng::stream(102, 0);
    for d in 2..=6 {
        for _ in 0..50 {
            let (a, b) = (random_pure(d, &mut r), random_pure(d, &mut r));
            let mixed = trace_distance(&a.density(), &b.density()).unwrap();
            assert!((pure_trace_distance(&a, &b) - mixed).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unitary_invariance(seed in any::<u64>(), d in 2usize..=6) {
        let (rho, sigma) = states(seed, d);
        let u = random_unitary(d, &mut rng::stream(seed, 99));
        let (ru, su) = (rho.conjugate(&u), sigma.conjugate(&u));
        prop_assert!((fidelity(&rho, &sigma).unwrap() - fidelity(&ru, &su).unwrap()).abs() < TOL);
        prop_assert!((trace_distance(&rho, &sigma).unwrap() - trace_distance(&ru, &su).unwrap()).abs() < TOL);
        let a = rel_entropy(&rho, &sigma).unwrap().finite().unwrap();
        let b = rel_entropy(&ru, &su).unwrap().finite().unwrap();
        prop_assert!((a - b).abs() < TOL);
    }

    #[test]
    fn partial_trace_is_contractive(seed in any::<u64>(), split in 0usize..3) {
        let (da, db) = [(2, 2), (2, 3), (3, 2)][split];
        let spec = SubsystemSpec::new(vec![da, db]).unwrap();
        let (rab, sab) = states(seed, da * db);
        for keep in [[0usize], [1]] {
            let ra = partial_trace(&rab, &spec, &keep).unwrap();
            let sa = partial_trace(&sab, &spec, &keep).unwrap();
            prop_assert!(trace_distance(&ra, &sa).unwrap() <= trace_distance(&rab, &sab).unwrap() + TOL);
            prop_assert!(fidelity(&ra, &sa).unwrap() + TOL >= fidelity(&rab, &sab).unwrap());
            let d_a = rel_entropy(&ra, &sa).unwrap().finite().unwrap();
            let d_ab = rel_entropy(&rab, &sab).unwrap().finite().unwrap();
            prop_assert!(d_a <= d_ab + TOL);
        }
    }

    #[test]
    fn classical_substate_theorem(seed in any::<u64>(), k in 2usize..=8, eps in prop::sample::select(vec![0.1, 0.3, 0.5])) {
        let mut r = rng::stream(seed, 0);
        let p = random_probabilities(k, &mut r);
        let q = random_probabilities(k, &mut r);
        let d = kl_divergence(&p, &q).unwrap().finite().unwrap();
        let lhs = smoothed_dmax_classical(
            &ClassicalDistribution::from_probs(p).unwrap(),
            &ClassicalDistribution::from_probs(q).unwrap(),
            eps,
        )
        .unwrap()
        .finite()
        .unwrap();
        let rhs = (4.0 * d + 1.0) / (eps * eps) + (1.0 / (1.0 - eps * eps / 4.0)).log2();
        prop_assert!(lhs <= rhs, "{} > {}", lhs, rhs);
    }
}
