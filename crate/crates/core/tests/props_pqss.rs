mod common;

use common::{permute, random_strategy, tol};
use proptest::prelude::*;
use qmrg::game::{game_value, GameSpec};
use qmrg::integrate::{integrate, rotate_solution, IntegrationPlan};
use qmrg::linalg::{schmidt, StateVector};
use qmrg::pqss::{canonical_space, membership, schmidt_clusters};
use qmrg::random::{gaussian_vector, rng, unit_in, unitary};
use qmrg::setup::{mermin_peres_fixture, OperatorSetup};

fn shuffle(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut rng(seed));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn perfect_iff_member_on_fixture(seed: u64, far: bool, exponent in 3i32..12) {
        let (setup, s) = mermin_peres_fixture();
        let g = GameSpec::new(3, 3).unwrap();
        let space = canonical_space(&setup, tol()).unwrap();
        // Either a negligible or a macroscopic perturbation.
        let eps = if far { 10f64.powi(-(exponent % 3) - 1) } else { 10f64.powi(-exponent - 6) };
        let noise = gaussian_vector(16, &mut rng(seed));
        let amps = s.state().amplitudes() + noise.scale(eps / noise.norm());
        let psi = StateVector::normalized(4, 4, amps).unwrap();
        let value = game_value(&g, &s.with_state(psi.clone()).unwrap()).unwrap();
        let member = membership(&space, &psi, tol().scaled(10.0)).unwrap();
        prop_assert_eq!((value - 1.0).abs() <= 10.0 * tol().eps(), member.member, "value {} distance {}", value, member.distance);
    }

    #[test]
    fn canonical_vectors_of_random_setups_are_perfect(n in 2usize..5, da in 1usize..4, db in 1usize..4, seed: u64) {
        let (setup, s) = random_strategy(2, n, da, db, seed);
        let g = GameSpec::new(2, n).unwrap();
        let space = canonical_space(&setup, tol()).unwrap();
        if let Some(v) = unit_in(space.subspace(), &mut rng(seed)) {
            let psi = StateVector::new(da, db, v, tol()).unwrap();
            prop_assert!(game_value(&g, &setup.strategy(psi).unwrap()).unwrap() >= 1.0 - 10.0 * tol().eps());
        }
        let value = game_value(&g, &s).unwrap();
        let member = membership(&space, s.state(), tol()).unwrap();
        if value >= 1.0 - tol().eps() {
            prop_assert!(member.distance <= 1e-4);
        }
        if member.member {
            prop_assert!(value >= 1.0 - 10.0 * tol().eps());
        }
    }

    #[test]
    fn canonical_space_is_permutation_invariant(seed: u64) {
        let (setup, s) = mermin_peres_fixture();
        let g = GameSpec::new(3, 3).unwrap();
        let p = permute(&s, &shuffle(3, seed), &shuffle(3, seed.rotate_left(7)));
        let moved = OperatorSetup::from_strategy(&g, &p, tol()).unwrap();
        let (a, b) = (canonical_space(&setup, tol()).unwrap(), canonical_space(&moved, tol()).unwrap());
        prop_assert!(a.subspace().same_as(b.subspace(), tol().scaled(10.0)));
    }

    #[test]
    fn canonical_vectors_have_schmidt_rank_four(seed: u64) {
        let (setup, _) = mermin_peres_fixture();
        let space = canonical_space(&setup, tol()).unwrap();
        let v = unit_in(space.subspace(), &mut rng(seed)).unwrap();
        let psi = StateVector::new(4, 4, v, tol()).unwrap();
        let sd = schmidt(&psi, tol());
        prop_assert!(sd.values.iter().filter(|&&s| s > 1e-7).count() >= 4);
    }

    #[test]
    fn clusters_partition_integrated_states(seed: u64, w in 0.05f64..0.95) {
        let (_, s) = mermin_peres_fixture();
        let g = GameSpec::new(3, 3).unwrap();
        let mut r = rng(seed);
        let rotated = rotate_solution(&s, &unitary(4, &mut r), &unitary(4, &mut r), tol()).unwrap();
        let (w1, w2) = (w.sqrt(), (1.0 - w).sqrt());
        let out = integrate(&g, &IntegrationPlan::stacked(vec![(s, w1), (rotated, w2)]), tol()).unwrap();
        let setup = OperatorSetup::from_strategy(&g, &out, tol()).unwrap();
        let analysis = schmidt_clusters(out.state(), &setup, tol()).unwrap();
        let norm: f64 = analysis.clusters.iter().map(|c| c.beta * c.beta).sum();
        prop_assert!((norm - 1.0).abs() <= 10.0 * tol().eps());
        for c in &analysis.clusters {
            prop_assert!(c.beta > 0.0 && c.perfect);
            prop_assert!(c.coefficient_spread <= 10.0 * tol().eps());
        }
        for (i, a) in analysis.clusters.iter().enumerate() {
            for b in &analysis.clusters[i + 1..] {
                prop_assert!((a.beta - b.beta).abs() > 2.0 * tol().eps());
                let overlap = a.psi.amplitudes().dotc(b.psi.amplitudes()).norm();
                prop_assert!(overlap <= 10.0 * tol().eps());
            }
        }
        let expected = if (w1 - w2).abs() > 2.0 * tol().eps() { 2 } else { 1 };
        prop_assert_eq!(analysis.clusters.len(), expected);
    }
}
