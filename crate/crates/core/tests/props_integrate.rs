mod common;

use common::tol;
use proptest::prelude::*;
use qmrg::game::{game_value, GameSpec, Strategy};
use qmrg::integrate::{integrate, rotate_solution, IntegrationPlan};
use qmrg::linalg::{identity, zeros};
use qmrg::pqss::schmidt_clusters;
use qmrg::random::{rng, unitary};
use qmrg::setup::{mermin_peres_fixture, OperatorSetup};

fn rotated_fixture(seed: u64) -> Strategy {
    let (_, s) = mermin_peres_fixture();
    let mut r = rng(seed);
    rotate_solution(&s, &unitary(4, &mut r), &unitary(4, &mut r), tol()).unwrap()
}

fn weights(raw: &[f64]) -> Vec<f64> {
    let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
    raw.iter().map(|w| w / norm).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integrated_pvms_are_complete_and_orthogonal(
        raw in prop::collection::vec(0.1f64..1.0, 1..4),
        pad_a in 0usize..3,
        pad_b in 0usize..3,
        seed: u64,
    ) {
        let g = GameSpec::new(3, 3).unwrap();
        let w = weights(&raw);
        let inputs = w.iter().enumerate().map(|(k, &wk)| (rotated_fixture(seed.wrapping_add(k as u64)), wk)).collect();
        let mut plan = IntegrationPlan::stacked(inputs);
        plan.dim_a += pad_a;
        plan.dim_b += pad_b;
        let out = integrate(&g, &plan, tol()).unwrap();
        let bound = 10.0 * tol().eps();
        for (pvms, d) in [(out.alice(), out.dim_a()), (out.bob(), out.dim_b())] {
            for pvm in pvms {
                let mut sum = zeros(d, d);
                for (k, e) in pvm.iter().enumerate() {
                    sum += &e.projector;
                    prop_assert!((&e.projector * &e.projector - &e.projector).norm() <= bound);
                    for f in &pvm[k + 1..] {
                        prop_assert!((&e.projector * &f.projector).norm() <= bound);
                    }
                }
                prop_assert!((sum - identity(d)).norm() <= bound);
            }
        }
        prop_assert!((game_value(&g, &out).unwrap() - 1.0).abs() <= bound);
    }

    #[test]
    fn clusters_follow_the_weights(raw in prop::collection::vec(0.1f64..1.0, 1..4), seed: u64) {
        let w = weights(&raw);
        for (k, a) in w.iter().enumerate() {
            for b in &w[k + 1..] {
                prop_assume!((a - b).abs() > 1e-3);
            }
        }
        let g = GameSpec::new(3, 3).unwrap();
        let inputs = w.iter().enumerate().map(|(k, &wk)| (rotated_fixture(seed.wrapping_add(k as u64)), wk)).collect();
        let out = integrate(&g, &IntegrationPlan::stacked(inputs), tol()).unwrap();
        let setup = OperatorSetup::from_strategy(&g, &out, tol()).unwrap();
        let analysis = schmidt_clusters(out.state(), &setup, tol()).unwrap();
        let mut betas: Vec<f64> = analysis.clusters.iter().map(|c| c.beta).collect();
        let mut expected = w.clone();
        betas.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        prop_assert_eq!(betas.len(), expected.len());
        for (b, e) in betas.iter().zip(&expected) {
            prop_assert!((b - e).abs() < 1e-9);
        }
        prop_assert!(analysis.clusters.iter().all(|c| c.perfect && c.schmidt_rank == 4));
    }
}
