mod common;

use common::{random_strategy, tol};
use proptest::prelude::*;
use qmrg::error::Error;
use qmrg::game::Sign;
use qmrg::linalg::identity;
use qmrg::setup::{build_index_sets, observables_from_setup, IndexRef, OperatorSetup, Side};

fn side_of(alice: bool) -> Side {
    if alice {
        Side::Alice
    } else {
        Side::Bob
    }
}

/// Independent check of the reduction restrictions.
fn restrictions_hold(s: &OperatorSetup) -> bool {
    let (m, n) = (s.game().m(), s.game().n());
    let lines_ok = (0..m).all(|x| !s.surviving(Side::Alice, x).is_empty())
        && (0..n).all(|y| !s.surviving(Side::Bob, y).is_empty());
    let cells_ok = (0..m).all(|x| {
        (0..n).all(|y| {
            Sign::BOTH.iter().all(|&d| {
                let p = s.surviving(Side::Alice, x).iter().any(|k| s.row_sets().set(d, y).contains(k));
                let q = s.surviving(Side::Bob, y).iter().any(|k| s.col_sets().set(d, x).contains(k));
                p == q
            })
        })
    });
    lines_ok && cells_ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn index_sets_respect_line_products(arity in 1usize..11, alice: bool) {
        let side = side_of(alice);
        let fam = build_index_sets(arity, side).unwrap();
        prop_assert_eq!(fam.pool_size(), 1 << (arity - 1));
        for t in fam.tuples() {
            prop_assert_eq!(t.product(), side.target_product());
        }
        for j in 0..arity {
            let (plus, minus) = (fam.set(Sign::Plus, j), fam.set(Sign::Minus, j));
            prop_assert!(plus.is_disjoint(minus));
            prop_assert_eq!(plus.len() + minus.len(), fam.pool_size());
            if arity >= 2 {
                prop_assert_eq!(plus.len(), 1 << (arity - 2));
                prop_assert_eq!(minus.len(), 1 << (arity - 2));
            }
        }
    }

    #[test]
    fn observables_commute_and_multiply_out(m in 1usize..4, n in 1usize..4, da in 1usize..9, db in 1usize..9, seed: u64) {
        let (setup, _) = random_strategy(m, n, da, db, seed);
        let obs = observables_from_setup(&setup, tol()).unwrap();
        let bound = 10.0 * tol().eps();
        for i in 0..m {
            let mut prod = identity(da);
            for j in 0..n {
                for k in 0..n {
                    let (a, b) = (&obs.alice[i][j], &obs.alice[i][k]);
                    prop_assert!((a * b - b * a).norm() <= bound);
                }
                prod *= &obs.alice[i][j];
            }
            prop_assert!((prod - identity(da)).norm() <= bound);
        }
        for j in 0..n {
            let mut prod = identity(db);
            for i in 0..m {
                for k in 0..m {
                    let (a, b) = (&obs.bob[i][j], &obs.bob[k][j]);
                    prop_assert!((a * b - b * a).norm() <= bound);
                }
                prod *= &obs.bob[i][j];
            }
            prop_assert!((prod + identity(db)).norm() <= bound);
        }
    }

    #[test]
    fn reduce_keeps_restrictions_and_order(
        m in 2usize..4,
        n in 2usize..4,
        seed: u64,
        picks in proptest::collection::vec((any::<bool>(), 0usize..3, 0usize..4), 1..4),
    ) {
        let (setup, _) = random_strategy(m, n, 4, 4, seed);
        let victims: Vec<IndexRef> = picks
            .iter()
            .map(|&(alice, line, slot)| {
                let side = side_of(alice);
                let lines = if alice { m } else { n };
                let size = setup.family(side).pool_size();
                IndexRef { side, line: line % lines, slot: slot % size }
            })
            .collect();
        match setup.reduce(&victims, tol()) {
            Ok(r) => {
                prop_assert!(restrictions_hold(&r));
                prop_assert!(r.is_reduction_of(&setup));
                for v in &victims {
                    prop_assert!(r.is_reduced(*v));
                }
            }
            Err(Error::RuleViolation(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
