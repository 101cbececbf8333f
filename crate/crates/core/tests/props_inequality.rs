mod common;

use common::{random_strategy, tol};
use proptest::prelude::*;
use qmrg::game::{game_value, GameSpec};
use qmrg::inequality::{inequality_report, inequality_report_with, Convention, InequalityInput};
use qmrg::integrate::rotate_solution;
use qmrg::linalg::{c, CMatrix};
use qmrg::par::Execution;
use qmrg::random::{rng, state, unitary};
use rand::Rng;

/// Involutions diagonal in one random basis per line: Alice's per row,
/// Bob's per column. No product constraint is imposed.
fn unconstrained(m: usize, n: usize, da: usize, db: usize, seed: u64) -> InequalityInput {
    let mut r = rng(seed);
    let involution = |u: &CMatrix, r: &mut qmrg::random::SeededRng| {
        let d = CMatrix::from_diagonal(&qmrg::linalg::CVector::from_fn(u.nrows(), |_, _| {
            c(if r.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        }));
        u * d * u.adjoint()
    };
    let row_frames: Vec<CMatrix> = (0..m).map(|_| unitary(da, &mut r)).collect();
    let col_frames: Vec<CMatrix> = (0..n).map(|_| unitary(db, &mut r)).collect();
    let alice = (0..m).map(|i| (0..n).map(|_| involution(&row_frames[i], &mut r)).collect()).collect();
    let bob = (0..m).map(|_| (0..n).map(|j| involution(&col_frames[j], &mut r)).collect::<Vec<_>>()).collect();
    InequalityInput {
        state: state(da, db, &mut r),
        alice,
        bob,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constrained_tables_track_game_value(m in 1usize..4, n in 1usize..4, da in 1usize..4, db in 1usize..4, seed: u64) {
        let (_, s) = random_strategy(m, n, da, db, seed);
        let r = inequality_report(&InequalityInput::from_strategy(&s), Convention::RowColumn, tol()).unwrap();
        let (mf, nf) = (m as f64, n as f64);
        prop_assert!((r.alice_products - mf).abs() < 1e-8);
        prop_assert!((r.bob_products + nf).abs() < 1e-8);
        prop_assert!((r.total - (r.correlations + mf + nf)).abs() < 1e-8);
        let v = game_value(&GameSpec::new(m, n).unwrap(), &s).unwrap();
        prop_assert!((r.correlations - (2.0 * v - 1.0) * mf * nf).abs() < 1e-8);
    }

    #[test]
    fn unconstrained_tables_stay_below_fifteen(da in 1usize..5, db in 1usize..5, seed: u64) {
        let inp = unconstrained(3, 3, da, db, seed);
        for conv in [Convention::RowColumn, Convention::ColumnRow] {
            let r = inequality_report(&inp, conv, tol()).unwrap();
            prop_assert!(r.total <= 15.0 + 1e-9);
            if conv == Convention::RowColumn {
                prop_assert!(r.max_imaginary < 1e-9);
            }
        }
    }

    #[test]
    fn local_unitaries_leave_the_report(da in 1usize..4, db in 1usize..4, seed: u64) {
        let (_, s) = random_strategy(3, 3, da, db, seed);
        let mut r = rng(seed ^ 1);
        let rotated = rotate_solution(&s, &unitary(da, &mut r), &unitary(db, &mut r), tol()).unwrap();
        let a = inequality_report(&InequalityInput::from_strategy(&s), Convention::RowColumn, tol()).unwrap();
        let b = inequality_report(&InequalityInput::from_strategy(&rotated), Convention::RowColumn, tol()).unwrap();
        prop_assert!((a.total - b.total).abs() < 1e-8);
        prop_assert!((a.correlations - b.correlations).abs() < 1e-8);
    }

    #[test]
    fn execution_modes_agree(da in 1usize..4, db in 1usize..4, seed: u64) {
        let inp = unconstrained(3, 3, da, db, seed);
        let seq = inequality_report_with(&inp, Convention::RowColumn, tol(), Execution::Sequential).unwrap();
        let par = inequality_report_with(&inp, Convention::RowColumn, tol(), Execution::Parallel).unwrap();
        prop_assert_eq!(seq.total.to_bits(), par.total.to_bits());
    }
}
