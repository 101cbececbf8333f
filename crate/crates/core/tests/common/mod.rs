#![allow(dead_code)]

use qmrg::game::{GameSpec, OutcomeTuple, PvmElement, Sign, Strategy};
use qmrg::linalg::{CVector, StateVector, Tolerance};
use qmrg::random::{rng, state};
use qmrg::setup::{random_pools, OperatorSetup};

pub fn tol() -> Tolerance {
    Tolerance::default()
}

/// A setup with random pools and a random state.
pub fn random_strategy(m: usize, n: usize, da: usize, db: usize, seed: u64) -> (OperatorSetup, Strategy) {
    let game = GameSpec::new(m, n).unwrap();
    let mut r = rng(seed);
    let (rows, cols) = random_pools(&game, da, db, &mut r);
    let setup = OperatorSetup::realize(&game, da, db, rows, cols, tol()).unwrap();
    let s = setup.strategy(state(da, db, &mut r)).unwrap();
    (setup, s)
}

fn permute_tuple(t: &OutcomeTuple, perm: &[usize]) -> OutcomeTuple {
    let mut out = t.0.clone();
    for (old, &new) in perm.iter().enumerate() {
        out[new] = t.0[old];
    }
    OutcomeTuple(out)
}

/// Row `x` moves to `rows[x]`, column `y` to `cols[y]`, for both players.
pub fn permute(s: &Strategy, rows: &[usize], cols: &[usize]) -> Strategy {
    let mut alice = vec![Vec::new(); s.m()];
    for (x, pvm) in s.alice().iter().enumerate() {
        alice[rows[x]] = pvm
            .iter()
            .map(|e| PvmElement { outcome: permute_tuple(&e.outcome, cols), projector: e.projector.clone() })
            .collect();
    }
    let mut bob = vec![Vec::new(); s.n()];
    for (y, pvm) in s.bob().iter().enumerate() {
        bob[cols[y]] = pvm
            .iter()
            .map(|e| PvmElement { outcome: permute_tuple(&e.outcome, rows), projector: e.projector.clone() })
            .collect();
    }
    Strategy::new(s.m(), s.n(), s.state().clone(), alice, bob, tol()).unwrap()
}

fn negate(t: &OutcomeTuple) -> OutcomeTuple {
    OutcomeTuple(t.0.iter().map(|&s| -s).collect())
}

/// Transposes the rectangle, exchanges the players and flips every sign.
/// Preserves the value when `m` and `n` are odd.
pub fn transpose(s: &Strategy) -> Strategy {
    let (da, db) = (s.dim_a(), s.dim_b());
    let amps = s.state().amplitudes();
    let swapped = CVector::from_fn(da * db, |k, _| {
        let (b, a) = (k / da, k % da);
        amps[a * db + b]
    });
    let state = StateVector::new(db, da, swapped, tol()).unwrap();
    let flip = |pvms: &[Vec<PvmElement>]| -> Vec<Vec<PvmElement>> {
        pvms.iter()
            .map(|pvm| pvm.iter().map(|e| PvmElement { outcome: negate(&e.outcome), projector: e.projector.clone() }).collect())
            .collect()
    };
    Strategy::new(s.n(), s.m(), state, flip(s.bob()), flip(s.alice()), tol()).unwrap()
}

/// Quarter turn: transpose followed by reversing the column order.
pub fn rotate(s: &Strategy) -> Strategy {
    let t = transpose(s);
    let rows: Vec<usize> = (0..t.m()).collect();
    let cols: Vec<usize> = (0..t.n()).rev().collect();
    permute(&t, &rows, &cols)
}

pub fn sign(v: i64) -> Sign {
    Sign::from_i64(v).unwrap()
}
