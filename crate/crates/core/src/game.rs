//! Magic rectangle games, quantum strategies and their winning value.
//!
//! Questions are zero-based internally (`x < m` picks Alice's row, `y < n`
//! Bob's column); the JSON layer converts to the one-based labels used in
//! reports.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermiticity_residual, idempotency_residual, identity, is_finite, CMatrix, StateVector,
    Tolerance,
};
use crate::par::{ordered_sum, Execution};

/// A ±1 answer bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidSign),
        }
    }

    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).map_err(serde::de::Error::custom)
    }
}

/// Answer tuple of one player: `n` signs for Alice, `m` for Bob.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeTuple(pub Vec<Sign>);

impl OutcomeTuple {
    pub fn from_values(values: &[i64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| Sign::from_i64(v))
            .collect::<Result<Vec<_>>>()
            .map(OutcomeTuple)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> Sign {
        self.0[j]
    }

    pub fn product(&self) -> Sign {
        self.0.iter().fold(Sign::Plus, |acc, &s| acc * s)
    }

    /// All `2^len` tuples in lexicographic order with `+1 < -1`.
    pub fn all(len: usize) -> Vec<OutcomeTuple> {
        (0..1usize << len)
            .map(|bits| {
                OutcomeTuple(
                    (0..len)
                        .map(|j| {
                            if bits >> (len - 1 - j) & 1 == 0 {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Tuples whose entries multiply to `product`.
    pub fn with_product(len: usize, product: Sign) -> Vec<OutcomeTuple> {
        Self::all(len)
            .into_iter()
            .filter(|t| t.product() == product)
            .collect()
    }

    pub fn values(&self) -> Vec<i64> {
        self.0.iter().map(|s| s.value()).collect()
    }
}

impl fmt::Display for OutcomeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", s.value())?;
        }
        f.write_str(")")
    }
}

/// An `m × n` magic rectangle game with question distribution `mu`
/// (row-major, `mu[x * n + y]`).
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    m: usize,
    n: usize,
    mu: Vec<f64>,
    uniform: bool,
}

impl GameSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidGame(format!("{m}x{n} has an empty side")));
        }
        Ok(Self {
            m,
            n,
            mu: vec![1.0 / (m * n) as f64; m * n],
            uniform: true,
        })
    }

    pub fn with_distribution(m: usize, n: usize, mu: Vec<f64>, tol: Tolerance) -> Result<Self> {
        let mut g = Self::new(m, n)?;
        if mu.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                found: mu.len(),
            });
        }
        if mu.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidGame("negative or non-finite probability".into()));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > tol.eps() {
            return Err(Error::InvalidGame(format!("probabilities sum to {total}")));
        }
        g.uniform = false;
        g.mu = mu;
        Ok(g)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mu(&self, x: usize, y: usize) -> f64 {
        self.mu[x * self.n + y]
    }

    pub fn distribution(&self) -> &[f64] {
        &self.mu
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |x| (0..self.n).map(move |y| (x, y)))
    }

    /// Alice's winning answers `S_A` (product +1).
    pub fn alice_support(&self) -> Vec<OutcomeTuple> {
        OutcomeTuple::with_product(self.n, Sign::Plus)
    }

    /// Bob's winning answers `S_B` (product −1).
    pub fn bob_support(&self) -> Vec<OutcomeTuple> {
        OutcomeTuple::with_product(self.m, Sign::Minus)
    }

    pub fn same_shape(&self, other: &GameSpec) -> bool {
        self.m == other.m && self.n == other.n
    }
}

/// `V(a, b | x, y)`: Alice's row multiplies to +1, Bob's column to −1 and
/// they agree on the shared cell.
pub fn predicate(a: &OutcomeTuple, b: &OutcomeTuple, x: usize, y: usize) -> Result<bool> {
    let (n, m) = (a.len(), b.len());
    if y >= n || x >= m {
        return Err(Error::QuestionOutOfRange { x, y, m, n });
    }
    Ok(a.product() == Sign::Plus && b.product() == Sign::Minus && a.get(y) == b.get(x))
}

/// Predicate for a known game shape, with length checks.
pub fn predicate_in(g: &GameSpec, a: &OutcomeTuple, b: &OutcomeTuple, x: usize, y: usize) -> Result<bool> {
    if a.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            found: a.len(),
        });
    }
    if b.len() != g.m() {
        return Err(Error::LengthMismatch {
            expected: g.m(),
            found: b.len(),
        });
    }
    predicate(a, b, x, y)
}

/// One outcome of a projective measurement.
#[derive(Clone, Debug)]
pub struct PvmElement {
    pub outcome: OutcomeTuple,
    pub projector: CMatrix,
}

/// Shared state plus Alice's row PVMs and Bob's column PVMs.
#[derive(Clone, Debug)]
pub struct Strategy {
    m: usize,
    n: usize,
    state: StateVector,
    alice: Vec<Vec<PvmElement>>,
    bob: Vec<Vec<PvmElement>>,
}

impl Strategy {
    /// Validates PVM invariants (Hermitian idempotents, pairwise orthogonal,
    /// complete over the stored outcomes) within `tol`.
    pub fn new(
        m: usize,
        n: usize,
        state: StateVector,
        alice: Vec<Vec<PvmElement>>,
        bob: Vec<Vec<PvmElement>>,
        tol: Tolerance,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidStrategy(format!("{m}x{n} has an empty side")));
        }
        if alice.len() != m || bob.len() != n {
            return Err(Error::InvalidStrategy(format!(
                "expected {m} Alice PVMs and {n} Bob PVMs, got {} and {}",
                alice.len(),
                bob.len()
            )));
        }
        for (x, pvm) in alice.iter().enumerate() {
            check_pvm(pvm, n, state.dim_a(), tol)
                .map_err(|e| Error::InvalidStrategy(format!("Alice row {}: {e}", x + 1)))?;
        }
        for (y, pvm) in bob.iter().enumerate() {
            check_pvm(pvm, m, state.dim_b(), tol)
                .map_err(|e| Error::InvalidStrategy(format!("Bob column {}: {e}", y + 1)))?;
        }
        Ok(Self {
            m,
            n,
            state,
            alice,
            bob,
        })
    }

    /// Same as [`Strategy::new`] without validation, for operators already
    /// known to be valid.
    pub(crate) fn from_parts_unchecked(
        m: usize,
        n: usize,
        state: StateVector,
        alice: Vec<Vec<PvmElement>>,
        bob: Vec<Vec<PvmElement>>,
    ) -> Self {
        Self {
            m,
            n,
            state,
            alice,
            bob,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn dim_a(&self) -> usize {
        self.state.dim_a()
    }

    pub fn dim_b(&self) -> usize {
        self.state.dim_b()
    }

    pub fn alice(&self) -> &[Vec<PvmElement>] {
        &self.alice
    }

    pub fn bob(&self) -> &[Vec<PvmElement>] {
        &self.bob
    }

    pub fn alice_element(&self, x: usize, a: &OutcomeTuple) -> Option<&CMatrix> {
        self.alice
            .get(x)?
            .iter()
            .find(|e| &e.outcome == a)
            .map(|e| &e.projector)
    }

    pub fn bob_element(&self, y: usize, b: &OutcomeTuple) -> Option<&CMatrix> {
        self.bob
            .get(y)?
            .iter()
            .find(|e| &e.outcome == b)
            .map(|e| &e.projector)
    }

    pub fn with_state(&self, state: StateVector) -> Result<Self> {
        if state.dim_a() != self.dim_a() || state.dim_b() != self.dim_b() {
            return Err(Error::DimensionMismatch {
                expected: self.state.dim(),
                found: state.dim(),
            });
        }
        Ok(Self {
            state,
            ..self.clone()
        })
    }

    /// Alice's observable `O^A_{ij} = Σ_a a_j E_{a|i}`.
    pub fn alice_observable(&self, i: usize, j: usize) -> CMatrix {
        signed_sum(&self.alice[i], j, self.dim_a())
    }

    /// Bob's observable `O^B_{ij} = Σ_b b_i F_{b|j}`.
    pub fn bob_observable(&self, i: usize, j: usize) -> CMatrix {
        signed_sum(&self.bob[j], i, self.dim_b())
    }
}

fn signed_sum(pvm: &[PvmElement], position: usize, dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for e in pvm {
        if e.outcome.get(position) == Sign::Plus {
            acc += &e.projector;
        } else {
            acc -= &e.projector;
        }
    }
    acc
}

fn check_pvm(pvm: &[PvmElement], len: usize, dim: usize, tol: Tolerance) -> std::result::Result<(), String> {
    let mut sum = CMatrix::zeros(dim, dim);
    for (k, e) in pvm.iter().enumerate() {
        if e.outcome.len() != len {
            return Err(format!("outcome {} has length {}, expected {len}", e.outcome, e.outcome.len()));
        }
        if e.projector.shape() != (dim, dim) {
            return Err(format!("element {} has shape {:?}, expected {dim}x{dim}", e.outcome, e.projector.shape()));
        }
        if !is_finite(&e.projector) {
            return Err(format!("element {} has non-finite entries", e.outcome));
        }
        if hermiticity_residual(&e.projector) > tol.eps() || idempotency_residual(&e.projector) > tol.eps() {
            return Err(format!("element {} is not a projector", e.outcome));
        }
        for other in &pvm[..k] {
            if other.outcome == e.outcome {
                return Err(format!("outcome {} listed twice", e.outcome));
            }
            if (&other.projector * &e.projector).norm() > tol.eps() {
                return Err(format!("elements {} and {} are not orthogonal", other.outcome, e.outcome));
            }
        }
        sum += &e.projector;
    }
    let defect = (sum - identity(dim)).norm();
    if defect > tol.eps() {
        return Err(format!("elements do not sum to identity (defect {defect:.3e})"));
    }
    Ok(())
}

/// `⟨Ψ|E ⊗ F|Ψ⟩` via the coefficient matrix: `Tr(C† E C Fᵀ)`.
fn joint_expectation(coeffs: &CMatrix, e: &CMatrix, f: &CMatrix) -> crate::linalg::C64 {
    let t = e * coeffs * f.transpose();
    coeffs.iter().zip(t.iter()).map(|(c, t)| c.conj() * t).sum()
}

/// Raw `⟨Ψ|E_{a|x} ⊗ F_{b|y}|Ψ⟩` (real part) before clamping; outcomes
/// outside the stored support have zero weight.
pub fn correlation_raw(s: &Strategy, a: &OutcomeTuple, b: &OutcomeTuple, x: usize, y: usize) -> Result<f64> {
    if x >= s.m || y >= s.n {
        return Err(Error::QuestionOutOfRange { x, y, m: s.m, n: s.n });
    }
    let (Some(e), Some(f)) = (s.alice_element(x, a), s.bob_element(y, b)) else {
        return Ok(0.0);
    };
    Ok(joint_expectation(&s.state.coefficient_matrix(), e, f).re)
}

/// `p(a, b | x, y)` clamped to `[0, 1]`.
pub fn correlation(s: &Strategy, a: &OutcomeTuple, b: &OutcomeTuple, x: usize, y: usize) -> Result<f64> {
    Ok(correlation_raw(s, a, b, x, y)?.clamp(0.0, 1.0))
}

/// Per-cell winning probabilities and the total value.
#[derive(Clone, Debug, Serialize)]
pub struct ValueReport {
    pub value: f64,
    /// `cell_win[x][y] = Σ_{a,b} V p`.
    pub cell_win: Vec<Vec<f64>>,
    /// Probabilities below zero (or above one) that were clamped; each is
    /// within numerical noise unless the strategy is invalid.
    pub clamped: usize,
    pub max_imaginary: f64,
}

pub fn evaluate(g: &GameSpec, s: &Strategy) -> Result<ValueReport> {
    evaluate_with(g, s, Execution::default())
}

pub fn evaluate_with(g: &GameSpec, s: &Strategy, exec: Execution) -> Result<ValueReport> {
    if !g.same_shape_as(s) {
        return Err(Error::DimensionMismatch {
            expected: g.m() * g.n(),
            found: s.m * s.n,
        });
    }
    let coeffs = s.state.coefficient_matrix();
    let cells: Vec<(usize, usize)> = g.cells().collect();
    let per_cell = exec.map_slice(&cells, |&(x, y)| {
        let mut win = 0.0;
        let mut clamped = 0usize;
        let mut max_im: f64 = 0.0;
        for ea in &s.alice[x] {
            for fb in &s.bob[y] {
                if !predicate(&ea.outcome, &fb.outcome, x, y).unwrap_or(false) {
                    continue;
                }
                let z = joint_expectation(&coeffs, &ea.projector, &fb.projector);
                max_im = max_im.max(z.im.abs());
                let p = z.re;
                if !(0.0..=1.0).contains(&p) {
                    clamped += 1;
                }
                win += p.clamp(0.0, 1.0);
            }
        }
        (win, clamped, max_im)
    });
    let mut cell_win = vec![vec![0.0; g.n()]; g.m()];
    let mut weighted = Vec::with_capacity(cells.len());
    let mut clamped = 0;
    let mut max_imaginary: f64 = 0.0;
    for (&(x, y), &(w, c, im)) in cells.iter().zip(&per_cell) {
        cell_win[x][y] = w;
        weighted.push(g.mu(x, y) * w);
        clamped += c;
        max_imaginary = max_imaginary.max(im);
    }
    Ok(ValueReport {
        value: ordered_sum(&weighted),
        cell_win,
        clamped,
        max_imaginary,
    })
}

/// Winning probability `ω(G, S)`.
pub fn game_value(g: &GameSpec, s: &Strategy) -> Result<f64> {
    evaluate(g, s).map(|r| r.value)
}

pub fn is_perfect(g: &GameSpec, s: &Strategy, tol: Tolerance) -> Result<bool> {
    Ok(game_value(g, s)? >= 1.0 - tol.eps())
}

impl GameSpec {
    fn same_shape_as(&self, s: &Strategy) -> bool {
        self.m == s.m && self.n == s.n
    }
}

/// Best deterministic strategy.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalOptimum {
    pub value: f64,
    /// Winning cells of the optimum, set when `mu` is uniform so the value is
    /// the exact fraction `wins / cells`.
    pub wins: Option<u64>,
    pub cells: u64,
    /// Alice's answer per row.
    pub alice: Vec<OutcomeTuple>,
    /// Bob's answer per column.
    pub bob: Vec<OutcomeTuple>,
}

/// Work budget (candidate strategies × best-response cost) for
/// [`classical_oracle`].
pub const CLASSICAL_BUDGET: f64 = (1u64 << 32) as f64;

/// Maximum of the winning probability over deterministic strategies.
///
/// Enumerates every answer table of the player with fewer choices and lets
/// the other player best-respond line by line. Answers outside `S_A`/`S_B`
/// never win, so only those are enumerated.
pub fn classical_oracle(g: &GameSpec) -> Result<ClassicalOptimum> {
    classical_oracle_with(g, Execution::default())
}

pub fn classical_oracle_with(g: &GameSpec, exec: Execution) -> Result<ClassicalOptimum> {
    let (m, n) = (g.m(), g.n());
    let sa = g.alice_support();
    let sb = g.bob_support();
    let alice_tables = (sa.len() as f64).powi(m as i32);
    let bob_tables = (sb.len() as f64).powi(n as i32);
    let enumerate_bob = bob_tables <= alice_tables;
    let (count, respond_cost) = if enumerate_bob {
        (bob_tables, (m * sa.len() * n) as f64)
    } else {
        (alice_tables, (n * sb.len() * m) as f64)
    };
    if count * respond_cost > CLASSICAL_BUDGET {
        return Err(Error::TooLarge { m, n, count });
    }
    let count = count as usize;

    // Scores are compared as exact integers for a uniform distribution.
    let weight = |x: usize, y: usize| -> f64 {
        if g.is_uniform() {
            1.0
        } else {
            g.mu(x, y)
        }
    };

    let decode = |mut idx: usize, lines: usize, support: &[OutcomeTuple]| -> Vec<usize> {
        let mut out = vec![0; lines];
        for slot in out.iter_mut().rev() {
            *slot = idx % support.len();
            idx /= support.len();
        }
        out
    };

    // Returns (score, fixed table, response table) for one enumerated table.
    let evaluate_table = |idx: usize| -> (f64, Vec<usize>, Vec<usize>) {
        if enumerate_bob {
            let table = decode(idx, n, &sb);
            let mut score = 0.0;
            let mut response = Vec::with_capacity(m);
            for x in 0..m {
                let (best, s) = best_response(sa.len(), |k| {
                    (0..n)
                        .filter(|&y| sa[k].get(y) == sb[table[y]].get(x))
                        .map(|y| weight(x, y))
                        .sum()
                });
                response.push(best);
                score += s;
            }
            (score, table, response)
        } else {
            let table = decode(idx, m, &sa);
            let mut score = 0.0;
            let mut response = Vec::with_capacity(n);
            for y in 0..n {
                let (best, s) = best_response(sb.len(), |k| {
                    (0..m)
                        .filter(|&x| sb[k].get(x) == sa[table[x]].get(y))
                        .map(|x| weight(x, y))
                        .sum()
                });
                response.push(best);
                score += s;
            }
            (score, table, response)
        }
    };

    let results = exec.map_indexed(count, evaluate_table);
    let mut best_idx = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best_idx].0 {
            best_idx = i;
        }
    }
    let (score, table, response) = results.into_iter().nth(best_idx).expect("nonempty enumeration");
    let (alice_idx, bob_idx) = if enumerate_bob {
        (response, table)
    } else {
        (table, response)
    };
    let cells = (m * n) as u64;
    let (value, wins) = if g.is_uniform() {
        let wins = score.round() as u64;
        (wins as f64 / cells as f64, Some(wins))
    } else {
        (score, None)
    };
    Ok(ClassicalOptimum {
        value,
        wins,
        cells,
        alice: alice_idx.into_iter().map(|k| sa[k].clone()).collect(),
        bob: bob_idx.into_iter().map(|k| sb[k].clone()).collect(),
    })
}

fn best_response(options: usize, score: impl Fn(usize) -> f64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..options {
        let s = score(k);
        if s > best.1 {
            best = (k, s);
        }
    }
    best
}

/// Value of a deterministic answer table, straight from the definition.
pub fn deterministic_value(g: &GameSpec, alice: &[OutcomeTuple], bob: &[OutcomeTuple]) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in g.cells() {
        if predicate_in(g, &alice[x], &bob[y], x, y)? {
            total += g.mu(x, y);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{re, CVector};

    fn t(v: &[i64]) -> OutcomeTuple {
        OutcomeTuple::from_values(v).unwrap()
    }

    #[test]
    fn predicate_examples() {
        assert!(predicate(&t(&[1, 1, 1]), &t(&[1, 1, -1]), 0, 0).unwrap());
        assert!(!predicate(&t(&[1, 1, 1]), &t(&[-1, 1, 1]), 0, 0).unwrap());
        assert!(!predicate(&t(&[1, 1, -1]), &t(&[1, 1, -1]), 2, 2).unwrap());
    }

    #[test]
    fn predicate_length_checks() {
        let g = GameSpec::new(3, 3).unwrap();
        assert!(matches!(
            predicate_in(&g, &t(&[1, 1]), &t(&[1, 1, -1]), 0, 0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(predicate(&t(&[1, 1]), &t(&[1, -1]), 0, 2).is_err());
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(OutcomeTuple::all(3).len(), 8);
        let plus = OutcomeTuple::with_product(4, Sign::Plus);
        assert_eq!(plus.len(), 8);
        assert_eq!(
            OutcomeTuple::with_product(2, Sign::Minus),
            vec![t(&[1, -1]), t(&[-1, 1])]
        );
    }

    fn qubit_product_strategy(bob_outcome_one: bool) -> Strategy {
        let tol = Tolerance::default();
        let ket0 = CVector::from_vec(vec![re(1.0), re(0.0)]);
        let state = StateVector::product(&ket0, &ket0).unwrap();
        let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0)]));
        let p1 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(0.0), re(1.0)]));
        // 1x2 game: Alice answers (±1, ±1) with product +1, Bob answers (−1).
        let alice = vec![vec![
            PvmElement {
                outcome: t(&[1, 1]),
                projector: p0.clone(),
            },
            PvmElement {
                outcome: t(&[-1, -1]),
                projector: p1.clone(),
            },
        ]];
        let (fb0, fb1) = if bob_outcome_one { (p1.clone(), p0.clone()) } else { (p0.clone(), p1.clone()) };
        let bob = (0..2)
            .map(|_| {
                vec![
                    PvmElement {
                        outcome: t(&[-1]),
                        projector: fb0.clone(),
                    },
                    PvmElement {
                        outcome: t(&[1]),
                        projector: fb1.clone(),
                    },
                ]
            })
            .collect();
        Strategy::new(1, 2, state, alice, bob, tol).unwrap()
    }

    #[test]
    fn correlation_on_eigenstates() {
        let s = qubit_product_strategy(false);
        assert_eq!(correlation(&s, &t(&[1, 1]), &t(&[-1]), 0, 0).unwrap(), 1.0);
        assert_eq!(correlation(&s, &t(&[1, 1]), &t(&[1]), 0, 0).unwrap(), 0.0);
        let g = GameSpec::new(1, 2).unwrap();
        // Alice answers (1,1), Bob answers −1: disagree on both cells.
        assert_eq!(game_value(&g, &s).unwrap(), 0.0);
        let s = qubit_product_strategy(true);
        // Bob's −1 now sits on |1⟩, Alice's (1,1) on |0⟩: still no agreement.
        assert_eq!(game_value(&g, &s).unwrap(), 0.0);
    }

    #[test]
    fn strategy_validation() {
        let tol = Tolerance::default();
        let ket0 = CVector::from_vec(vec![re(1.0), re(0.0)]);
        let state = StateVector::product(&ket0, &ket0).unwrap();
        let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0)]));
        let bad = vec![vec![PvmElement {
            outcome: t(&[1]),
            projector: p0.clone(),
        }]];
        let bob = vec![vec![PvmElement {
            outcome: t(&[-1]),
            projector: CMatrix::identity(2, 2),
        }]];
        let err = Strategy::new(1, 1, state, bad, bob, tol).unwrap_err();
        assert!(matches!(err, Error::InvalidStrategy(_)));
    }

    #[test]
    fn classical_values() {
        let v = classical_oracle(&GameSpec::new(3, 3).unwrap()).unwrap();
        // Exhaustive enumeration: one defect is unavoidable, one suffices.
        assert_eq!(v.wins, Some(8));
        assert_eq!(v.value, 8.0 / 9.0);
        let g = GameSpec::new(3, 3).unwrap();
        assert!((deterministic_value(&g, &v.alice, &v.bob).unwrap() - v.value).abs() < 1e-12);

        assert_eq!(classical_oracle(&GameSpec::new(2, 4).unwrap()).unwrap().value, 1.0);
        assert!(classical_oracle(&GameSpec::new(2, 3).unwrap()).unwrap().value < 1.0);
        assert_eq!(classical_oracle(&GameSpec::new(1, 1).unwrap()).unwrap().value, 0.0);
        assert_eq!(classical_oracle(&GameSpec::new(1, 2).unwrap()).unwrap().value, 1.0);
    }

    #[test]
    fn classical_oracle_refuses_huge_games() {
        assert!(matches!(
            classical_oracle(&GameSpec::new(8, 8).unwrap()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn classical_oracle_non_uniform() {
        let tol = Tolerance::default();
        // All weight on cell (0,0) of the 3x3 game: a single cell is winnable.
        let mut mu = vec![0.0; 9];
        mu[0] = 1.0;
        let g = GameSpec::with_distribution(3, 3, mu, tol).unwrap();
        let v = classical_oracle(&g).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.wins.is_none());
        assert!(GameSpec::with_distribution(2, 2, vec![0.5; 4], tol).is_err());
    }
}
