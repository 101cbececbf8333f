//! Index sets, operator setups, observables and reductions.
//!
//! A row pool holds one projector per abstract index of the row family
//! (`2^{n-1}` indices, one per answer tuple in `S_A`); column pools are the
//! same for `S_B`. Pool positions follow the canonical ordering of
//! [`build_index_sets`], so pool slot `k` is the index with ordinal `k + 1`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameSpec, OutcomeTuple, PvmElement, Sign, Strategy};
use crate::linalg::{
    c, hermiticity_residual, idempotency_residual, identity, is_finite, kron_all, re, CMatrix,
    CVector, StateVector, Tolerance,
};

/// Which player a family, pool or observable belongs to. Alice's lines are
/// rows, Bob's are columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    /// Required product of every answer tuple on this side.
    pub fn target_product(self) -> Sign {
        match self {
            Side::Alice => Sign::Plus,
            Side::Bob => Sign::Minus,
        }
    }

    pub fn line_name(self) -> &'static str {
        match self {
            Side::Alice => "row",
            Side::Bob => "column",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Alice => "Alice",
            Side::Bob => "Bob",
        })
    }
}

/// Provenance of an index: either its construction path in the recursion
/// or, for the semantic family, the answer tuple itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum IndexLabel {
    /// `base ∈ {1, 2}` is the arity-2 ancestor (1 for arity 1); `primed[g]`
    /// records whether generation `g` took the primed copy.
    Lineage { base: u8, primed: Vec<bool> },
    Tuple { signs: Vec<i64> },
}

impl IndexLabel {
    /// Canonical 1-based ordinal: `base + Σ_g primed_g · 2^{g+1}`.
    pub fn ordinal(&self) -> Option<usize> {
        match self {
            IndexLabel::Lineage { base, primed } => Some(
                *base as usize
                    + primed
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p)
                        .map(|(g, _)| 1usize << (g + 1))
                        .sum::<usize>(),
            ),
            IndexLabel::Tuple { .. } => None,
        }
    }

    /// Answer tuple encoded by a lineage, replaying the recursion: the
    /// unprimed copy appends +1, the primed copy flips the first sign and
    /// appends −1.
    pub fn lineage_signs(&self, side: Side) -> Option<OutcomeTuple> {
        let IndexLabel::Lineage { base, primed } = self else {
            return None;
        };
        let mut signs = base_tuple(side, *base);
        for &p in primed {
            if p {
                signs[0] = -signs[0];
                signs.push(Sign::Minus);
            } else {
                signs.push(Sign::Plus);
            }
        }
        Some(OutcomeTuple(signs))
    }
}

fn base_tuple(side: Side, base: u8) -> Vec<Sign> {
    use Sign::{Minus, Plus};
    match (side, base) {
        (Side::Alice, 1) => vec![Plus, Plus],
        (Side::Alice, _) => vec![Minus, Minus],
        (Side::Bob, 1) => vec![Plus, Minus],
        (Side::Bob, _) => vec![Minus, Plus],
    }
}

/// `per_position[j][s]` is the set of pool slots whose sign at position `j`
/// is `+1` (`s = 0`) or `−1` (`s = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexSetFamily {
    side: Side,
    arity: usize,
    labels: Vec<IndexLabel>,
    per_position: Vec<[BTreeSet<usize>; 2]>,
}

#[inline]
fn half(delta: Sign) -> usize {
    match delta {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

impl IndexSetFamily {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn pool_size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[IndexLabel] {
        &self.labels
    }

    /// Slots `k` (0-based) with sign `delta` at position `j` (0-based).
    pub fn set(&self, delta: Sign, j: usize) -> &BTreeSet<usize> {
        &self.per_position[j][half(delta)]
    }

    /// Same as [`IndexSetFamily::set`] with 1-based ordinals, as printed.
    pub fn ordinals(&self, delta: Sign, j: usize) -> Vec<usize> {
        self.set(delta, j).iter().map(|k| k + 1).collect()
    }

    /// Sign vector of slot `k` read off the set memberships.
    pub fn sign_vector(&self, k: usize) -> OutcomeTuple {
        OutcomeTuple(
            (0..self.arity)
                .map(|j| {
                    if self.per_position[j][0].contains(&k) {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                })
                .collect(),
        )
    }

    pub fn tuples(&self) -> Vec<OutcomeTuple> {
        (0..self.pool_size()).map(|k| self.sign_vector(k)).collect()
    }

    pub fn slot_of(&self, tuple: &OutcomeTuple) -> Option<usize> {
        (0..self.pool_size()).find(|&k| &self.sign_vector(k) == tuple)
    }

    /// Checks the partition, size and parity invariants.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let pool: BTreeSet<usize> = (0..self.pool_size()).collect();
        if self.pool_size() != 1 << (self.arity - 1) {
            return Err(format!("pool size {} for arity {}", self.pool_size(), self.arity));
        }
        for (j, [plus, minus]) in self.per_position.iter().enumerate() {
            if !plus.is_disjoint(minus) || plus.union(minus).copied().collect::<BTreeSet<_>>() != pool {
                return Err(format!("position {} is not partitioned", j + 1));
            }
        }
        for k in 0..self.pool_size() {
            if self.sign_vector(k).product() != self.side.target_product() {
                return Err(format!("index {} has the wrong parity", k + 1));
            }
        }
        Ok(())
    }
}

/// Index sets built by the doubling recursion: every index of arity `k`
/// spawns an unprimed copy (next position +1) and a primed copy (first
/// position's halves swapped, next position −1). Unprimed copies come first.
pub fn build_index_sets(arity: usize, side: Side) -> Result<IndexSetFamily> {
    if arity == 0 {
        return Err(Error::InvalidGame("index families need arity at least 1".into()));
    }
    if arity == 1 {
        let mut pos = [BTreeSet::new(), BTreeSet::new()];
        pos[half(side.target_product())].insert(0);
        return Ok(IndexSetFamily {
            side,
            arity,
            labels: vec![IndexLabel::Lineage {
                base: 1,
                primed: Vec::new(),
            }],
            per_position: vec![pos],
        });
    }
    let base: Vec<Vec<Sign>> = vec![base_tuple(side, 1), base_tuple(side, 2)];
    let mut per_position: Vec<[BTreeSet<usize>; 2]> = (0..2)
        .map(|j| {
            let mut pos = [BTreeSet::new(), BTreeSet::new()];
            for (k, t) in base.iter().enumerate() {
                pos[half(t[j])].insert(k);
            }
            pos
        })
        .collect();
    let mut lineages: Vec<Vec<bool>> = vec![Vec::new(), Vec::new()];
    let mut bases: Vec<u8> = vec![1, 2];

    for _ in 2..arity {
        let p = lineages.len();
        let primed = |s: &BTreeSet<usize>| s.iter().map(|k| k + p).collect::<BTreeSet<_>>();
        let mut next = Vec::with_capacity(per_position.len() + 1);
        for (j, [plus, minus]) in per_position.iter().enumerate() {
            // Position 1 swaps halves in the primed copy; the rest copy through.
            let (pp, pm) = if j == 0 { (minus, plus) } else { (plus, minus) };
            let new_plus: BTreeSet<usize> = plus.union(&primed(pp)).copied().collect();
            let new_minus: BTreeSet<usize> = minus.union(&primed(pm)).copied().collect();
            next.push([new_plus, new_minus]);
        }
        next.push([(0..p).collect(), (p..2 * p).collect()]);
        per_position = next;
        let mut new_lineages = Vec::with_capacity(2 * p);
        for flag in [false, true] {
            for l in &lineages {
                let mut l = l.clone();
                l.push(flag);
                new_lineages.push(l);
            }
        }
        lineages = new_lineages;
        bases = bases.iter().chain(bases.iter()).copied().collect();
    }
    Ok(IndexSetFamily {
        side,
        arity,
        labels: lineages
            .into_iter()
            .zip(bases)
            .map(|(primed, base)| IndexLabel::Lineage { base, primed })
            .collect(),
        per_position,
    })
}

/// Index sets read straight off the answer tuples: slot `k` is the `k`-th
/// tuple (lexicographic) with the side's product, and `I_{Δ,j}` collects the
/// tuples with `a_j = Δ`.
pub fn semantic_index_sets(arity: usize, side: Side) -> Result<IndexSetFamily> {
    if arity == 0 {
        return Err(Error::InvalidGame("index families need arity at least 1".into()));
    }
    let tuples = OutcomeTuple::with_product(arity, side.target_product());
    let per_position = (0..arity)
        .map(|j| {
            let mut pos = [BTreeSet::new(), BTreeSet::new()];
            for (k, t) in tuples.iter().enumerate() {
                pos[half(t.get(j))].insert(k);
            }
            pos
        })
        .collect();
    Ok(IndexSetFamily {
        side,
        arity,
        labels: tuples
            .iter()
            .map(|t| IndexLabel::Tuple { signs: t.values() })
            .collect(),
        per_position,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BijectionReport {
    pub arity: usize,
    pub side: Side,
    /// `mapping[k]` is the answer tuple assigned to recursion index `k + 1`.
    pub mapping: Option<Vec<Vec<i64>>>,
    /// First failure, as a human-readable position.
    pub counterexample: Option<String>,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.mapping.is_some()
    }
}

pub const MAX_CHECK_ARITY: usize = 8;

/// Matches the recursive family against the semantic one. Each recursion
/// index is mapped through its membership sign vector; the lineage replay
/// must produce the same vector, the map must be a bijection and every
/// `I_{Δ,j}` must correspond.
pub fn check_recursion_matches_semantics(arity: usize, side: Side) -> Result<BijectionReport> {
    if arity > MAX_CHECK_ARITY {
        return Err(Error::TooLarge {
            m: arity,
            n: arity,
            count: (1u64 << (arity - 1)) as f64,
        });
    }
    let rec = build_index_sets(arity, side)?;
    let sem = semantic_index_sets(arity, side)?;
    let fail = |what: String| BijectionReport {
        arity,
        side,
        mapping: None,
        counterexample: Some(what),
    };
    if let Err(e) = rec.check_invariants() {
        return Ok(fail(e));
    }
    if rec.pool_size() != sem.pool_size() {
        return Ok(fail(format!("pool sizes {} vs {}", rec.pool_size(), sem.pool_size())));
    }
    let mut image = vec![usize::MAX; rec.pool_size()];
    let mut hit = vec![false; sem.pool_size()];
    for (k, slot) in image.iter_mut().enumerate() {
        let signs = rec.sign_vector(k);
        if arity >= 2 && rec.labels[k].lineage_signs(side).as_ref() != Some(&signs) {
            return Ok(fail(format!("index {} lineage disagrees with its set memberships", k + 1)));
        }
        let Some(target) = sem.slot_of(&signs) else {
            return Ok(fail(format!("index {} has sign vector {signs} outside the semantic pool", k + 1)));
        };
        if hit[target] {
            return Ok(fail(format!("two indices map to {signs}")));
        }
        hit[target] = true;
        *slot = target;
    }
    for j in 0..arity {
        for delta in Sign::BOTH {
            let mapped: BTreeSet<usize> = rec.set(delta, j).iter().map(|&k| image[k]).collect();
            if &mapped != sem.set(delta, j) {
                return Ok(fail(format!("I_{{{delta},{}}} differs", j + 1)));
            }
        }
    }
    Ok(BijectionReport {
        arity,
        side,
        mapping: Some(image.iter().map(|&t| sem.sign_vector(t).values()).collect()),
        counterexample: None,
    })
}

/// A pool slot on one side: `line` is the row (Alice) or column (Bob),
/// `slot` the 0-based index within the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IndexRef {
    pub side: Side,
    pub line: usize,
    pub slot: usize,
}

impl fmt::Display for IndexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.side {
            Side::Alice => 'E',
            Side::Bob => 'F',
        };
        write!(f, "{op}{} in {} {}", self.slot + 1, self.side.line_name(), self.line + 1)
    }
}

/// Which validity condition a reduction broke.
#[derive(Clone, Debug, PartialEq)]
pub enum Restriction {
    /// Every index of a line was removed, so its observables vanish.
    ObservableZero { side: Side, line: usize },
    /// `P_{xΔ}^{(y)}` and `Q_{yΔ}^{(x)}` are not both zero or both nonzero.
    BothOrNeither { row: usize, col: usize, delta: Sign },
    /// The surviving projectors of a line no longer resolve the identity.
    Support { side: Side, line: usize, defect: f64 },
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::ObservableZero { side, line } => write!(
                f,
                "observables of {} {} would be zero",
                side.line_name(),
                line + 1
            ),
            Restriction::BothOrNeither { row, col, delta } => write!(
                f,
                "P and Q for cell ({}, {}) with sign {delta} must be both zero or both nonzero",
                row + 1,
                col + 1
            ),
            Restriction::Support { side, line, defect } => write!(
                f,
                "projectors of {} {} do not support its observables (defect {defect:.3e})",
                side.line_name(),
                line + 1
            ),
        }
    }
}

/// Projector pools for every row and column, organized by index families.
#[derive(Clone, Debug)]
pub struct OperatorSetup {
    game: GameSpec,
    dim_a: usize,
    dim_b: usize,
    row_pools: Vec<Vec<CMatrix>>,
    col_pools: Vec<Vec<CMatrix>>,
    row_sets: IndexSetFamily,
    col_sets: IndexSetFamily,
    reduced: BTreeSet<IndexRef>,
}

impl OperatorSetup {
    /// Validates pools and records zero projectors as reduced. Each pool
    /// must consist of orthogonal projectors summing to the identity.
    pub fn realize(
        game: &GameSpec,
        dim_a: usize,
        dim_b: usize,
        row_pools: Vec<Vec<CMatrix>>,
        col_pools: Vec<Vec<CMatrix>>,
        tol: Tolerance,
    ) -> Result<Self> {
        let (m, n) = (game.m(), game.n());
        let row_sets = build_index_sets(n, Side::Alice)?;
        let col_sets = build_index_sets(m, Side::Bob)?;
        if row_pools.len() != m || col_pools.len() != n {
            return Err(Error::InvalidPool(format!(
                "expected {m} row pools and {n} column pools, got {} and {}",
                row_pools.len(),
                col_pools.len()
            )));
        }
        let mut reduced = BTreeSet::new();
        for (side, pools, family, dim) in [
            (Side::Alice, &row_pools, &row_sets, dim_a),
            (Side::Bob, &col_pools, &col_sets, dim_b),
        ] {
            for (line, pool) in pools.iter().enumerate() {
                check_pool(pool, family.pool_size(), dim, tol).map_err(|e| {
                    Error::InvalidPool(format!("{} {}: {e}", side.line_name(), line + 1))
                })?;
                for (slot, p) in pool.iter().enumerate() {
                    if p.norm() <= tol.eps() {
                        reduced.insert(IndexRef { side, line, slot });
                    }
                }
            }
        }
        Ok(Self {
            game: game.clone(),
            dim_a,
            dim_b,
            row_pools,
            col_pools,
            row_sets,
            col_sets,
            reduced,
        })
    }

    /// Pools taken from a strategy: slot `k` gets the element whose outcome
    /// is the slot's sign vector, zero when absent.
    pub fn from_strategy(game: &GameSpec, s: &Strategy, tol: Tolerance) -> Result<Self> {
        if !game.same_shape(&GameSpec::new(s.m(), s.n())?) {
            return Err(Error::DimensionMismatch {
                expected: game.m() * game.n(),
                found: s.m() * s.n(),
            });
        }
        let row_sets = build_index_sets(game.n(), Side::Alice)?;
        let col_sets = build_index_sets(game.m(), Side::Bob)?;
        let pools = |pvms: &[Vec<PvmElement>], family: &IndexSetFamily, dim: usize| -> Result<Vec<Vec<CMatrix>>> {
            pvms.iter()
                .map(|pvm| {
                    for e in pvm {
                        if family.slot_of(&e.outcome).is_none() && e.projector.norm() > tol.eps() {
                            return Err(Error::InvalidPool(format!(
                                "outcome {} has the wrong parity but nonzero weight",
                                e.outcome
                            )));
                        }
                    }
                    Ok(family
                        .tuples()
                        .iter()
                        .map(|t| {
                            pvm.iter()
                                .find(|e| &e.outcome == t)
                                .map(|e| e.projector.clone())
                                .unwrap_or_else(|| CMatrix::zeros(dim, dim))
                        })
                        .collect())
                })
                .collect()
        };
        let row_pools = pools(s.alice(), &row_sets, s.dim_a())?;
        let col_pools = pools(s.bob(), &col_sets, s.dim_b())?;
        Self::realize(game, s.dim_a(), s.dim_b(), row_pools, col_pools, tol)
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn row_pools(&self) -> &[Vec<CMatrix>] {
        &self.row_pools
    }

    pub fn col_pools(&self) -> &[Vec<CMatrix>] {
        &self.col_pools
    }

    pub fn row_sets(&self) -> &IndexSetFamily {
        &self.row_sets
    }

    pub fn col_sets(&self) -> &IndexSetFamily {
        &self.col_sets
    }

    pub fn family(&self, side: Side) -> &IndexSetFamily {
        match side {
            Side::Alice => &self.row_sets,
            Side::Bob => &self.col_sets,
        }
    }

    pub fn pool(&self, side: Side, line: usize) -> &[CMatrix] {
        match side {
            Side::Alice => &self.row_pools[line],
            Side::Bob => &self.col_pools[line],
        }
    }

    pub fn reduced(&self) -> &BTreeSet<IndexRef> {
        &self.reduced
    }

    pub fn is_reduced(&self, r: IndexRef) -> bool {
        self.reduced.contains(&r)
    }

    /// No pool entry is zero.
    pub fn is_maximal(&self) -> bool {
        self.reduced.is_empty()
    }

    /// Surviving slots of a line.
    pub fn surviving(&self, side: Side, line: usize) -> Vec<usize> {
        (0..self.family(side).pool_size())
            .filter(|&slot| !self.is_reduced(IndexRef { side, line, slot }))
            .collect()
    }

    /// `P_{xΔ}^{(y)}`: row-`x` projectors whose sign at position `y` is `Δ`.
    pub fn p(&self, x: usize, delta: Sign, y: usize) -> CMatrix {
        sum_over(&self.row_pools[x], self.row_sets.set(delta, y), self.dim_a)
    }

    /// `Q_{yΔ}^{(x)}`: column-`y` projectors whose sign at position `x` is `Δ`.
    pub fn q(&self, y: usize, delta: Sign, x: usize) -> CMatrix {
        sum_over(&self.col_pools[y], self.col_sets.set(delta, x), self.dim_b)
    }

    /// Strategy on `state`, keeping only nonzero pool entries as outcomes.
    pub fn strategy(&self, state: StateVector) -> Result<Strategy> {
        if state.dim_a() != self.dim_a || state.dim_b() != self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a * self.dim_b,
                found: state.dim(),
            });
        }
        let pvms = |side: Side, pools: &[Vec<CMatrix>], family: &IndexSetFamily| {
            pools
                .iter()
                .enumerate()
                .map(|(line, pool)| {
                    pool.iter()
                        .enumerate()
                        .filter(|&(slot, _)| !self.is_reduced(IndexRef { side, line, slot }))
                        .map(|(slot, p)| PvmElement {
                            outcome: family.sign_vector(slot),
                            projector: p.clone(),
                        })
                        .collect()
                })
                .collect()
        };
        Ok(Strategy::from_parts_unchecked(
            self.game.m(),
            self.game.n(),
            state,
            pvms(Side::Alice, &self.row_pools, &self.row_sets),
            pvms(Side::Bob, &self.col_pools, &self.col_sets),
        ))
    }

    /// Zeroes `victims`, moving each victim's projector onto the first
    /// surviving slot of its line so every line still resolves the identity,
    /// then checks the three validity restrictions.
    pub fn reduce(&self, victims: &[IndexRef], tol: Tolerance) -> Result<Self> {
        let mut out = self.clone();
        for v in victims {
            let (lines, size) = match v.side {
                Side::Alice => (self.game.m(), self.row_sets.pool_size()),
                Side::Bob => (self.game.n(), self.col_sets.pool_size()),
            };
            if v.line >= lines || v.slot >= size {
                return Err(Error::InvalidSetup(format!("no pool slot {v}")));
            }
            out.reduced.insert(*v);
        }
        for side in [Side::Alice, Side::Bob] {
            let lines = match side {
                Side::Alice => self.game.m(),
                Side::Bob => self.game.n(),
            };
            for line in 0..lines {
                let survivors = out.surviving(side, line);
                let Some(&keeper) = survivors.first() else {
                    return Err(Error::RuleViolation(Restriction::ObservableZero { side, line }));
                };
                let dim = match side {
                    Side::Alice => self.dim_a,
                    Side::Bob => self.dim_b,
                };
                let pool = match side {
                    Side::Alice => &mut out.row_pools[line],
                    Side::Bob => &mut out.col_pools[line],
                };
                for slot in 0..pool.len() {
                    if slot != keeper && out.reduced.contains(&IndexRef { side, line, slot }) {
                        let moved = std::mem::replace(&mut pool[slot], CMatrix::zeros(dim, dim));
                        pool[keeper] += moved;
                    }
                }
            }
        }
        for x in 0..self.game.m() {
            let row_alive: BTreeSet<usize> = out.surviving(Side::Alice, x).into_iter().collect();
            for y in 0..self.game.n() {
                let col_alive: BTreeSet<usize> = out.surviving(Side::Bob, y).into_iter().collect();
                for delta in Sign::BOTH {
                    let p_alive = !out.row_sets.set(delta, y).is_disjoint(&row_alive);
                    let q_alive = !out.col_sets.set(delta, x).is_disjoint(&col_alive);
                    if p_alive != q_alive {
                        return Err(Error::RuleViolation(Restriction::BothOrNeither { row: x, col: y, delta }));
                    }
                }
            }
        }
        for (side, pools, dim) in [
            (Side::Alice, &out.row_pools, out.dim_a),
            (Side::Bob, &out.col_pools, out.dim_b),
        ] {
            for (line, pool) in pools.iter().enumerate() {
                let sum: CMatrix = pool.iter().fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
                let defect = (sum - identity(dim)).norm();
                let broken = defect > tol.eps()
                    || pool
                        .iter()
                        .any(|p| idempotency_residual(p) > tol.eps() || hermiticity_residual(p) > tol.eps());
                if broken {
                    return Err(Error::RuleViolation(Restriction::Support { side, line, defect }));
                }
            }
        }
        Ok(out)
    }

    /// `self ≤ other` in the reduction order: same game and dimensions, and
    /// every index reduced in `other` is reduced here.
    pub fn is_reduction_of(&self, other: &OperatorSetup) -> bool {
        self.game.same_shape(&other.game)
            && self.dim_a == other.dim_a
            && self.dim_b == other.dim_b
            && other.reduced.is_subset(&self.reduced)
    }
}

fn sum_over(pool: &[CMatrix], slots: &BTreeSet<usize>, dim: usize) -> CMatrix {
    slots
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, &k| acc + &pool[k])
}

fn check_pool(pool: &[CMatrix], size: usize, dim: usize, tol: Tolerance) -> std::result::Result<(), String> {
    if pool.len() != size {
        return Err(format!("expected {size} projectors, got {}", pool.len()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (k, p) in pool.iter().enumerate() {
        if p.shape() != (dim, dim) {
            return Err(format!("slot {} has shape {:?}, expected {dim}x{dim}", k + 1, p.shape()));
        }
        if !is_finite(p) {
            return Err(format!("slot {} has non-finite entries", k + 1));
        }
        if hermiticity_residual(p) > tol.eps() || idempotency_residual(p) > tol.eps() {
            return Err(format!("slot {} is not a projector", k + 1));
        }
        for (l, q) in pool[..k].iter().enumerate() {
            if (q * p).norm() > tol.eps() {
                return Err(format!("slots {} and {} are not orthogonal", l + 1, k + 1));
            }
        }
        sum += p;
    }
    let defect = (sum - identity(dim)).norm();
    if defect > tol.eps() {
        return Err(format!("projectors do not sum to identity (defect {defect:.3e})"));
    }
    Ok(())
}

/// Observables of both players.
#[derive(Clone, Debug)]
pub struct ObservableTable {
    /// `alice[i][j] = O^A_{ij} = Σ_a a_j E_{a|i}`.
    pub alice: Vec<Vec<CMatrix>>,
    /// `bob[i][j] = O^B_{ij} = Σ_b b_i F_{b|j}`.
    pub bob: Vec<Vec<CMatrix>>,
    /// Cells whose observable is `±I` within `tol · dim`.
    pub degenerate: Vec<DegenerateObservable>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerateObservable {
    pub side: Side,
    pub row: usize,
    pub col: usize,
    pub sign: Sign,
}

/// Builds the observable table and checks its algebra: involutions,
/// commutation along each player's lines, row products `I`, column
/// products `−I`.
pub fn observables_from_setup(s: &OperatorSetup, tol: Tolerance) -> Result<ObservableTable> {
    let (m, n) = (s.game.m(), s.game.n());
    let alice: Vec<Vec<CMatrix>> = (0..m)
        .map(|i| (0..n).map(|j| s.p(i, Sign::Plus, j) - s.p(i, Sign::Minus, j)).collect())
        .collect();
    let bob: Vec<Vec<CMatrix>> = (0..m)
        .map(|i| (0..n).map(|j| s.q(j, Sign::Plus, i) - s.q(j, Sign::Minus, i)).collect())
        .collect();
    let check = 10.0 * tol.eps();
    let violation = |row: usize, col: usize, what: String| Error::ConstraintViolation {
        row: row + 1,
        col: col + 1,
        what,
    };
    for (side, table, dim) in [(Side::Alice, &alice, s.dim_a), (Side::Bob, &bob, s.dim_b)] {
        let id = identity(dim);
        for i in 0..m {
            for j in 0..n {
                let o = &table[i][j];
                if hermiticity_residual(o) > check {
                    return Err(violation(i, j, format!("{side} observable is not Hermitian")));
                }
                if (o * o - &id).norm() > check {
                    return Err(violation(i, j, format!("{side} observable is not an involution")));
                }
            }
        }
    }
    for i in 0..m {
        let row: Vec<&CMatrix> = alice[i].iter().collect();
        for e in 0..n {
            for f in e + 1..n {
                if (row[e] * row[f] - row[f] * row[e]).norm() > check {
                    return Err(violation(i, f, format!("Alice observables in columns {} and {} do not commute", e + 1, f + 1)));
                }
            }
        }
        let prod = row.iter().fold(identity(s.dim_a), |acc, o| acc * *o);
        if (prod - identity(s.dim_a)).norm() > check {
            return Err(violation(i, n - 1, "Alice row product is not I".into()));
        }
    }
    for j in 0..n {
        let col: Vec<&CMatrix> = bob.iter().map(|r| &r[j]).collect();
        for e in 0..m {
            for f in e + 1..m {
                if (col[e] * col[f] - col[f] * col[e]).norm() > check {
                    return Err(violation(f, j, format!("Bob observables in rows {} and {} do not commute", e + 1, f + 1)));
                }
            }
        }
        let prod = col.iter().fold(identity(s.dim_b), |acc, o| acc * *o);
        if (prod + identity(s.dim_b)).norm() > check {
            return Err(violation(m - 1, j, "Bob column product is not -I".into()));
        }
    }
    let mut degenerate = Vec::new();
    for (side, table, dim) in [(Side::Alice, &alice, s.dim_a), (Side::Bob, &bob, s.dim_b)] {
        let id = identity(dim);
        let limit = tol.eps() * dim as f64;
        for (row, line) in table.iter().enumerate() {
            for (col, o) in line.iter().enumerate() {
                for sign in Sign::BOTH {
                    if (o - &id * re(sign.as_f64())).norm() <= limit {
                        degenerate.push(DegenerateObservable { side, row, col, sign });
                    }
                }
            }
        }
    }
    Ok(ObservableTable { alice, bob, degenerate })
}

/// Random valid pools: a random unitary frame per line with basis vectors
/// split into random (possibly empty) blocks.
pub fn random_pools<R: Rng + ?Sized>(game: &GameSpec, dim_a: usize, dim_b: usize, rng: &mut R) -> (Vec<Vec<CMatrix>>, Vec<Vec<CMatrix>>) {
    let row_size = 1 << (game.n() - 1);
    let col_size = 1 << (game.m() - 1);
    let rows = (0..game.m()).map(|_| random_pool(dim_a, row_size, rng)).collect();
    let cols = (0..game.n()).map(|_| random_pool(dim_b, col_size, rng)).collect();
    (rows, cols)
}

pub fn random_pool<R: Rng + ?Sized>(dim: usize, size: usize, rng: &mut R) -> Vec<CMatrix> {
    let u = crate::random::unitary(dim, rng);
    crate::random::random_partition(dim, size, rng)
        .into_iter()
        .map(|block| {
            let mut p = CMatrix::zeros(dim, dim);
            for k in block {
                let v = u.column(k);
                p += &v * v.adjoint();
            }
            p
        })
        .collect()
}

/// Pauli matrices `I, X, Y, Z`.
pub fn pauli(which: char) -> CMatrix {
    let z = re(0.0);
    let o = re(1.0);
    match which {
        'I' => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        'Z' => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("unknown Pauli {which}"),
    }
}

/// The two-qubit Pauli magic square; rows multiply to `I`, columns to `−I`.
pub fn mermin_peres_observables() -> Vec<Vec<CMatrix>> {
    let table = [
        [("XI", 1.0), ("IX", 1.0), ("XX", 1.0)],
        [("IZ", 1.0), ("ZI", 1.0), ("ZZ", 1.0)],
        [("XZ", -1.0), ("ZX", -1.0), ("YY", 1.0)],
    ];
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|(label, sign)| {
                    let factors: Vec<CMatrix> = label.chars().map(pauli).collect();
                    kron_all(&factors) * re(*sign)
                })
                .collect()
        })
        .collect()
}

/// `Π_j (I + s_j O_j) / 2`, the joint eigenprojector of commuting involutions.
pub fn joint_projector(observables: &[&CMatrix], signs: &OutcomeTuple) -> CMatrix {
    let dim = observables[0].nrows();
    let id = identity(dim);
    observables
        .iter()
        .zip(&signs.0)
        .fold(id.clone(), |acc, (o, s)| acc * ((&id + *o * re(s.as_f64())) * re(0.5)))
}

/// Maximally entangled `Σ_k |k⟩|k⟩ / √d`.
pub fn maximally_entangled(dim: usize) -> StateVector {
    let amps = CVector::from_fn(dim * dim, |i, _| {
        if i / dim == i % dim {
            re(1.0 / (dim as f64).sqrt())
        } else {
            re(0.0)
        }
    });
    StateVector::normalized(dim, dim, amps).expect("nonzero")
}

/// Setup and strategy of the Mermin–Peres square on two EPR pairs.
pub fn mermin_peres_fixture() -> (OperatorSetup, Strategy) {
    let tol = Tolerance::default();
    let game = GameSpec::new(3, 3).expect("3x3");
    let obs = mermin_peres_observables();
    let row_sets = build_index_sets(3, Side::Alice).expect("arity 3");
    let col_sets = build_index_sets(3, Side::Bob).expect("arity 3");
    let row_pools: Vec<Vec<CMatrix>> = (0..3)
        .map(|x| {
            let line: Vec<&CMatrix> = obs[x].iter().collect();
            row_sets.tuples().iter().map(|t| joint_projector(&line, t)).collect()
        })
        .collect();
    let col_pools: Vec<Vec<CMatrix>> = (0..3)
        .map(|y| {
            let line: Vec<&CMatrix> = obs.iter().map(|r| &r[y]).collect();
            col_sets.tuples().iter().map(|t| joint_projector(&line, t)).collect()
        })
        .collect();
    let setup = OperatorSetup::realize(&game, 4, 4, row_pools, col_pools, tol).expect("valid pools");
    let strategy = setup.strategy(maximally_entangled(4)).expect("dims match");
    (setup, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::game_value;
    use crate::linalg::schmidt;
    use crate::random::rng;

    fn t(v: &[i64]) -> OutcomeTuple {
        OutcomeTuple::from_values(v).unwrap()
    }

    #[test]
    fn arity_three_row_sets() {
        let f = build_index_sets(3, Side::Alice).unwrap();
        assert_eq!(f.ordinals(Sign::Plus, 0), vec![1, 4]);
        assert_eq!(f.ordinals(Sign::Plus, 1), vec![1, 3]);
        assert_eq!(f.ordinals(Sign::Plus, 2), vec![1, 2]);
        assert_eq!(f.ordinals(Sign::Minus, 0), vec![2, 3]);
        assert_eq!(
            f.tuples(),
            vec![t(&[1, 1, 1]), t(&[-1, -1, 1]), t(&[-1, 1, -1]), t(&[1, -1, -1])]
        );
        let cols = build_index_sets(3, Side::Bob).unwrap();
        assert_eq!(
            cols.tuples(),
            vec![t(&[1, -1, 1]), t(&[-1, 1, 1]), t(&[-1, -1, -1]), t(&[1, 1, -1])]
        );
    }

    #[test]
    fn arity_two_and_one() {
        let f = build_index_sets(2, Side::Alice).unwrap();
        assert_eq!(f.ordinals(Sign::Plus, 0), vec![1]);
        assert_eq!(f.ordinals(Sign::Plus, 1), vec![1]);
        assert_eq!(f.ordinals(Sign::Minus, 0), vec![2]);
        assert_eq!(f.ordinals(Sign::Minus, 1), vec![2]);
        let one = build_index_sets(1, Side::Bob).unwrap();
        assert_eq!(one.tuples(), vec![t(&[-1])]);
        assert!(build_index_sets(0, Side::Bob).is_err());
    }

    #[test]
    fn arity_four_last_position_is_the_unprimed_copy() {
        let f3 = build_index_sets(3, Side::Alice).unwrap();
        let f4 = build_index_sets(4, Side::Alice).unwrap();
        let union: BTreeSet<usize> = f3
            .set(Sign::Plus, 2)
            .union(f3.set(Sign::Minus, 2))
            .copied()
            .collect();
        assert_eq!(f4.set(Sign::Plus, 3), &union);
        assert_eq!(f4.ordinals(Sign::Minus, 3), vec![5, 6, 7, 8]);
    }

    #[test]
    fn primed_copy_swaps_first_position() {
        let f4 = build_index_sets(4, Side::Alice).unwrap();
        // Primed indices 5..8 with Δ=+1 at position 1 are the primes of {2,3}.
        let primed_plus: Vec<usize> = f4.ordinals(Sign::Plus, 0).into_iter().filter(|&k| k > 4).collect();
        assert_eq!(primed_plus, vec![6, 7]);
    }

    #[test]
    fn lineage_ordinals() {
        let f = build_index_sets(5, Side::Bob).unwrap();
        for (k, label) in f.labels().iter().enumerate() {
            assert_eq!(label.ordinal(), Some(k + 1));
        }
    }

    #[test]
    fn semantic_sets() {
        let f = semantic_index_sets(3, Side::Alice).unwrap();
        let plus: Vec<OutcomeTuple> = f.set(Sign::Plus, 0).iter().map(|&k| f.sign_vector(k)).collect();
        assert_eq!(plus, vec![t(&[1, 1, 1]), t(&[1, -1, -1])]);
        assert_eq!(semantic_index_sets(2, Side::Bob).unwrap().tuples(), vec![t(&[1, -1]), t(&[-1, 1])]);
        let f4 = semantic_index_sets(4, Side::Alice).unwrap();
        assert_eq!(f4.pool_size(), 8);
        assert!((0..4).all(|j| f4.set(Sign::Plus, j).len() == 4));
    }

    #[test]
    fn recursion_matches_semantics() {
        for side in [Side::Alice, Side::Bob] {
            for arity in 1..=MAX_CHECK_ARITY {
                let r = check_recursion_matches_semantics(arity, side).unwrap();
                assert!(r.holds(), "{side} arity {arity}: {:?}", r.counterexample);
            }
        }
    }

    #[test]
    fn mermin_peres_fixture_is_perfect() {
        let (setup, s) = mermin_peres_fixture();
        assert!(setup.is_maximal());
        let g = GameSpec::new(3, 3).unwrap();
        assert!((game_value(&g, &s).unwrap() - 1.0).abs() < 1e-9);
        let sd = schmidt(s.state(), Tolerance::default());
        assert_eq!(sd.rank(), 4);
        assert!(sd.values.iter().all(|v| (v - 0.5).abs() < 1e-12));
        for pool in setup.row_pools().iter().chain(setup.col_pools()) {
            for p in pool {
                assert!((p.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mermin_peres_observables_satisfy_constraints() {
        let (setup, _) = mermin_peres_fixture();
        let tol = Tolerance::default();
        let table = observables_from_setup(&setup, tol).unwrap();
        let expected = mermin_peres_observables();
        for i in 0..3 {
            for j in 0..3 {
                assert!((&table.alice[i][j] - &expected[i][j]).norm() < 1e-12);
                assert!((&table.bob[i][j] - &expected[i][j]).norm() < 1e-12);
            }
        }
        assert!(table.degenerate.is_empty());
    }

    #[test]
    fn f4_reduction_is_legal() {
        let (setup, _) = mermin_peres_fixture();
        let tol = Tolerance::default();
        let victim = IndexRef {
            side: Side::Bob,
            line: 0,
            slot: 3,
        };
        let r = setup.reduce(&[victim], tol).unwrap();
        assert!(r.is_reduced(victim));
        assert!(r.is_reduction_of(&setup));
        assert!(!setup.is_reduction_of(&r));
        assert_eq!(r.surviving(Side::Bob, 0), vec![0, 1, 2]);
    }

    #[test]
    fn reductions_that_break_restrictions() {
        let (setup, _) = mermin_peres_fixture();
        let tol = Tolerance::default();
        let whole_row: Vec<IndexRef> = (0..4)
            .map(|slot| IndexRef {
                side: Side::Alice,
                line: 1,
                slot,
            })
            .collect();
        assert!(matches!(
            setup.reduce(&whole_row, tol),
            Err(Error::RuleViolation(Restriction::ObservableZero { side: Side::Alice, line: 1 }))
        ));
        // Both indices of I_{+,1} in row 1 gone, column 1 untouched.
        let half: Vec<IndexRef> = setup
            .row_sets()
            .set(Sign::Plus, 0)
            .iter()
            .map(|&slot| IndexRef {
                side: Side::Alice,
                line: 0,
                slot,
            })
            .collect();
        assert!(matches!(
            setup.reduce(&half, tol),
            Err(Error::RuleViolation(Restriction::BothOrNeither { .. }))
        ));
    }

    #[test]
    fn reduced_cell_observable_is_flagged() {
        // 2x2 game on dim 1: every pool is a single identity plus a zero.
        let g = GameSpec::new(2, 2).unwrap();
        let one = CMatrix::identity(1, 1);
        let zero = CMatrix::zeros(1, 1);
        let rows = vec![vec![one.clone(), zero.clone()], vec![one.clone(), zero.clone()]];
        let cols = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]];
        let s = OperatorSetup::realize(&g, 1, 1, rows, cols, Tolerance::default()).unwrap();
        assert_eq!(s.reduced().len(), 4);
        let table = observables_from_setup(&s, Tolerance::default()).unwrap();
        assert_eq!(table.degenerate.len(), 8);
    }

    #[test]
    fn two_by_two_diagonal_setup() {
        let g = GameSpec::new(2, 2).unwrap();
        let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0)]));
        let p1 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(0.0), re(1.0)]));
        let pools = vec![vec![p0.clone(), p1.clone()], vec![p0.clone(), p1.clone()]];
        let s = OperatorSetup::realize(&g, 2, 2, pools.clone(), pools, Tolerance::default()).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for d in Sign::BOTH {
                    assert!((s.p(x, d, y).trace().re - 1.0).abs() < 1e-12);
                }
            }
        }
        // Column products are −I only if Bob's observables multiply to −I;
        // with identical pools they are Z·Z... on Bob's side Z and −Z.
        assert!(observables_from_setup(&s, Tolerance::default()).is_ok());
    }

    #[test]
    fn invalid_pools_are_rejected() {
        let g = GameSpec::new(2, 2).unwrap();
        let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0)]));
        let pools = vec![vec![p0.clone(), p0.clone()], vec![p0.clone(), p0.clone()]];
        assert!(matches!(
            OperatorSetup::realize(&g, 2, 2, pools.clone(), pools, Tolerance::default()),
            Err(Error::InvalidPool(_))
        ));
    }

    #[test]
    fn random_pools_give_valid_observables() {
        let mut r = rng(11);
        let tol = Tolerance::default();
        for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
            let g = GameSpec::new(m, n).unwrap();
            let (rows, cols) = random_pools(&g, 5, 4, &mut r);
            let s = OperatorSetup::realize(&g, 5, 4, rows, cols, tol).unwrap();
            observables_from_setup(&s, tol).unwrap();
        }
    }
}
