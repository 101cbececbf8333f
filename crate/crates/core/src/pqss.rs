//! Canonical spaces of perfect quantum strategies and their Schmidt
//! structure.
//!
//! For a setup, cell `(i, j)` is won with certainty exactly on the image of
//! `Π_ij = Σ_Δ P_{iΔ}^{(j)} ⊗ Q_{jΔ}^{(i)}`; the canonical space is the
//! intersection of these images over all cells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{game_value, Sign};
use crate::linalg::{
    image, intersect, kron, schmidt, CMatrix, CVector, StateVector, Subspace, Tolerance,
};
use crate::par::Execution;
use crate::setup::{IndexRef, OperatorSetup, Side};

/// `P_{iΔ} ⊗ Q_{jΔ}` for one sign `Δ`; its sign is `Δ`.
#[derive(Clone, Debug)]
pub struct SignedBlock {
    pub sign: Sign,
    pub projector: CMatrix,
}

pub fn cell_blocks(setup: &OperatorSetup, i: usize, j: usize) -> Result<Vec<SignedBlock>> {
    let (m, n) = (setup.game().m(), setup.game().n());
    if i >= m || j >= n {
        return Err(Error::QuestionOutOfRange { x: i, y: j, m, n });
    }
    let p: Vec<CMatrix> = Sign::BOTH.iter().map(|&d| setup.p(i, d, j)).collect();
    let q: Vec<CMatrix> = Sign::BOTH.iter().map(|&d| setup.q(j, d, i)).collect();
    if p.iter().all(|x| x.norm() == 0.0) || q.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::InvalidSetup(format!(
            "cell ({}, {}) has no nonzero parity projector",
            i + 1,
            j + 1
        )));
    }
    Ok(Sign::BOTH
        .iter()
        .zip(p.iter().zip(&q))
        .map(|(&sign, (p, q))| SignedBlock {
            sign,
            projector: kron(p, q),
        })
        .collect())
}

/// `Π_ij`.
pub fn cell_projector(setup: &OperatorSetup, i: usize, j: usize) -> Result<CMatrix> {
    let blocks = cell_blocks(setup, i, j)?;
    Ok(blocks
        .into_iter()
        .map(|b| b.projector)
        .reduce(|a, b| a + b)
        .expect("two signs"))
}

#[derive(Clone, Debug)]
pub struct CanonicalSpace {
    subspace: Subspace,
    /// `cells[i][j] = Π_ij`.
    cells: Vec<Vec<CMatrix>>,
    ranks: Vec<Vec<usize>>,
}

impl CanonicalSpace {
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn cell_projector(&self, i: usize, j: usize) -> &CMatrix {
        &self.cells[i][j]
    }

    pub fn cell_ranks(&self) -> &[Vec<usize>] {
        &self.ranks
    }

    /// Intersection of the cell images, recomputed from arbitrary cell
    /// projectors (used for restricted setups).
    pub fn from_cell_projectors(cells: Vec<Vec<CMatrix>>, tol: Tolerance, exec: Execution) -> Result<Self> {
        let flat: Vec<&CMatrix> = cells.iter().flatten().collect();
        if flat.is_empty() {
            return Err(Error::EmptyInput("canonical space"));
        }
        let images = exec.map_slice(&flat, |p| image(p, tol));
        let images: Vec<Subspace> = images.into_iter().collect::<Result<_>>()?;
        let cols = cells[0].len();
        let ranks = images
            .chunks(cols)
            .map(|row| row.iter().map(Subspace::dim).collect())
            .collect();
        let subspace = intersect(&images, tol)?;
        Ok(Self { subspace, cells, ranks })
    }
}

pub fn canonical_space(setup: &OperatorSetup, tol: Tolerance) -> Result<CanonicalSpace> {
    canonical_space_with(setup, tol, Execution::default())
}

pub fn canonical_space_with(setup: &OperatorSetup, tol: Tolerance, exec: Execution) -> Result<CanonicalSpace> {
    let cells: Vec<(usize, usize)> = setup.game().cells().collect();
    let projectors = exec.map_slice(&cells, |&(i, j)| cell_projector(setup, i, j));
    let mut grid = vec![Vec::with_capacity(setup.game().n()); setup.game().m()];
    for (&(i, _), p) in cells.iter().zip(projectors) {
        grid[i].push(p?);
    }
    CanonicalSpace::from_cell_projectors(grid, tol, exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub distance: f64,
}

/// Distance from `psi` to the space; a member iff within `tol`.
pub fn membership(space: &CanonicalSpace, psi: &StateVector, tol: Tolerance) -> Result<Membership> {
    if psi.dim() != space.subspace.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.subspace.ambient_dim(),
            found: psi.dim(),
        });
    }
    let distance = space.subspace.distance(psi.amplitudes());
    Ok(Membership {
        member: distance <= tol.eps(),
        distance,
    })
}

/// One group of equal Schmidt coefficients, `β_k ψ_k`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cluster {
    pub beta: f64,
    #[serde(skip)]
    pub psi: StateVector,
    pub schmidt_rank: usize,
    /// Largest gap between Schmidt coefficients of `ψ_k`; zero when `ψ_k` is
    /// maximally entangled on its support.
    pub coefficient_spread: f64,
    /// Per row, the answer tuples whose projectors act on `ψ_k`.
    pub row_configurations: Vec<Vec<Vec<i64>>>,
    /// Per column, 1-based slots of the projectors acting on `ψ_k`.
    pub effective_column_indices: Vec<Vec<usize>>,
    /// Distance of `ψ_k` to the canonical space of the setup restricted to
    /// its effective column indices.
    pub restricted_distance: f64,
    pub value: f64,
    pub perfect: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SchmidtAnalysis {
    pub clusters: Vec<Cluster>,
    pub beta_norm: f64,
}

/// Splits a perfect state into clusters of equal Schmidt coefficients and
/// checks that each normalized cluster is a perfect solution of the setup
/// cut down to the column projectors it uses.
pub fn schmidt_clusters(psi: &StateVector, setup: &OperatorSetup, tol: Tolerance) -> Result<SchmidtAnalysis> {
    let space = canonical_space(setup, tol)?;
    let Membership { member, distance } = membership(&space, psi, tol)?;
    if !member {
        return Err(Error::NotAPqss { distance });
    }
    let sd = schmidt(psi, tol);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (l, &v) in sd.values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (sd.values[*g.last().expect("nonempty")] - v).abs() <= 2.0 * tol.eps() => g.push(l),
            _ => groups.push(vec![l]),
        }
    }
    let (da, db) = (psi.dim_a(), psi.dim_b());
    let mut clusters = Vec::with_capacity(groups.len());
    for g in groups {
        let beta = g.iter().map(|&l| sd.values[l].powi(2)).sum::<f64>().sqrt();
        let mut amps = CVector::zeros(da * db);
        for &l in &g {
            let term = sd.left.column(l).kronecker(&sd.right.column(l));
            amps += term * crate::linalg::re(sd.values[l] / beta);
        }
        let psi_k = StateVector::normalized(da, db, amps)?;
        let spread = g.iter().map(|&l| sd.values[l]).fold(f64::NEG_INFINITY, f64::max)
            - g.iter().map(|&l| sd.values[l]).fold(f64::INFINITY, f64::min);
        clusters.push(analyse_cluster(setup, psi_k, beta, g.len(), spread / beta, tol)?);
    }
    let beta_norm = clusters.iter().map(|c| c.beta * c.beta).sum::<f64>();
    Ok(SchmidtAnalysis { clusters, beta_norm })
}

fn analyse_cluster(
    setup: &OperatorSetup,
    psi: StateVector,
    beta: f64,
    rank: usize,
    spread: f64,
    tol: Tolerance,
) -> Result<Cluster> {
    let (m, n) = (setup.game().m(), setup.game().n());
    let coeffs = psi.coefficient_matrix();
    let acts = |side: Side, line: usize, slot: usize| -> bool {
        let p = &setup.pool(side, line)[slot];
        let w = match side {
            Side::Alice => p * &coeffs,
            Side::Bob => &coeffs * p.transpose(),
        };
        w.norm() > tol.eps()
    };
    let row_configurations = (0..m)
        .map(|x| {
            setup
                .surviving(Side::Alice, x)
                .into_iter()
                .filter(|&k| acts(Side::Alice, x, k))
                .map(|k| setup.row_sets().sign_vector(k).values())
                .collect()
        })
        .collect();
    let effective: Vec<Vec<usize>> = (0..n)
        .map(|y| {
            setup
                .surviving(Side::Bob, y)
                .into_iter()
                .filter(|&k| acts(Side::Bob, y, k))
                .collect()
        })
        .collect();

    // Restricted setup: non-effective column projectors set to zero.
    let mut cells = vec![Vec::with_capacity(n); m];
    for (i, row) in cells.iter_mut().enumerate() {
        for j in 0..n {
            let mut pi = CMatrix::zeros(psi.dim(), psi.dim());
            for delta in Sign::BOTH {
                let q = setup
                    .col_sets()
                    .set(delta, i)
                    .iter()
                    .filter(|k| effective[j].contains(k))
                    .fold(CMatrix::zeros(psi.dim_b(), psi.dim_b()), |acc, &k| {
                        acc + &setup.col_pools()[j][k]
                    });
                pi += kron(&setup.p(i, delta, j), &q);
            }
            row.push(pi);
        }
    }
    let restricted = CanonicalSpace::from_cell_projectors(cells, tol, Execution::default())?;
    let restricted_distance = restricted.subspace.distance(psi.amplitudes());
    let value = game_value(setup.game(), &setup.strategy(psi.clone())?)?;
    let perfect = restricted_distance <= tol.eps() && value >= 1.0 - tol.eps();
    Ok(Cluster {
        beta,
        psi,
        schmidt_rank: rank,
        coefficient_spread: spread,
        row_configurations,
        effective_column_indices: effective
            .into_iter()
            .map(|v| v.into_iter().map(|k| k + 1).collect())
            .collect(),
        restricted_distance,
        value,
        perfect,
    })
}

/// One term `α_l |φ_l⟩|ϕ_l⟩` of a per-cell decomposition.
#[derive(Clone, Debug)]
pub struct CellMode {
    pub sign: Sign,
    pub alpha: f64,
    pub left: CVector,
    pub right: CVector,
}

#[derive(Clone, Debug)]
pub struct PerCellForm {
    pub modes: Vec<CellMode>,
    pub residual: f64,
}

/// Writes `psi` as `Σ_l α_l |φ_l⟩|ϕ_l⟩` with each pair inside the image of
/// one block `P_{iΔ} ⊗ Q_{jΔ}`, by Schmidt-decomposing the block
/// components. Modes are grouped by sign, `+1` first.
pub fn per_cell_form(
    psi: &StateVector,
    setup: &OperatorSetup,
    i: usize,
    j: usize,
    tol: Tolerance,
) -> Result<PerCellForm> {
    let blocks = cell_blocks(setup, i, j)?;
    let total = blocks
        .iter()
        .fold(CMatrix::zeros(psi.dim(), psi.dim()), |acc, b| acc + &b.projector);
    let distance = (psi.amplitudes() - &total * psi.amplitudes()).norm();
    if distance > tol.eps() {
        return Err(Error::NotAPqss { distance });
    }
    let mut modes = Vec::new();
    let mut rebuilt = CVector::zeros(psi.dim());
    for block in blocks {
        let part = &block.projector * psi.amplitudes();
        let norm = part.norm();
        if norm <= tol.eps() {
            continue;
        }
        let sub = StateVector::normalized(psi.dim_a(), psi.dim_b(), part)?;
        let sd = schmidt(&sub, tol);
        for l in 0..sd.rank() {
            let alpha = sd.values[l] * norm;
            let left = sd.left.column(l).into_owned();
            let right = sd.right.column(l).into_owned();
            rebuilt += left.kronecker(&right) * crate::linalg::re(alpha);
            modes.push(CellMode {
                sign: block.sign,
                alpha,
                left,
                right,
            });
        }
    }
    let residual = (psi.amplitudes() - rebuilt).norm();
    Ok(PerCellForm { modes, residual })
}

/// Summary report used by the CLI.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PqssReport {
    pub space_dim: usize,
    pub per_cell_ranks: Vec<Vec<usize>>,
    pub clusters: Vec<ClusterSummary>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterSummary {
    pub beta: f64,
    pub schmidt_rank: usize,
    pub perfect: bool,
}

impl PqssReport {
    pub fn new(space: &CanonicalSpace, analysis: Option<&SchmidtAnalysis>) -> Self {
        Self {
            space_dim: space.dim(),
            per_cell_ranks: space.cell_ranks().to_vec(),
            clusters: analysis
                .map(|a| {
                    a.clusters
                        .iter()
                        .map(|c| ClusterSummary {
                            beta: c.beta,
                            schmidt_rank: c.schmidt_rank,
                            perfect: c.perfect,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }
}

/// Reduced copy of a setup for callers that want a concrete smaller setup;
/// victims are column slots outside `effective` (1-based, per column).
pub fn effective_reduction(setup: &OperatorSetup, effective: &[Vec<usize>], tol: Tolerance) -> Result<OperatorSetup> {
    let victims: Vec<IndexRef> = effective
        .iter()
        .enumerate()
        .flat_map(|(line, keep)| {
            setup
                .surviving(Side::Bob, line)
                .into_iter()
                .filter(move |k| !keep.contains(&(k + 1)))
                .map(move |slot| IndexRef {
                    side: Side::Bob,
                    line,
                    slot,
                })
        })
        .collect();
    setup.reduce(&victims, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameSpec;
    use crate::linalg::re;
    use crate::random::{product_state, rng, unit_in};
    use crate::setup::mermin_peres_fixture;

    fn diag(a: f64, b: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(vec![re(a), re(b)]))
    }

    fn bell_setup() -> OperatorSetup {
        let g = GameSpec::new(2, 2).unwrap();
        let rows = vec![vec![diag(1.0, 0.0), diag(0.0, 1.0)], vec![diag(0.0, 1.0), diag(1.0, 0.0)]];
        let cols = vec![vec![diag(1.0, 0.0), diag(0.0, 1.0)]; 2];
        OperatorSetup::realize(&g, 2, 2, rows, cols, Tolerance::default()).unwrap()
    }

    fn bell() -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        StateVector::normalized(2, 2, CVector::from_vec(vec![re(s), re(0.0), re(0.0), re(s)])).unwrap()
    }

    #[test]
    fn bell_cell_projector() {
        let p = cell_projector(&bell_setup(), 0, 0).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.0), re(0.0), re(1.0)]));
        assert!((p - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_per_cell_form() {
        let form = per_cell_form(&bell(), &bell_setup(), 0, 0, Tolerance::default()).unwrap();
        assert_eq!(form.modes.len(), 2);
        assert_eq!(form.modes[0].sign, Sign::Plus);
        assert_eq!(form.modes[1].sign, Sign::Minus);
        for m in &form.modes {
            assert!((m.alpha - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(form.residual < 1e-12);
    }

    #[test]
    fn mermin_peres_space_contains_fixture() {
        let tol = Tolerance::default();
        let (setup, s) = mermin_peres_fixture();
        let space = canonical_space(&setup, tol).unwrap();
        assert_eq!(space.dim(), 1);
        assert!(space.cell_ranks().iter().flatten().all(|&r| r == 8));
        let m = membership(&space, s.state(), tol).unwrap();
        assert!(m.member && m.distance < 1e-9);
        let prod = product_state(4, 4, &mut rng(1));
        assert!(!membership(&space, &prod, tol).unwrap().member);
    }

    #[test]
    fn fixture_is_one_maximally_entangled_cluster() {
        let tol = Tolerance::default();
        let (setup, s) = mermin_peres_fixture();
        let a = schmidt_clusters(s.state(), &setup, tol).unwrap();
        assert_eq!(a.clusters.len(), 1);
        let c = &a.clusters[0];
        assert!((c.beta - 1.0).abs() < 1e-12);
        assert_eq!(c.schmidt_rank, 4);
        assert!(c.perfect);
        assert!(c.coefficient_spread < 1e-9);
        assert!(c.effective_column_indices.iter().all(|v| v.len() == 4));
        assert!(c.row_configurations.iter().all(|v| v.len() == 4));
        let prod = product_state(4, 4, &mut rng(2));
        assert!(matches!(schmidt_clusters(&prod, &setup, tol), Err(Error::NotAPqss { .. })));
    }

    #[test]
    fn per_cell_form_on_fixture() {
        let tol = Tolerance::default();
        let (setup, s) = mermin_peres_fixture();
        for (i, j) in setup.game().cells().collect::<Vec<_>>() {
            let form = per_cell_form(s.state(), &setup, i, j, tol).unwrap();
            assert!(form.residual < 1e-9);
            for m in &form.modes {
                let p = setup.p(i, m.sign, j);
                assert!((&p * &m.left - &m.left).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_space_membership() {
        let tol = Tolerance::default();
        let (setup, _) = mermin_peres_fixture();
        let mut space = canonical_space(&setup, tol).unwrap();
        space.subspace = Subspace::zero(16);
        let v = product_state(4, 4, &mut rng(3));
        let m = membership(&space, &v, tol).unwrap();
        assert!(!m.member);
        assert!((m.distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn space_samples_are_perfect() {
        let tol = Tolerance::default();
        let (setup, _) = mermin_peres_fixture();
        let space = canonical_space(&setup, tol).unwrap();
        let mut r = rng(4);
        for _ in 0..5 {
            let v = unit_in(space.subspace(), &mut r).unwrap();
            let psi = StateVector::normalized(4, 4, v).unwrap();
            let w = game_value(setup.game(), &setup.strategy(psi).unwrap()).unwrap();
            assert!((w - 1.0).abs() < 1e-9);
        }
    }
}
