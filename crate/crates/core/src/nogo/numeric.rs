//! Random finite-dimensional realizations of scenarios and expressions.

use serde::Serialize;

use super::scenario::{CellExpression, ParityScenario, Term};
use crate::error::{Error, Result};
use crate::linalg::{intersect, kron, CMatrix, CVector, Subspace, Tolerance};
use crate::par::Execution;
use crate::random::{random_partition, rng, unitary, SeededRng};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationMode {
    /// All families diagonal in one random basis.
    Commuting,
    /// An independent random basis per family.
    Generic,
}

/// Each family as a unitary frame whose columns are split among its atoms.
#[derive(Clone, Debug)]
pub struct Realization {
    dim: usize,
    frames: Vec<CMatrix>,
    parts: Vec<Vec<Vec<usize>>>,
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of each atom of family `f`.
    pub fn ranks(&self, f: usize) -> Vec<usize> {
        self.parts[f].iter().map(Vec::len).collect()
    }

    pub fn projector(&self, f: usize, atom: usize) -> CMatrix {
        let cols = self.columns(f, [atom].iter());
        if cols.is_empty() {
            return CMatrix::zeros(self.dim, self.dim);
        }
        let m = CMatrix::from_columns(&cols);
        &m * m.adjoint()
    }

    fn columns<'a>(&self, f: usize, atoms: impl Iterator<Item = &'a usize>) -> Vec<CVector> {
        atoms
            .flat_map(|&a| self.parts[f][a].iter().map(|&i| self.frames[f].column(i).into_owned()))
            .collect()
    }
}

/// Samples projective measurements for every family of `s` on `C^dim`.
///
/// In commuting mode the first basis vector is placed on a joint cell when
/// one exists, so consistent scenarios get a nonzero `H_s`.
pub fn realize(s: &ParityScenario, dim: usize, mode: RealizationMode, seed: u64) -> Result<Realization> {
    s.validate()?;
    if dim == 0 {
        return Err(Error::RealizationFailure("dimension must be positive".into()));
    }
    let mut r = rng(seed);
    let (frames, parts) = match mode {
        RealizationMode::Commuting => {
            let u = unitary(dim, &mut r);
            let seeded = s.joint_cell();
            let mut parts: Vec<Vec<Vec<usize>>> = s.families.iter().map(|f| vec![Vec::new(); f.atoms.len()]).collect();
            for i in 0..dim {
                for (f, fam) in s.families.iter().enumerate() {
                    let atom = match (&seeded, i) {
                        (Some(cell), 0) => cell[f],
                        _ => r.random_range(0..fam.atoms.len()),
                    };
                    parts[f][atom].push(i);
                }
            }
            (vec![u; s.families.len()], parts)
        }
        RealizationMode::Generic => {
            let mut frames = Vec::with_capacity(s.families.len());
            let mut parts = Vec::with_capacity(s.families.len());
            for fam in &s.families {
                frames.push(unitary(dim, &mut r));
                parts.push(random_partition(dim, fam.atoms.len(), &mut r));
            }
            (frames, parts)
        }
    };
    Ok(Realization { dim, frames, parts })
}

/// Image of a term: the intersection of its families' partial projectors.
pub fn composite(s: &ParityScenario, real: &Realization, t: &Term, tol: Tolerance) -> Result<Subspace> {
    let d = real.dim;
    let images: Vec<Subspace> = t
        .choices
        .iter()
        .enumerate()
        .filter(|(f, choice)| choice.len() < s.families[*f].atoms.len())
        .map(|(f, choice)| Subspace::span_of(d, &real.columns(f, choice.iter()), tol))
        .collect();
    if images.is_empty() {
        Ok(Subspace::full(d))
    } else {
        intersect(&images, tol)
    }
}

/// `H_s`: the intersection over constraints of the span of their composites.
pub fn hs_space(s: &ParityScenario, real: &Realization, tol: Tolerance) -> Result<Subspace> {
    let d = real.dim;
    let mut constraint_spaces = Vec::with_capacity(s.constraints.len());
    for c in &s.constraints {
        let composites = c.terms.iter().map(|t| composite(s, real, t, tol)).collect::<Result<Vec<_>>>()?;
        constraint_spaces.push(if composites.is_empty() {
            Subspace::zero(d)
        } else {
            Subspace::sum(&composites, tol)?
        });
    }
    if constraint_spaces.is_empty() {
        return Ok(Subspace::full(d));
    }
    intersect(&constraint_spaces, tol)
}

pub fn numeric_hs(s: &ParityScenario, dim: usize, mode: RealizationMode, seed: u64, tol: Tolerance) -> Result<Subspace> {
    let real = realize(s, dim, mode, seed)?;
    hs_space(s, &real, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    pub dim: usize,
    pub seed: u64,
    pub hs_dim: usize,
}

/// `numeric_hs` over a grid of dimensions and seeds.
pub fn sweep(
    s: &ParityScenario,
    dims: &[usize],
    seeds: &[u64],
    mode: RealizationMode,
    tol: Tolerance,
    exec: Execution,
) -> Result<Vec<SweepPoint>> {
    let grid: Vec<(usize, u64)> = dims.iter().flat_map(|&d| seeds.iter().map(move |&k| (d, k))).collect();
    exec.map_slice(&grid, |&(dim, seed)| {
        numeric_hs(s, dim, mode, seed, tol).map(|h| SweepPoint { dim, seed, hs_dim: h.dim() })
    })
    .into_iter()
    .collect()
}

fn sample_family(dim: usize, atoms: usize, r: &mut SeededRng) -> (CMatrix, Vec<Vec<usize>>) {
    (unitary(dim, r), random_partition(dim, atoms, r))
}

/// Joint space of a cell expression realized with random measurements on
/// `C^dA ⊗ C^dB`: vectors on which every cell's projector acts as identity.
pub fn expression_space(e: &CellExpression, dim_a: usize, dim_b: usize, seed: u64, tol: Tolerance) -> Result<Subspace> {
    e.validate()?;
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::RealizationFailure("dimensions must be positive".into()));
    }
    let mut r = rng(seed);
    let rows: Vec<_> = e.rows.iter().map(|f| sample_family(dim_a, f.atoms.len(), &mut r)).collect();
    let cols: Vec<_> = e.columns.iter().map(|f| sample_family(dim_b, f.atoms.len(), &mut r)).collect();
    let block = |(u, parts): &(CMatrix, Vec<Vec<usize>>), atoms: &std::collections::BTreeSet<usize>| -> CMatrix {
        let cols: Vec<CVector> = atoms.iter().flat_map(|&a| parts[a].iter().map(|&i| u.column(i).into_owned())).collect();
        if cols.is_empty() {
            CMatrix::zeros(u.nrows(), 0)
        } else {
            CMatrix::from_columns(&cols)
        }
    };
    let d = dim_a * dim_b;
    let mut spaces = Vec::with_capacity(e.cells.len());
    for cell in &e.cells {
        let mut vectors = Vec::new();
        for t in &cell.terms {
            let (a, b) = (block(&rows[cell.row], &t.e), block(&cols[cell.col], &t.f));
            let prod = kron(&a, &b);
            vectors.extend(prod.column_iter().map(|c| c.into_owned()));
        }
        spaces.push(Subspace::span_of(d, &vectors, tol));
    }
    if spaces.is_empty() {
        return Ok(Subspace::full(d));
    }
    intersect(&spaces, tol)
}
