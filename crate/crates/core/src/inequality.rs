//! The magic rectangle inequality for tables of commuting involutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Strategy;
use crate::linalg::{identity, kron, CMatrix, StateVector, Tolerance};
use crate::par::{ordered_sum, Execution};

/// Which products enter the two product sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `Σ_i ⟨∏_j O^A_ij⟩ − Σ_j ⟨∏_i O^B_ij⟩`: Alice's row products and Bob's
    /// column products.
    #[default]
    RowColumn,
    /// `Σ_j ⟨∏_i O^A_ij⟩ − Σ_i ⟨∏_j O^B_ij⟩`.
    ColumnRow,
}

#[derive(Clone, Debug)]
pub struct InequalityInput {
    pub state: StateVector,
    /// `alice[i][j]`, involutions commuting along each row.
    pub alice: Vec<Vec<CMatrix>>,
    /// `bob[i][j]`, involutions commuting along each column.
    pub bob: Vec<Vec<CMatrix>>,
}

impl InequalityInput {
    pub fn from_strategy(s: &Strategy) -> Self {
        let (m, n) = (s.m(), s.n());
        Self {
            state: s.state().clone(),
            alice: (0..m).map(|i| (0..n).map(|j| s.alice_observable(i, j)).collect()).collect(),
            bob: (0..m).map(|i| (0..n).map(|j| s.bob_observable(i, j)).collect()).collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.alice.len(), self.alice.first().map_or(0, Vec::len))
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        let (m, n) = self.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidGame("empty observable table".into()));
        }
        let shaped = |t: &[Vec<CMatrix>]| t.len() == m && t.iter().all(|r| r.len() == n);
        if !shaped(&self.alice) || !shaped(&self.bob) {
            return Err(Error::InvalidStrategy("observable tables differ in shape".into()));
        }
        let bound = 10.0 * tol.eps();
        for (who, table, dim) in [("Alice", &self.alice, self.state.dim_a()), ("Bob", &self.bob, self.state.dim_b())] {
            for i in 0..m {
                for j in 0..n {
                    let o = &table[i][j];
                    if o.shape() != (dim, dim) {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: o.nrows(),
                        });
                    }
                    let herm = (o - o.adjoint()).norm();
                    let inv = (o * o - identity(dim)).norm();
                    if herm > bound || inv > bound {
                        return Err(Error::ConstraintViolation {
                            row: i + 1,
                            col: j + 1,
                            what: format!("{who}'s observable is not a Hermitian involution"),
                        });
                    }
                }
            }
        }
        let commutator = |a: &CMatrix, b: &CMatrix| (a * b - b * a).norm();
        for i in 0..m {
            for j in 0..n {
                for k in j + 1..n {
                    if commutator(&self.alice[i][j], &self.alice[i][k]) > bound {
                        return Err(Error::ConstraintViolation {
                            row: i + 1,
                            col: k + 1,
                            what: format!("Alice's observables in row {} do not commute", i + 1),
                        });
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..m {
                for k in i + 1..m {
                    if commutator(&self.bob[i][j], &self.bob[k][j]) > bound {
                        return Err(Error::ConstraintViolation {
                            row: k + 1,
                            col: j + 1,
                            what: format!("Bob's observables in column {} do not commute", j + 1),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityReport {
    pub convention: Convention,
    /// `Σ_ij ⟨O^A_ij ⊗ O^B_ij⟩`.
    pub correlations: f64,
    pub alice_products: f64,
    pub bob_products: f64,
    /// `correlations + alice_products − bob_products`.
    pub total: f64,
    pub max_imaginary: f64,
}

fn product<'a>(ops: impl Iterator<Item = &'a CMatrix>, dim: usize) -> CMatrix {
    ops.fold(identity(dim), |acc, o| acc * o)
}

pub fn inequality_report(inp: &InequalityInput, convention: Convention, tol: Tolerance) -> Result<InequalityReport> {
    inequality_report_with(inp, convention, tol, Execution::default())
}

pub fn inequality_report_with(
    inp: &InequalityInput,
    convention: Convention,
    tol: Tolerance,
    exec: Execution,
) -> Result<InequalityReport> {
    inp.validate(tol)?;
    let (m, n) = inp.shape();
    let (da, db) = (inp.state.dim_a(), inp.state.dim_b());
    let (ia, ib) = (identity(da), identity(db));
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let corr = exec.map_slice(&cells, |&(i, j)| inp.state.expectation(&kron(&inp.alice[i][j], &inp.bob[i][j])));
    let alice_ops: Vec<CMatrix> = match convention {
        Convention::RowColumn => (0..m).map(|i| product(inp.alice[i].iter(), da)).collect(),
        Convention::ColumnRow => (0..n).map(|j| product((0..m).map(|i| &inp.alice[i][j]), da)).collect(),
    };
    let bob_ops: Vec<CMatrix> = match convention {
        Convention::RowColumn => (0..n).map(|j| product((0..m).map(|i| &inp.bob[i][j]), db)).collect(),
        Convention::ColumnRow => (0..m).map(|i| product(inp.bob[i].iter(), db)).collect(),
    };
    let a_vals = exec.map_slice(&alice_ops, |o| inp.state.expectation(&kron(o, &ib)));
    let b_vals = exec.map_slice(&bob_ops, |o| inp.state.expectation(&kron(&ia, o)));
    let max_imaginary = corr.iter().chain(&a_vals).chain(&b_vals).map(|z| z.im.abs()).fold(0.0, f64::max);
    let real = |v: &[crate::linalg::C64]| ordered_sum(&v.iter().map(|z| z.re).collect::<Vec<_>>());
    let (correlations, alice_products, bob_products) = (real(&corr), real(&a_vals), real(&b_vals));
    Ok(InequalityReport {
        convention,
        correlations,
        alice_products,
        bob_products,
        total: correlations + alice_products - bob_products,
        max_imaginary,
    })
}

pub fn inequality_value(inp: &InequalityInput, tol: Tolerance) -> Result<f64> {
    Ok(inequality_report(inp, Convention::RowColumn, tol)?.total)
}
