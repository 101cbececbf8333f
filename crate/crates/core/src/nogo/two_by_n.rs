//! The `2 × n` games: no perfect strategy for odd `n`, a classical one for
//! even `n`.

use serde::Serialize;

use super::rules::{certify_scenario, Certificate, Verdict, Witness};
use super::scenario::{CanonicalForm, CellExpression, ParityScenario};
use crate::error::{Error, Result};
use crate::game::{classical_oracle, GameSpec, Sign};
use crate::setup::{build_index_sets, Side};

/// Column canonical form of the maximal `2 × n` setup. Constraint `j` is
/// column `j`; the families are the two rows, their atoms Alice's answers.
pub fn scenario_2xn(n: usize) -> Result<ParityScenario> {
    if n == 0 {
        return Err(Error::InvalidGame("n must be positive".into()));
    }
    let e = CellExpression::from_index_sets(&format!("2 x {n}"), 2, n, &[])?;
    e.canonical_form(CanonicalForm::Column)
}

/// Green marks, per column `j` and row answer `k`, membership in the term
/// paired with Bob's first answer `(+1, −1)` of that column.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Coloring {
    pub n: usize,
    /// `first[k][j]`: answer `k` of the first row is green in column `j`.
    pub first: Vec<Vec<bool>>,
    pub second: Vec<Vec<bool>>,
}

impl Coloring {
    pub fn new(n: usize) -> Result<Self> {
        let tuples = build_index_sets(n, Side::Alice)?.tuples();
        let paint = |green: Sign| -> Vec<Vec<bool>> {
            tuples.iter().map(|t| t.0.iter().map(|&s| s == green).collect()).collect()
        };
        Ok(Self {
            n,
            first: paint(Sign::Plus),
            second: paint(Sign::Minus),
        })
    }

    fn parities(rows: &[Vec<bool>]) -> Vec<usize> {
        rows.iter().map(|r| r.iter().filter(|&&g| g).count() % 2).collect()
    }

    /// Green-count parity of every answer of the first and second row.
    pub fn green_parities(&self) -> (Vec<usize>, Vec<usize>) {
        (Self::parities(&self.first), Self::parities(&self.second))
    }

    /// Parities are constant within each row and sum to `n mod 2`.
    pub fn invariant_holds(&self) -> bool {
        let (p, q) = self.green_parities();
        let constant = |v: &[usize]| v.windows(2).all(|w| w[0] == w[1]);
        constant(&p) && constant(&q) && p.first().zip(q.first()).is_some_and(|(a, b)| (a + b) % 2 == self.n % 2)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoByNReport {
    pub n: usize,
    pub certificate: Certificate,
    pub coloring: Coloring,
    pub classical_value: Option<f64>,
}

/// Parity certificate for odd `n`; for even `n` a perfect classical table.
pub fn certify_2xn(n: usize) -> Result<TwoByNReport> {
    let s = scenario_2xn(n)?;
    let coloring = Coloring::new(n)?;
    if n % 2 == 1 {
        let mut certificate = certify_scenario(&s)?;
        certificate.form = Some(CanonicalForm::Column);
        return Ok(TwoByNReport {
            n,
            certificate,
            coloring,
            classical_value: None,
        });
    }
    let opt = classical_oracle(&GameSpec::new(2, n)?)?;
    let certificate = Certificate {
        scenario: s.name.clone(),
        form: Some(CanonicalForm::Column),
        verdict: Verdict::NoContradiction,
        rule: None,
        preprocessing: Vec::new(),
        witness: Witness::ClassicalTable {
            alice: opt.alice.iter().map(|t| t.values()).collect(),
            bob: opt.bob.iter().map(|t| t.values()).collect(),
        },
        trace: vec![format!("deterministic table with value {}", opt.value)],
    };
    Ok(TwoByNReport {
        n,
        certificate,
        coloring,
        classical_value: Some(opt.value),
    })
}
