//! Versioned JSON documents for strategies, setups, scenarios and
//! expressions. Rows, columns and slots are 1-based; complex matrices are
//! flat row-major lists of `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameSpec, OutcomeTuple, PvmElement, Sign, Strategy};
use crate::linalg::{c, CMatrix, CVector, StateVector, Tolerance};
use crate::nogo::scenario::{ExpressionDoc, ScenarioDoc};
use crate::nogo::{CellExpression, ParityScenario};
use crate::setup::{IndexRef, OperatorSetup, Side};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Schema(format!("unsupported schemaVersion {v}")))
    }
}

pub fn encode_vector(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn decode_vector(v: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&[r, i]| c(r, i)))
}

pub fn encode_matrix(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn decode_matrix(entries: &[[f64; 2]], dim: usize) -> Result<CMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::Schema(format!("expected {} matrix entries, found {}", dim * dim, entries.len())));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let [r, im] = entries[i * dim + j];
        c(r, im)
    }))
}

fn decode_tuple(values: &[i64]) -> Result<OutcomeTuple> {
    OutcomeTuple::from_values(values)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliceElementDoc {
    pub row: usize,
    pub outcome: Vec<i64>,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BobElementDoc {
    pub column: usize,
    pub outcome: Vec<i64>,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StrategyDoc {
    pub schema_version: u32,
    pub m: usize,
    pub n: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: Vec<[f64; 2]>,
    #[serde(rename = "alicePVM")]
    pub alice_pvm: Vec<AliceElementDoc>,
    #[serde(rename = "bobPVM")]
    pub bob_pvm: Vec<BobElementDoc>,
}

impl StrategyDoc {
    pub fn from_strategy(s: &Strategy) -> Self {
        let alice_pvm = s
            .alice()
            .iter()
            .enumerate()
            .flat_map(|(x, pvm)| {
                pvm.iter().map(move |e| AliceElementDoc {
                    row: x + 1,
                    outcome: e.outcome.values(),
                    matrix: encode_matrix(&e.projector),
                })
            })
            .collect();
        let bob_pvm = s
            .bob()
            .iter()
            .enumerate()
            .flat_map(|(y, pvm)| {
                pvm.iter().map(move |e| BobElementDoc {
                    column: y + 1,
                    outcome: e.outcome.values(),
                    matrix: encode_matrix(&e.projector),
                })
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            m: s.m(),
            n: s.n(),
            dim_a: s.dim_a(),
            dim_b: s.dim_b(),
            state: encode_vector(s.state().amplitudes()),
            alice_pvm,
            bob_pvm,
        }
    }

    pub fn to_strategy(&self, tol: Tolerance) -> Result<Strategy> {
        check_version(self.schema_version)?;
        let state = StateVector::new(self.dim_a, self.dim_b, decode_vector(&self.state), tol)?;
        let mut alice: Vec<Vec<PvmElement>> = vec![Vec::new(); self.m];
        for e in &self.alice_pvm {
            let slot = e
                .row
                .checked_sub(1)
                .and_then(|x| alice.get_mut(x))
                .ok_or_else(|| Error::Schema(format!("row {} out of range", e.row)))?;
            slot.push(PvmElement {
                outcome: decode_tuple(&e.outcome)?,
                projector: decode_matrix(&e.matrix, self.dim_a)?,
            });
        }
        let mut bob: Vec<Vec<PvmElement>> = vec![Vec::new(); self.n];
        for e in &self.bob_pvm {
            let slot = e
                .column
                .checked_sub(1)
                .and_then(|y| bob.get_mut(y))
                .ok_or_else(|| Error::Schema(format!("column {} out of range", e.column)))?;
            slot.push(PvmElement {
                outcome: decode_tuple(&e.outcome)?,
                projector: decode_matrix(&e.matrix, self.dim_b)?,
            });
        }
        Strategy::new(self.m, self.n, state, alice, bob, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedSetsDoc {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub side: String,
    pub line: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SetupDoc {
    pub schema_version: u32,
    pub m: usize,
    pub n: usize,
    /// `[dimA, dimB]`.
    pub dims: [usize; 2],
    /// Per row, the projectors of Alice's pool in slot order.
    pub row_pools: Vec<Vec<Vec<[f64; 2]>>>,
    pub col_pools: Vec<Vec<Vec<[f64; 2]>>>,
    /// Per position, the 1-based slots of each sign. Checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_index_sets: Option<Vec<SignedSetsDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_index_sets: Option<Vec<SignedSetsDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<Vec<SlotDoc>>,
}

fn sets_doc(setup: &OperatorSetup, side: Side) -> Vec<SignedSetsDoc> {
    let fam = setup.family(side);
    (0..fam.arity())
        .map(|j| SignedSetsDoc {
            plus: fam.ordinals(Sign::Plus, j),
            minus: fam.ordinals(Sign::Minus, j),
        })
        .collect()
}

fn slot_doc(r: &IndexRef) -> SlotDoc {
    SlotDoc {
        side: match r.side {
            Side::Alice => "alice".into(),
            Side::Bob => "bob".into(),
        },
        line: r.line + 1,
        slot: r.slot + 1,
    }
}

impl SetupDoc {
    pub fn from_setup(s: &OperatorSetup) -> Self {
        let (da, db) = (s.dim_a(), s.dim_b());
        let pools = |side: Side, lines: usize| -> Vec<Vec<Vec<[f64; 2]>>> {
            (0..lines).map(|l| s.pool(side, l).iter().map(encode_matrix).collect()).collect()
        };
        Self {
            schema_version: SCHEMA_VERSION,
            m: s.game().m(),
            n: s.game().n(),
            dims: [da, db],
            row_pools: pools(Side::Alice, s.game().m()),
            col_pools: pools(Side::Bob, s.game().n()),
            row_index_sets: Some(sets_doc(s, Side::Alice)),
            col_index_sets: Some(sets_doc(s, Side::Bob)),
            reduced: Some(s.reduced().iter().map(slot_doc).collect()),
        }
    }

    pub fn to_setup(&self, tol: Tolerance) -> Result<OperatorSetup> {
        check_version(self.schema_version)?;
        let game = GameSpec::new(self.m, self.n)?;
        let [da, db] = self.dims;
        let decode = |pools: &[Vec<Vec<[f64; 2]>>], dim: usize| -> Result<Vec<Vec<CMatrix>>> {
            pools
                .iter()
                .map(|pool| pool.iter().map(|m| decode_matrix(m, dim)).collect())
                .collect()
        };
        let setup = OperatorSetup::realize(&game, da, db, decode(&self.row_pools, da)?, decode(&self.col_pools, db)?, tol)?;
        if let Some(sets) = &self.row_index_sets {
            if *sets != sets_doc(&setup, Side::Alice) {
                return Err(Error::Schema("rowIndexSets disagree with the index recursion".into()));
            }
        }
        if let Some(sets) = &self.col_index_sets {
            if *sets != sets_doc(&setup, Side::Bob) {
                return Err(Error::Schema("colIndexSets disagree with the index recursion".into()));
            }
        }
        if let Some(reduced) = &self.reduced {
            let actual: Vec<SlotDoc> = setup.reduced().iter().map(slot_doc).collect();
            if *reduced != actual {
                return Err(Error::Schema("reduced slots disagree with the zero projectors".into()));
            }
        }
        Ok(setup)
    }
}

/// A scenario file holds either a parity scenario or a cell expression.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<ExpressionDoc>,
}

pub enum ScenarioInput {
    Scenario(ParityScenario),
    Expression(CellExpression),
}

impl ScenarioFile {
    pub fn from_scenario(s: &ParityScenario) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: Some(s.to_doc()),
            expression: None,
        }
    }

    pub fn from_expression(e: &CellExpression) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: None,
            expression: Some(e.to_doc()),
        }
    }

    pub fn decode(&self) -> Result<ScenarioInput> {
        check_version(self.schema_version)?;
        match (&self.scenario, &self.expression) {
            (Some(s), None) => Ok(ScenarioInput::Scenario(ParityScenario::from_doc(s)?)),
            (None, Some(e)) => Ok(ScenarioInput::Expression(CellExpression::from_doc(e)?)),
            _ => Err(Error::Schema("exactly one of scenario and expression is required".into())),
        }
    }
}

pub fn parse_strategy(json: &str, tol: Tolerance) -> Result<Strategy> {
    serde_json::from_str::<StrategyDoc>(json)?.to_strategy(tol)
}

pub fn parse_setup(json: &str, tol: Tolerance) -> Result<OperatorSetup> {
    serde_json::from_str::<SetupDoc>(json)?.to_setup(tol)
}

pub fn parse_scenario(json: &str) -> Result<ScenarioInput> {
    serde_json::from_str::<ScenarioFile>(json)?.decode()
}
