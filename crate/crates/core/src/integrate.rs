//! Direct sums of perfect strategies and local rotations.

use crate::error::{Error, Result};
use crate::game::{is_perfect, game_value, GameSpec, OutcomeTuple, PvmElement, Strategy};
use crate::linalg::{identity, is_unitary, unitarity_residual, zeros, CMatrix, CVector, StateVector, Tolerance};
use crate::setup::Side;

#[derive(Clone, Debug)]
pub struct IntegrationInput {
    pub strategy: Strategy,
    pub weight: f64,
}

/// Inputs with block offsets into `C^dim_a ⊗ C^dim_b`. Space outside every
/// block is assigned to one designated outcome per question.
#[derive(Clone, Debug)]
pub struct IntegrationPlan {
    pub inputs: Vec<IntegrationInput>,
    pub offsets_a: Vec<usize>,
    pub offsets_b: Vec<usize>,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl IntegrationPlan {
    /// Blocks placed one after another on both sides.
    pub fn stacked(inputs: Vec<(Strategy, f64)>) -> Self {
        let mut offsets_a = Vec::with_capacity(inputs.len());
        let mut offsets_b = Vec::with_capacity(inputs.len());
        let (mut da, mut db) = (0, 0);
        for (s, _) in &inputs {
            offsets_a.push(da);
            offsets_b.push(db);
            da += s.dim_a();
            db += s.dim_b();
        }
        Self {
            inputs: inputs.into_iter().map(|(strategy, weight)| IntegrationInput { strategy, weight }).collect(),
            offsets_a,
            offsets_b,
            dim_a: da,
            dim_b: db,
        }
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        let k = self.inputs.len();
        if k == 0 {
            return Err(Error::InvalidPlan("no inputs".into()));
        }
        if self.offsets_a.len() != k || self.offsets_b.len() != k {
            return Err(Error::InvalidPlan("one offset per input and side is required".into()));
        }
        if self.inputs.iter().any(|i| !(i.weight > 0.0 && i.weight.is_finite())) {
            return Err(Error::InvalidPlan("weights must be positive".into()));
        }
        let norm: f64 = self.inputs.iter().map(|i| i.weight * i.weight).sum();
        if (norm - 1.0).abs() > tol.eps() {
            return Err(Error::InvalidPlan(format!("squared weights sum to {norm}")));
        }
        let disjoint = |offsets: &[usize], dims: Vec<usize>, total: usize, side: &str| -> Result<()> {
            let mut spans: Vec<(usize, usize)> = offsets.iter().zip(dims).map(|(&o, d)| (o, o + d)).collect();
            spans.sort_unstable();
            if spans.iter().any(|&(_, end)| end > total) {
                return Err(Error::InvalidPlan(format!("{side} block exceeds dimension {total}")));
            }
            if spans.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(Error::InvalidPlan(format!("{side} blocks overlap")));
            }
            Ok(())
        };
        disjoint(&self.offsets_a, self.inputs.iter().map(|i| i.strategy.dim_a()).collect(), self.dim_a, "Alice")?;
        disjoint(&self.offsets_b, self.inputs.iter().map(|i| i.strategy.dim_b()).collect(), self.dim_b, "Bob")
    }
}

fn embed(block: &CMatrix, offset: usize, dim: usize) -> CMatrix {
    let mut out = zeros(dim, dim);
    out.view_mut((offset, offset), block.shape()).copy_from(block);
    out
}

/// Direct sums of each input's PVMs for one side.
fn side_pvms(
    plan: &IntegrationPlan,
    side: Side,
    questions: usize,
    arity: usize,
) -> Vec<Vec<PvmElement>> {
    let (dim, offsets) = match side {
        Side::Alice => (plan.dim_a, &plan.offsets_a),
        Side::Bob => (plan.dim_b, &plan.offsets_b),
    };
    let designated = OutcomeTuple::with_product(arity, side.target_product())
        .into_iter()
        .next()
        .expect("a valid tuple exists");
    let mut covered = zeros(dim, dim);
    for (inp, &o) in plan.inputs.iter().zip(offsets) {
        let d = match side {
            Side::Alice => inp.strategy.dim_a(),
            Side::Bob => inp.strategy.dim_b(),
        };
        covered += embed(&identity(d), o, dim);
    }
    let residual = identity(dim) - covered;
    (0..questions)
        .map(|q| {
            let mut outcomes: Vec<OutcomeTuple> = vec![designated.clone()];
            for inp in &plan.inputs {
                let pvm = match side {
                    Side::Alice => &inp.strategy.alice()[q],
                    Side::Bob => &inp.strategy.bob()[q],
                };
                for el in pvm {
                    if !outcomes.contains(&el.outcome) {
                        outcomes.push(el.outcome.clone());
                    }
                }
            }
            outcomes.sort_by_key(|t| t.values().iter().map(|&v| if v == 1 { 0 } else { 1 }).collect::<Vec<_>>());
            outcomes
                .into_iter()
                .map(|outcome| {
                    let mut p = if outcome == designated { residual.clone() } else { zeros(dim, dim) };
                    for (inp, &o) in plan.inputs.iter().zip(offsets) {
                        let el = match side {
                            Side::Alice => inp.strategy.alice_element(q, &outcome),
                            Side::Bob => inp.strategy.bob_element(q, &outcome),
                        };
                        if let Some(e) = el {
                            p += embed(e, o, dim);
                        }
                    }
                    PvmElement { outcome, projector: p }
                })
                .collect()
        })
        .collect()
}

/// Weighted direct sum of perfect strategies of `g`.
pub fn integrate(g: &GameSpec, plan: &IntegrationPlan, tol: Tolerance) -> Result<Strategy> {
    plan.validate(tol)?;
    for (index, inp) in plan.inputs.iter().enumerate() {
        let s = &inp.strategy;
        if s.m() != g.m() || s.n() != g.n() {
            return Err(Error::GameMismatch);
        }
        if !is_perfect(g, s, tol)? {
            return Err(Error::NotPerfectInput {
                index: index + 1,
                value: game_value(g, s)?,
            });
        }
    }
    let (da, db) = (plan.dim_a, plan.dim_b);
    let mut amps = CVector::zeros(da * db);
    for ((inp, &oa), &ob) in plan.inputs.iter().zip(&plan.offsets_a).zip(&plan.offsets_b) {
        let psi = inp.strategy.state();
        let (ka, kb) = (psi.dim_a(), psi.dim_b());
        for i in 0..ka {
            for j in 0..kb {
                amps[(oa + i) * db + ob + j] = psi.amplitudes()[i * kb + j] * inp.weight;
            }
        }
    }
    let state = StateVector::new(da, db, amps, tol)?;
    let alice = side_pvms(plan, Side::Alice, g.m(), g.n());
    let bob = side_pvms(plan, Side::Bob, g.n(), g.m());
    Strategy::new(g.m(), g.n(), state, alice, bob, tol.scaled(10.0))
}

/// Conjugates every PVM element and rotates the state by `U_A ⊗ U_B`.
pub fn rotate_solution(s: &Strategy, u_a: &CMatrix, u_b: &CMatrix, tol: Tolerance) -> Result<Strategy> {
    for u in [u_a, u_b] {
        if !is_unitary(u, tol) {
            return Err(Error::NotUnitary(unitarity_residual(u)));
        }
    }
    let state = s.state().apply_local(u_a, u_b)?;
    let conj = |pvms: &[Vec<PvmElement>], u: &CMatrix| -> Vec<Vec<PvmElement>> {
        pvms.iter()
            .map(|pvm| {
                pvm.iter()
                    .map(|e| PvmElement {
                        outcome: e.outcome.clone(),
                        projector: u * &e.projector * u.adjoint(),
                    })
                    .collect()
            })
            .collect()
    };
    Strategy::new(s.m(), s.n(), state, conj(s.alice(), u_a), conj(s.bob(), u_b), tol.scaled(10.0))
}
