//! Certification rules for `H_s = {0}`.
//!
//! Every vector `v ∈ H_s` splits, for each constraint `r`, into orthogonal
//! pieces `v = Σ_t p_{r,t}` with `p_{r,t}` in the composite image of term
//! `t`. The rules reason about these pieces.
//!
//! * Elimination: for a family `f` and a union `S` of blocks of a
//!   constraint's `f`-choices, `P^f_S v` equals the sum of that
//!   constraint's pieces inside `S`. Equal vectors built from orthogonal
//!   pieces vanish. Atoms missing from some constraint are zero on `v`.
//! * Parity products: parity operators `Σ_blocks τ P_block` of two
//!   families agree on `H_s`; if their products over several constraints
//!   are `+I` on one family and `−I` on the other, `H_s` is zero.
//! * Atom split: decomposes `v` along the atoms of one family and applies
//!   the first two rules to each part.
//!
//! A scenario with a joint cell (an atom per family lying in a term of every
//! constraint) is never certified: it has nonzero `H_s` once all families
//! commute.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::scenario::{AtomSet, CanonicalForm, CellExpression, ParityScenario, Term};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Contradiction,
    NoContradiction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Elimination,
    ParityProducts,
    AtomSplit,
}

/// One parity operator: blocks of a constraint's terms with their signs.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParityOperator {
    pub constraint: String,
    pub blocks: Vec<SignedBlock>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignedBlock {
    pub sign: i8,
    pub f_atoms: Vec<String>,
    pub g_atoms: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParityWitness {
    pub family_f: String,
    pub family_g: String,
    pub operators: Vec<ParityOperator>,
    /// Product of the `f` parity operators, per atom.
    pub product_f: BTreeMap<String, i8>,
    pub product_g: BTreeMap<String, i8>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EliminationStep {
    pub reason: String,
    pub zeroed: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AtomCase {
    pub atom: String,
    pub certificate: Box<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Witness {
    /// Atom per family of a cell covered by all constraints.
    JointCell { atoms: Vec<(String, String)> },
    /// Deterministic table of a game with perfect classical value.
    ClassicalTable { alice: Vec<Vec<i64>>, bob: Vec<Vec<i64>> },
    Elimination { steps: Vec<EliminationStep>, empty_constraint: String },
    Parity(ParityWitness),
    AtomSplit { family: String, cases: Vec<AtomCase> },
    None,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificate {
    pub scenario: String,
    pub form: Option<CanonicalForm>,
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    /// Elimination steps applied before the deciding rule.
    pub preprocessing: Vec<EliminationStep>,
    pub witness: Witness,
    pub trace: Vec<String>,
}

impl Certificate {
    pub fn is_contradiction(&self) -> bool {
        self.verdict == Verdict::Contradiction
    }

    /// Rules used, outermost first.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out: Vec<Rule> = self.rule.into_iter().collect();
        if let Witness::AtomSplit { cases, .. } = &self.witness {
            let inner: BTreeSet<String> = cases
                .iter()
                .flat_map(|c| c.certificate.rules())
                .map(|r| format!("{r:?}"))
                .collect();
            for r in [Rule::Elimination, Rule::ParityProducts] {
                if inner.contains(&format!("{r:?}")) {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// Live pieces of each constraint; `None` marks a piece shown to be zero.
#[derive(Clone, Debug)]
struct Live<'a> {
    s: &'a ParityScenario,
    terms: Vec<Vec<Option<Term>>>,
}

impl<'a> Live<'a> {
    fn new(s: &'a ParityScenario) -> Self {
        Self {
            s,
            terms: s
                .constraints
                .iter()
                .map(|c| c.terms.iter().map(|t| (!t.is_empty()).then(|| t.clone())).collect())
                .collect(),
        }
    }

    fn live(&self, r: usize) -> impl Iterator<Item = (usize, &Term)> {
        self.terms[r].iter().enumerate().filter_map(|(k, t)| t.as_ref().map(|t| (k, t)))
    }

    fn empty_constraint(&self) -> Option<usize> {
        (0..self.terms.len()).find(|&r| self.live(r).next().is_none())
    }

    fn piece_label(&self, r: usize, k: usize) -> String {
        let c = &self.s.constraints[r];
        format!("{}[{}]", c.label, self.s.term_label(&c.terms[k]))
    }

    /// Atoms of `f` absent from some constraint; `P^f_x v = 0` for these.
    fn zero_atoms(&self, f: usize) -> AtomSet {
        let mut covered = self.s.families[f].all();
        for r in 0..self.terms.len() {
            let union: AtomSet = self.live(r).flat_map(|(_, t)| t.choices[f].iter().copied()).collect();
            covered = covered.intersection(&union).copied().collect();
        }
        self.s.families[f].all().difference(&covered).copied().collect()
    }

    fn kill(&mut self, r: usize, k: usize) -> bool {
        self.terms[r][k].take().is_some()
    }
}

/// Connected components of terms, joined when any listed family's choices
/// overlap.
fn blocks(terms: &[(usize, &Term)], families: &[usize]) -> Vec<Vec<usize>> {
    let n = terms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if families
                .iter()
                .any(|&f| !terms[a].1.choices[f].is_disjoint(&terms[b].1.choices[f]))
            {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..n {
        let root = find(&mut parent, a);
        groups.entry(root).or_default().push(a);
    }
    groups.into_values().collect()
}

const MAX_BLOCKS_FOR_UNIONS: usize = 10;

/// Runs elimination to a fixpoint. Returns the steps taken and, when some
/// constraint lost all its pieces, its index.
fn eliminate(state: &mut Live<'_>) -> (Vec<EliminationStep>, Option<usize>) {
    let mut steps = Vec::new();
    if let Some(r) = state.empty_constraint() {
        steps.push(EliminationStep {
            reason: format!("{} has no nonzero term", state.s.constraints[r].label),
            zeroed: Vec::new(),
        });
        return (steps, Some(r));
    }
    let nf = state.s.families.len();
    loop {
        let mut progress = false;

        // Zero atoms can be dropped from the only term that mentions them.
        for f in 0..nf {
            let zero = state.zero_atoms(f);
            if zero.is_empty() {
                continue;
            }
            for r in 0..state.terms.len() {
                for &x in &zero {
                    let holders: Vec<usize> = state
                        .live(r)
                        .filter(|(_, t)| t.choices[f].contains(&x))
                        .map(|(k, _)| k)
                        .collect();
                    if let [k] = holders[..] {
                        let t = state.terms[r][k].as_mut().expect("live");
                        t.choices[f].remove(&x);
                        let dead = t.choices[f].is_empty();
                        let mut zeroed = Vec::new();
                        if dead {
                            state.kill(r, k);
                            zeroed.push(state.piece_label(r, k));
                        }
                        steps.push(EliminationStep {
                            reason: format!(
                                "atom {} of {} vanishes on H_s; removed from {}",
                                state.s.families[f].atoms[x],
                                state.s.families[f].name,
                                state.piece_label(r, k)
                            ),
                            zeroed,
                        });
                        progress = true;
                    }
                }
            }
        }
        if let Some(r) = state.empty_constraint() {
            return (steps, Some(r));
        }

        // Members: (constraint, live term set) representing P^f_S v.
        let mut member_ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut members: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut keyed: BTreeMap<(usize, AtomSet), Vec<usize>> = BTreeMap::new();
        for f in 0..nf {
            let zero = state.zero_atoms(f);
            for r in 0..state.terms.len() {
                let live: Vec<(usize, &Term)> = state.live(r).collect();
                let bl = blocks(&live, &[f]);
                if bl.len() > MAX_BLOCKS_FOR_UNIONS {
                    continue;
                }
                for mask in 1u32..(1 << bl.len()) {
                    let mut ids: Vec<usize> = Vec::new();
                    let mut atoms = AtomSet::new();
                    for (b, block) in bl.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            for &i in block {
                                ids.push(live[i].0);
                                atoms.extend(live[i].1.choices[f].iter().copied());
                            }
                        }
                    }
                    ids.sort_unstable();
                    let key: AtomSet = atoms.difference(&zero).copied().collect();
                    let id = *member_ids.entry((r, ids.clone())).or_insert_with(|| {
                        members.push((r, ids));
                        members.len() - 1
                    });
                    keyed.entry((f, key)).or_default().push(id);
                }
            }
        }
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut zero_members: BTreeSet<usize> = BTreeSet::new();
        for ((_, key), ids) in &keyed {
            if key.is_empty() {
                zero_members.extend(ids.iter().copied());
            }
            for w in ids.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for id in 0..members.len() {
            let root = find(&mut parent, id);
            classes.entry(root).or_default().push(id);
        }

        let mut deaths: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for ids in classes.values() {
            let label = |id: usize| -> String {
                let (r, ts) = &members[id];
                ts.iter().map(|&k| state.piece_label(*r, k)).collect::<Vec<_>>().join(" + ")
            };
            if ids.iter().any(|id| zero_members.contains(id)) {
                for &id in ids {
                    let (r, ts) = &members[id];
                    for &k in ts {
                        deaths
                            .entry((*r, k))
                            .or_insert_with(|| format!("{} equals a projection onto vanishing atoms", label(id)));
                    }
                }
                continue;
            }
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let (ra, ta) = &members[a];
                    let (rb, tb) = &members[b];
                    if ra == rb {
                        let sa: BTreeSet<usize> = ta.iter().copied().collect();
                        let sb: BTreeSet<usize> = tb.iter().copied().collect();
                        for &k in sa.symmetric_difference(&sb) {
                            deaths.entry((*ra, k)).or_insert_with(|| {
                                format!("{} = {} within one constraint", label(a), label(b))
                            });
                        }
                    } else {
                        let orth = ta.iter().all(|&x| {
                            let tx = state.terms[*ra][x].as_ref().expect("live");
                            tb.iter().all(|&y| tx.orthogonal(state.terms[*rb][y].as_ref().expect("live")))
                        });
                        if orth {
                            let why = format!("{} = {} but they are orthogonal", label(a), label(b));
                            for &k in ta {
                                deaths.entry((*ra, k)).or_insert_with(|| why.clone());
                            }
                            for &k in tb {
                                deaths.entry((*rb, k)).or_insert_with(|| why.clone());
                            }
                        }
                    }
                }
            }
        }
        let mut by_reason: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for ((r, k), why) in deaths {
            let lbl = state.piece_label(r, k);
            if state.kill(r, k) {
                by_reason.entry(why).or_default().push(lbl);
                progress = true;
            }
        }
        for (reason, zeroed) in by_reason {
            steps.push(EliminationStep { reason, zeroed });
        }
        if let Some(r) = state.empty_constraint() {
            return (steps, Some(r));
        }
        if !progress {
            return (steps, None);
        }
    }
}

const MAX_SUBSET_CONSTRAINTS: usize = 12;
const MAX_SIGN_VARIABLES: usize = 128;

/// Searches constraint subsets, family pairs and block signs for parity
/// products that are constant but opposite on the two families.
fn parity_products(state: &Live<'_>) -> Option<ParityWitness> {
    let nc = state.terms.len();
    let nf = state.s.families.len();
    let mut subsets: Vec<Vec<usize>> = if nc <= MAX_SUBSET_CONSTRAINTS {
        (0u32..1 << nc)
            .filter(|m| m.count_ones() >= 1)
            .map(|m| (0..nc).filter(|&r| m >> r & 1 == 1).collect())
            .collect()
    } else {
        vec![(0..nc).collect()]
    };
    subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    for f in 0..nf {
        for g in f + 1..nf {
            for subset in &subsets {
                if let Some(w) = parity_on(state, subset, f, g) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Solves for block signs over GF(2): writing `τ = (−1)^t` and fixing the
/// first block of every constraint to `+1`, asks for `Σ_r t_{r,block(x)}`
/// equal to `s` on every covered `f` atom and to `s + 1` on every covered `g`
/// atom.
fn parity_on(state: &Live<'_>, subset: &[usize], f: usize, g: usize) -> Option<ParityWitness> {
    let nf_atoms = state.s.families[f].atoms.len();
    let ng_atoms = state.s.families[g].atoms.len();
    // Per constraint: live terms, blocks, and atom -> block maps for f and g.
    let mut per_constraint = Vec::with_capacity(subset.len());
    let mut nvars = 1usize;
    for &r in subset {
        let live: Vec<(usize, &Term)> = state.live(r).collect();
        let bl = blocks(&live, &[f, g]);
        if bl.len() < 2 {
            return None;
        }
        let mut map_f = vec![None; nf_atoms];
        let mut map_g = vec![None; ng_atoms];
        for (b, block) in bl.iter().enumerate() {
            for &i in block {
                for &x in &live[i].1.choices[f] {
                    map_f[x] = Some(b);
                }
                for &y in &live[i].1.choices[g] {
                    map_g[y] = Some(b);
                }
            }
        }
        let offset = nvars;
        nvars += bl.len() - 1;
        per_constraint.push((r, live, bl, map_f, map_g, offset));
    }
    if nvars > MAX_SIGN_VARIABLES {
        return None;
    }
    let var = |b: usize, offset: usize| -> Option<usize> { (b > 0).then(|| offset + b - 1) };
    let cov_f: Vec<usize> = (0..nf_atoms).filter(|&x| per_constraint.iter().all(|pc| pc.3[x].is_some())).collect();
    let cov_g: Vec<usize> = (0..ng_atoms).filter(|&y| per_constraint.iter().all(|pc| pc.4[y].is_some())).collect();
    if cov_f.is_empty() || cov_g.is_empty() {
        return None;
    }
    // Rows: variable bits plus a right-hand side; variable 0 is `s`.
    let mut rows: Vec<(u128, bool)> = Vec::with_capacity(cov_f.len() + cov_g.len());
    for (atoms, rhs, is_f) in [(&cov_f, false, true), (&cov_g, true, false)] {
        for &x in atoms {
            let mut mask = 1u128;
            for pc in &per_constraint {
                let b = if is_f { pc.3[x] } else { pc.4[x] }.expect("covered");
                if let Some(v) = var(b, pc.5) {
                    mask ^= 1 << v;
                }
            }
            rows.push((mask, rhs));
        }
    }
    let solution = solve_gf2(rows, nvars)?;
    let signs: Vec<Vec<i8>> = per_constraint
        .iter()
        .map(|pc| {
            (0..pc.2.len())
                .map(|b| match var(b, pc.5) {
                    Some(v) if solution >> v & 1 == 1 => -1,
                    _ => 1,
                })
                .collect()
        })
        .collect();
    let product = |atoms: &[usize], is_f: bool| -> BTreeMap<usize, i8> {
        atoms
            .iter()
            .map(|&x| {
                let p = per_constraint
                    .iter()
                    .zip(&signs)
                    .map(|(pc, s)| s[if is_f { pc.3[x] } else { pc.4[x] }.expect("covered")])
                    .product();
                (x, p)
            })
            .collect()
    };
    let pf = product(&cov_f, true);
    let pg = product(&cov_g, false);
    let fam_f = &state.s.families[f];
    let fam_g = &state.s.families[g];
    let names = |fam: &super::scenario::Family, live: &[(usize, &Term)], block: &[usize], k: usize| -> Vec<String> {
        let set: AtomSet = block.iter().flat_map(|&i| live[i].1.choices[k].iter().copied()).collect();
        set.iter().map(|&a| fam.atoms[a].clone()).collect()
    };
    let operators = per_constraint
        .iter()
        .zip(&signs)
        .map(|(pc, s)| ParityOperator {
            constraint: state.s.constraints[pc.0].label.clone(),
            blocks: pc
                .2
                .iter()
                .zip(s)
                .map(|(block, &sign)| SignedBlock {
                    sign,
                    f_atoms: names(fam_f, &pc.1, block, f),
                    g_atoms: names(fam_g, &pc.1, block, g),
                })
                .collect(),
        })
        .collect();
    Some(ParityWitness {
        family_f: fam_f.name.clone(),
        family_g: fam_g.name.clone(),
        operators,
        product_f: pf.into_iter().map(|(x, v)| (fam_f.atoms[x].clone(), v)).collect(),
        product_g: pg.into_iter().map(|(x, v)| (fam_g.atoms[x].clone(), v)).collect(),
    })
}

/// Gaussian elimination over GF(2); free variables are set to zero.
fn solve_gf2(mut rows: Vec<(u128, bool)>, nvars: usize) -> Option<u128> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for v in 0..nvars {
        let Some(p) = (next..rows.len()).find(|&i| rows[i].0 >> v & 1 == 1) else {
            continue;
        };
        rows.swap(next, p);
        let pivot = rows[next];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row.0 >> v & 1 == 1 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        pivots.push((next, v));
        next += 1;
    }
    if rows[next..].iter().any(|&(m, rhs)| m == 0 && rhs) {
        return None;
    }
    let mut x = 0u128;
    for &(i, v) in &pivots {
        if rows[i].1 {
            x |= 1 << v;
        }
    }
    Some(x)
}

/// Splits along family `f` when every nonvanishing atom occurs alone in
/// some term; each part keeps the terms containing its atom.
fn atom_split_family(state: &Live<'_>, f: usize) -> Option<(String, Vec<AtomCase>)> {
    let family = &state.s.families[f];
    let zero = state.zero_atoms(f);
    let atoms: Vec<usize> = family.all().difference(&zero).copied().collect();
    if atoms.is_empty() {
        return None;
    }
    let singleton = |x: usize| {
        (0..state.terms.len()).any(|r| state.live(r).any(|(_, t)| t.choices[f].len() == 1 && t.choices[f].contains(&x)))
    };
    if !atoms.iter().all(|&x| singleton(x)) {
        return None;
    }
    let mut cases = Vec::with_capacity(atoms.len());
    for &x in &atoms {
        let mut part = state.s.clone();
        part.name = format!("{} on atom {} of {}", state.s.name, family.atoms[x], family.name);
        for (r, c) in part.constraints.iter_mut().enumerate() {
            c.terms = state
                .live(r)
                .filter(|(_, t)| t.choices[f].contains(&x))
                .map(|(_, t)| {
                    let mut t = t.clone();
                    t.choices[f] = [x].into_iter().collect();
                    t
                })
                .collect();
        }
        let cert = certify_without_split(&part);
        if !cert.is_contradiction() {
            return None;
        }
        cases.push(AtomCase {
            atom: family.atoms[x].clone(),
            certificate: Box::new(cert),
        });
    }
    Some((family.name.clone(), cases))
}

fn no_contradiction(s: &ParityScenario, preprocessing: Vec<EliminationStep>, witness: Witness, why: &str) -> Certificate {
    Certificate {
        scenario: s.name.clone(),
        form: None,
        verdict: Verdict::NoContradiction,
        rule: None,
        preprocessing,
        witness,
        trace: vec![why.to_string()],
    }
}

fn run(s: &ParityScenario, allow_split: bool) -> Certificate {
    if let Some(cell) = s.joint_cell() {
        return no_contradiction(
            s,
            Vec::new(),
            Witness::JointCell {
                atoms: s.describe_cell(&cell),
            },
            "a joint cell is covered by every constraint",
        );
    }
    let mut state = Live::new(s);
    let (steps, empty) = eliminate(&mut state);
    if let Some(r) = empty {
        let mut trace: Vec<String> = steps.iter().map(|st| st.reason.clone()).collect();
        trace.push(format!("every piece of {} vanishes, so v = 0", s.constraints[r].label));
        return Certificate {
            scenario: s.name.clone(),
            form: None,
            verdict: Verdict::Contradiction,
            rule: Some(Rule::Elimination),
            preprocessing: Vec::new(),
            witness: Witness::Elimination {
                steps,
                empty_constraint: s.constraints[r].label.clone(),
            },
            trace,
        };
    }
    if let Some(w) = parity_products(&state) {
        let mut trace: Vec<String> = steps.iter().map(|st| st.reason.clone()).collect();
        for op in &w.operators {
            let blocks: Vec<String> = op
                .blocks
                .iter()
                .map(|b| format!("{:+}·P[{}|{}]", b.sign, b.f_atoms.join(""), b.g_atoms.join("")))
                .collect();
            trace.push(format!("parity of {}: {}", op.constraint, blocks.join(" ")));
        }
        let sf = *w.product_f.values().next().expect("nonempty");
        let sg = *w.product_g.values().next().expect("nonempty");
        trace.push(format!(
            "product over {} is {:+}·I, over {} is {:+}·I, but both parities agree on H_s",
            w.family_f, sf, w.family_g, sg
        ));
        return Certificate {
            scenario: s.name.clone(),
            form: None,
            verdict: Verdict::Contradiction,
            rule: Some(Rule::ParityProducts),
            preprocessing: steps,
            witness: Witness::Parity(w),
            trace,
        };
    }
    if allow_split {
        if let Some((family, cases)) = (0..s.families.len()).find_map(|f| atom_split_family(&state, f)) {
            let mut trace: Vec<String> = steps.iter().map(|st| st.reason.clone()).collect();
            trace.push(format!("split v along the atoms of {family}"));
            for c in &cases {
                trace.push(format!("atom {}: {}", c.atom, c.certificate.trace.last().cloned().unwrap_or_default()));
            }
            return Certificate {
                scenario: s.name.clone(),
                form: None,
                verdict: Verdict::Contradiction,
                rule: Some(Rule::AtomSplit),
                preprocessing: steps,
                witness: Witness::AtomSplit { family, cases },
                trace,
            };
        }
    }
    no_contradiction(s, steps, Witness::None, "no rule applies")
}

fn certify_without_split(s: &ParityScenario) -> Certificate {
    run(s, false)
}

/// Certifies `H_s = {0}` or reports that no rule applies.
pub fn certify_scenario(s: &ParityScenario) -> Result<Certificate> {
    s.validate()?;
    Ok(run(s, true))
}

/// Certifies a cell expression through its row form, then its column form.
pub fn certify_expression(e: &CellExpression) -> Result<Certificate> {
    let mut first = None;
    for form in [CanonicalForm::Row, CanonicalForm::Column] {
        let mut c = certify_scenario(&e.canonical_form(form)?)?;
        c.form = Some(form);
        if c.is_contradiction() {
            return Ok(c);
        }
        first.get_or_insert(c);
    }
    Ok(first.expect("two forms tried"))
}
