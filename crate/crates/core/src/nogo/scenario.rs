//! Symbolic scenarios: cell expressions and their canonical forms.
//!
//! A cell expression lists, for some cells `(r, c)` of the game, the terms
//! `E_S ⊗ F_T` whose image a perfect state must lie in. Projecting a row's
//! constraints onto each of its `E` atoms gives the row canonical form: a
//! scenario on Bob's space whose families are the columns and whose terms
//! are composite indices `F_{T1|T2|…}` (intersections across columns).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setup::{build_index_sets, IndexRef, Side};
use crate::game::Sign;

pub type AtomSet = BTreeSet<usize>;

/// A set of mutually orthogonal projectors summing to the identity,
/// addressed by atom names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub name: String,
    pub atoms: Vec<String>,
}

impl Family {
    pub fn new(name: impl Into<String>, atoms: &[&str]) -> Self {
        Self {
            name: name.into(),
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn all(&self) -> AtomSet {
        (0..self.atoms.len()).collect()
    }

    fn atom(&self, name: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::MalformedScenario(format!("family {} has no atom {name}", self.name)))
    }

    fn check(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::MalformedScenario(format!("family {} is empty", self.name)));
        }
        let unique: BTreeSet<&String> = self.atoms.iter().collect();
        if unique.len() != self.atoms.len() {
            return Err(Error::MalformedScenario(format!("family {} repeats an atom", self.name)));
        }
        Ok(())
    }
}

/// Composite index: one atom choice per family, read as the intersection
/// of the images of the per-family sums.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub choices: Vec<AtomSet>,
}

impl Term {
    /// Images are orthogonal once some family's choices are disjoint.
    pub fn orthogonal(&self, other: &Term) -> bool {
        self.choices
            .iter()
            .zip(&other.choices)
            .any(|(a, b)| a.is_disjoint(b))
    }

    pub fn is_empty(&self) -> bool {
        self.choices.iter().any(BTreeSet::is_empty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub label: String,
    pub terms: Vec<Term>,
}

/// `H_s = ⋂_r Im(Σ_t F_{composite(r,t)})` over a set of families acting on
/// one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityScenario {
    pub name: String,
    pub families: Vec<Family>,
    pub constraints: Vec<Constraint>,
}

impl ParityScenario {
    /// Checks shapes and that the terms of each constraint are pairwise
    /// orthogonal.
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::MalformedScenario("no families".into()));
        }
        for f in &self.families {
            f.check()?;
        }
        for c in &self.constraints {
            for (k, t) in c.terms.iter().enumerate() {
                if t.choices.len() != self.families.len() {
                    return Err(Error::MalformedScenario(format!(
                        "term {} of {} has {} choices for {} families",
                        k + 1,
                        c.label,
                        t.choices.len(),
                        self.families.len()
                    )));
                }
                for (f, choice) in self.families.iter().zip(&t.choices) {
                    if choice.iter().any(|&a| a >= f.atoms.len()) {
                        return Err(Error::MalformedScenario(format!("atom out of range in family {}", f.name)));
                    }
                }
                for (l, u) in c.terms[..k].iter().enumerate() {
                    if !t.orthogonal(u) {
                        return Err(Error::MalformedScenario(format!(
                            "terms {} and {} of {} are not orthogonal",
                            l + 1,
                            k + 1,
                            c.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Composite label such as `F_{12|ab}` with family order kept; full
    /// families are omitted.
    pub fn term_label(&self, t: &Term) -> String {
        let parts: Vec<String> = self
            .families
            .iter()
            .zip(&t.choices)
            .filter(|(f, c)| c.len() != f.atoms.len())
            .map(|(f, c)| c.iter().map(|&a| f.atoms[a].as_str()).collect::<Vec<_>>().join(""))
            .collect();
        if parts.is_empty() {
            "I".into()
        } else {
            format!("F_{{{}}}", parts.join("|"))
        }
    }

    pub fn constraint_label(&self, c: &Constraint) -> String {
        let terms: Vec<String> = c.terms.iter().map(|t| self.term_label(t)).collect();
        format!("{}: Im({})", c.label, terms.join(" + "))
    }

    /// A joint cell (one atom per family) lying in some term of every
    /// constraint. Such a cell spans a nonzero `H_s` in any realization
    /// where all families commute.
    pub fn joint_cell(&self) -> Option<Vec<usize>> {
        let live: Vec<Vec<&Term>> = self
            .constraints
            .iter()
            .map(|c| c.terms.iter().filter(|t| !t.is_empty()).collect())
            .collect();
        let mut chosen = Vec::with_capacity(self.families.len());
        if self.search_cell(0, &live, &mut chosen) {
            Some(chosen)
        } else {
            None
        }
    }

    fn search_cell(&self, f: usize, live: &[Vec<&Term>], chosen: &mut Vec<usize>) -> bool {
        if f == self.families.len() {
            return true;
        }
        let mut candidates = self.families[f].all();
        for terms in live {
            let union: AtomSet = terms.iter().flat_map(|t| t.choices[f].iter().copied()).collect();
            candidates = candidates.intersection(&union).copied().collect();
            if candidates.is_empty() {
                return false;
            }
        }
        for x in candidates {
            let next: Vec<Vec<&Term>> = live
                .iter()
                .map(|terms| terms.iter().copied().filter(|t| t.choices[f].contains(&x)).collect())
                .collect();
            if next.iter().any(Vec::is_empty) {
                continue;
            }
            chosen.push(x);
            if self.search_cell(f + 1, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    pub fn describe_cell(&self, cell: &[usize]) -> Vec<(String, String)> {
        self.families
            .iter()
            .zip(cell)
            .map(|(f, &a)| (f.name.clone(), f.atoms[a].clone()))
            .collect()
    }
}

impl fmt::Display for ParityScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for c in &self.constraints {
            writeln!(f, "  {}", self.constraint_label(c))?;
        }
        Ok(())
    }
}

/// `E_e ⊗ F_f` with `e` an atom set of the row family, `f` of the column
/// family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTerm {
    pub e: AtomSet,
    pub f: AtomSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<CellTerm>,
}

/// Cell constraints `ψ ∈ ⋂_cells Im(Σ_t E_{e_t} ⊗ F_{f_t})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellExpression {
    pub name: String,
    pub rows: Vec<Family>,
    pub columns: Vec<Family>,
    pub cells: Vec<Cell>,
}

/// Which player's families a canonical form keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalForm {
    /// Projects on Alice's atoms; families are Bob's columns.
    Row,
    /// Projects on Bob's atoms; families are Alice's rows.
    Column,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CanonicalForm::Row => "row canonical form",
            CanonicalForm::Column => "column canonical form",
        })
    }
}

impl CellExpression {
    pub fn validate(&self) -> Result<()> {
        for f in self.rows.iter().chain(&self.columns) {
            f.check()?;
        }
        let mut seen = BTreeSet::new();
        for cell in &self.cells {
            if cell.row >= self.rows.len() || cell.col >= self.columns.len() {
                return Err(Error::MalformedScenario("cell outside the table".into()));
            }
            if !seen.insert((cell.row, cell.col)) {
                return Err(Error::MalformedScenario(format!(
                    "cell ({}, {}) listed twice",
                    self.rows[cell.row].name, self.columns[cell.col].name
                )));
            }
            let (rf, cf) = (&self.rows[cell.row], &self.columns[cell.col]);
            for (k, t) in cell.terms.iter().enumerate() {
                if t.e.iter().any(|&a| a >= rf.atoms.len()) || t.f.iter().any(|&a| a >= cf.atoms.len()) {
                    return Err(Error::MalformedScenario("atom out of range".into()));
                }
                for u in &cell.terms[..k] {
                    if !t.e.is_disjoint(&u.e) || !t.f.is_disjoint(&u.f) {
                        return Err(Error::MalformedScenario(format!(
                            "cell ({}, {}) repeats an atom across terms",
                            rf.name, cf.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Projects each line's constraints onto its own atoms. An atom that no
    /// term of some cell mentions is annihilated by that cell and dropped;
    /// identical composites merge.
    pub fn canonical_form(&self, form: CanonicalForm) -> Result<ParityScenario> {
        self.validate()?;
        let (lines, families) = match form {
            CanonicalForm::Row => (&self.rows, &self.columns),
            CanonicalForm::Column => (&self.columns, &self.rows),
        };
        let mut constraints = Vec::new();
        for (l, line) in lines.iter().enumerate() {
            let cells: Vec<&Cell> = self
                .cells
                .iter()
                .filter(|c| match form {
                    CanonicalForm::Row => c.row == l,
                    CanonicalForm::Column => c.col == l,
                })
                .collect();
            if cells.is_empty() {
                continue;
            }
            let mut terms: BTreeSet<Term> = BTreeSet::new();
            'atoms: for a in 0..line.atoms.len() {
                let mut choices: Vec<AtomSet> = families.iter().map(Family::all).collect();
                for cell in &cells {
                    let fam = match form {
                        CanonicalForm::Row => cell.col,
                        CanonicalForm::Column => cell.row,
                    };
                    let split = |t: &'_ CellTerm| match form {
                        CanonicalForm::Row => (t.e.clone(), t.f.clone()),
                        CanonicalForm::Column => (t.f.clone(), t.e.clone()),
                    };
                    let Some((_, other)) = cell.terms.iter().map(split).find(|(own, _)| own.contains(&a)) else {
                        continue 'atoms;
                    };
                    choices[fam] = choices[fam].intersection(&other).copied().collect();
                }
                terms.insert(Term { choices });
            }
            constraints.push(Constraint {
                label: line.name.clone(),
                terms: terms.into_iter().collect(),
            });
        }
        let s = ParityScenario {
            name: format!("{} ({form})", self.name),
            families: families.clone(),
            constraints,
        };
        s.validate()?;
        Ok(s)
    }

    /// Full `m × n` expression of a setup whose pools follow the index
    /// families, with the `removed` slots eliminated. Atoms are named by
    /// their 1-based ordinals.
    pub fn from_index_sets(name: &str, m: usize, n: usize, removed: &[IndexRef]) -> Result<Self> {
        let row_sets = build_index_sets(n, Side::Alice)?;
        let col_sets = build_index_sets(m, Side::Bob)?;
        let atoms = |size: usize| -> Vec<String> { (1..=size).map(|k| k.to_string()).collect() };
        let rows = (0..m)
            .map(|x| Family {
                name: format!("row {}", x + 1),
                atoms: atoms(row_sets.pool_size()),
            })
            .collect();
        let columns = (0..n)
            .map(|y| Family {
                name: format!("column {}", y + 1),
                atoms: atoms(col_sets.pool_size()),
            })
            .collect();
        let alive = |side: Side, line: usize, set: &BTreeSet<usize>| -> AtomSet {
            set.iter()
                .copied()
                .filter(|&slot| !removed.contains(&IndexRef { side, line, slot }))
                .collect()
        };
        let mut cells = Vec::with_capacity(m * n);
        for x in 0..m {
            for y in 0..n {
                let terms = Sign::BOTH
                    .iter()
                    .map(|&d| CellTerm {
                        e: alive(Side::Alice, x, row_sets.set(d, y)),
                        f: alive(Side::Bob, y, col_sets.set(d, x)),
                    })
                    .filter(|t| !t.e.is_empty() && !t.f.is_empty())
                    .collect();
                cells.push(Cell { row: x, col: y, terms });
            }
        }
        let expr = Self {
            name: name.to_string(),
            rows,
            columns,
            cells,
        };
        expr.validate()?;
        Ok(expr)
    }
}

// JSON documents. Atoms are referred to by name; a family missing from a
// term's choice map is unrestricted.

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub label: String,
    pub terms: Vec<BTreeMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub families: Vec<Family>,
    pub constraints: Vec<ConstraintDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellTermDoc {
    pub e: Vec<String>,
    pub f: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub row: String,
    pub column: String,
    pub terms: Vec<CellTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionDoc {
    pub name: String,
    pub rows: Vec<Family>,
    pub columns: Vec<Family>,
    pub cells: Vec<CellDoc>,
}

fn names(f: &Family, set: &AtomSet) -> Vec<String> {
    set.iter().map(|&a| f.atoms[a].clone()).collect()
}

fn atoms_of(f: &Family, names: &[String]) -> Result<AtomSet> {
    names.iter().map(|n| f.atom(n)).collect()
}

fn family_index(families: &[Family], name: &str) -> Result<usize> {
    families
        .iter()
        .position(|f| f.name == name)
        .ok_or_else(|| Error::MalformedScenario(format!("unknown family {name}")))
}

impl ParityScenario {
    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            name: self.name.clone(),
            families: self.families.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintDoc {
                    label: c.label.clone(),
                    terms: c
                        .terms
                        .iter()
                        .map(|t| {
                            self.families
                                .iter()
                                .zip(&t.choices)
                                .filter(|(f, ch)| ch.len() != f.atoms.len())
                                .map(|(f, ch)| (f.name.clone(), names(f, ch)))
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &ScenarioDoc) -> Result<Self> {
        for f in &doc.families {
            f.check()?;
        }
        let constraints = doc
            .constraints
            .iter()
            .map(|c| {
                let terms = c
                    .terms
                    .iter()
                    .map(|map| {
                        let mut choices: Vec<AtomSet> = doc.families.iter().map(Family::all).collect();
                        for (fam, atoms) in map {
                            let k = family_index(&doc.families, fam)?;
                            choices[k] = atoms_of(&doc.families[k], atoms)?;
                        }
                        Ok(Term { choices })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Constraint {
                    label: c.label.clone(),
                    terms,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Self {
            name: doc.name.clone(),
            families: doc.families.clone(),
            constraints,
        };
        s.validate()?;
        Ok(s)
    }
}

impl CellExpression {
    pub fn to_doc(&self) -> ExpressionDoc {
        ExpressionDoc {
            name: self.name.clone(),
            rows: self.rows.clone(),
            columns: self.columns.clone(),
            cells: self
                .cells
                .iter()
                .map(|c| CellDoc {
                    row: self.rows[c.row].name.clone(),
                    column: self.columns[c.col].name.clone(),
                    terms: c
                        .terms
                        .iter()
                        .map(|t| CellTermDoc {
                            e: names(&self.rows[c.row], &t.e),
                            f: names(&self.columns[c.col], &t.f),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &ExpressionDoc) -> Result<Self> {
        let cells = doc
            .cells
            .iter()
            .map(|c| {
                let row = family_index(&doc.rows, &c.row)?;
                let col = family_index(&doc.columns, &c.column)?;
                let terms = c
                    .terms
                    .iter()
                    .map(|t| {
                        Ok(CellTerm {
                            e: atoms_of(&doc.rows[row], &t.e)?,
                            f: atoms_of(&doc.columns[col], &t.f)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Cell { row, col, terms })
            })
            .collect::<Result<Vec<_>>>()?;
        let e = Self {
            name: doc.name.clone(),
            rows: doc.rows.clone(),
            columns: doc.columns.clone(),
            cells,
        };
        e.validate()?;
        Ok(e)
    }
}

/// Compact builder used by the catalog and tests: terms are written as
/// `("12", "ab")`, one character per atom.
pub fn cell(rows: &[Family], columns: &[Family], row: usize, col: usize, terms: &[(&str, &str)]) -> Cell {
    let pick = |f: &Family, s: &str| -> AtomSet {
        s.chars()
            .map(|ch| {
                f.atoms
                    .iter()
                    .position(|a| a == &ch.to_string())
                    .unwrap_or_else(|| panic!("family {} has no atom {ch}", f.name))
            })
            .collect()
    };
    Cell {
        row,
        col,
        terms: terms
            .iter()
            .map(|(e, f)| CellTerm {
                e: pick(&rows[row], e),
                f: pick(&columns[col], f),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn minimal() -> CellExpression {
        let rows = vec![Family::new("i", &["1", "2"]), Family::new("i'", &["a", "b"])];
        let cols = vec![Family::new("j", &["1", "2"]), Family::new("j'", &["a", "b"])];
        let cells = vec![
            cell(&rows, &cols, 0, 0, &[("1", "1"), ("2", "2")]),
            cell(&rows, &cols, 0, 1, &[("1", "a"), ("2", "b")]),
            cell(&rows, &cols, 1, 0, &[("a", "2"), ("b", "1")]),
            cell(&rows, &cols, 1, 1, &[("a", "a"), ("b", "b")]),
        ];
        CellExpression {
            name: "minimal".into(),
            rows,
            columns: cols,
            cells,
        }
    }

    #[test]
    fn minimal_row_canonical_form() {
        let s = minimal().canonical_form(CanonicalForm::Row).unwrap();
        assert_eq!(s.constraints.len(), 2);
        let labels: Vec<String> = s.constraints.iter().map(|c| s.constraint_label(c)).collect();
        assert_eq!(labels[0], "i: Im(F_{1|a} + F_{2|b})");
        assert_eq!(labels[1], "i': Im(F_{1|b} + F_{2|a})");
        assert!(s.joint_cell().is_none());
    }

    #[test]
    fn joint_cells_match_classical_tables() {
        // A joint cell of the maximal form is a perfect deterministic table.
        let e = CellExpression::from_index_sets("maximal", 3, 3, &[]).unwrap();
        assert_eq!(e.cells.len(), 9);
        let s = e.canonical_form(CanonicalForm::Row).unwrap();
        assert!(s.joint_cell().is_none());
        let e = CellExpression::from_index_sets("maximal", 2, 4, &[]).unwrap();
        let s = e.canonical_form(CanonicalForm::Row).unwrap();
        assert!(s.joint_cell().is_some());
    }

    #[test]
    fn overlapping_terms_are_rejected() {
        let fam = vec![Family::new("f", &["1", "2"])];
        let t = Term {
            choices: vec![[0, 1].into_iter().collect()],
        };
        let s = ParityScenario {
            name: "bad".into(),
            families: fam,
            constraints: vec![Constraint {
                label: "c".into(),
                terms: vec![t.clone(), t],
            }],
        };
        assert!(matches!(s.validate(), Err(Error::MalformedScenario(_))));
    }

    #[test]
    fn docs_round_trip() {
        let e = minimal();
        let back = CellExpression::from_doc(&e.to_doc()).unwrap();
        assert_eq!(back, e);
        let s = e.canonical_form(CanonicalForm::Row).unwrap();
        let back = ParityScenario::from_doc(&s.to_doc()).unwrap();
        assert_eq!(back, s);
    }
}
