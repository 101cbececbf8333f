//! Reduced setups known to admit no perfect strategy.

use super::rules::{certify_expression, Certificate, Rule};
use super::scenario::{cell, CellExpression, Family};
use crate::error::Result;
use crate::setup::{IndexRef, Side};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub title: &'static str,
    /// Reconstructed from the index families rather than written out by hand.
    pub reconstructed: bool,
    /// Rules expected in the certificate, outermost first.
    pub expected_rules: Vec<Rule>,
    pub expression: CellExpression,
}

impl CatalogEntry {
    pub fn certify(&self) -> Result<Certificate> {
        certify_expression(&self.expression)
    }
}

fn fams(spec: &[(&str, &[&str])]) -> Vec<Family> {
    spec.iter().map(|(n, a)| Family::new(*n, a)).collect()
}

const TWO: [&str; 2] = ["1", "2"];
const FOUR: [&str; 4] = ["1", "2", "3", "4"];
const LATIN2: [&str; 2] = ["a", "b"];
const LATIN4: [&str; 4] = ["a", "b", "c", "d"];
const GREEK2: [&str; 2] = ["α", "β"];
const GREEK4: [&str; 4] = ["α", "β", "ε", "ζ"];

fn expression(name: &str, rows: Vec<Family>, columns: Vec<Family>, cells: &[(usize, usize, &[(&str, &str)])]) -> CellExpression {
    let cells = cells.iter().map(|(r, c, t)| cell(&rows, &columns, *r, *c, t)).collect();
    CellExpression {
        name: name.to_string(),
        rows,
        columns,
        cells,
    }
}

pub fn minimal() -> CellExpression {
    expression(
        "minimal",
        fams(&[("i", &TWO), ("i'", &LATIN2)]),
        fams(&[("j", &TWO), ("j'", &LATIN2)]),
        &[
            (0, 0, &[("1", "1"), ("2", "2")]),
            (0, 1, &[("1", "a"), ("2", "b")]),
            (1, 0, &[("a", "2"), ("b", "1")]),
            (1, 1, &[("a", "a"), ("b", "b")]),
        ],
    )
}

pub fn three_identity_one_row() -> CellExpression {
    expression(
        "three identities in one row",
        fams(&[("i", &TWO), ("i''", &GREEK2), ("i'", &LATIN2)]),
        fams(&[("j", &FOUR), ("j''", &GREEK4)]),
        &[
            (0, 0, &[("1", "12"), ("2", "34")]),
            (0, 1, &[("1", "αβ"), ("2", "εζ")]),
            (1, 0, &[("α", "24"), ("β", "13")]),
            (1, 1, &[("α", "αε"), ("β", "βζ")]),
            (2, 0, &[("a", "14"), ("b", "23")]),
            (2, 1, &[("a", "αζ"), ("b", "βε")]),
        ],
    )
}

pub fn three_identity_mixed() -> CellExpression {
    expression(
        "three identities across a row and a column",
        fams(&[("i", &TWO), ("i'", &LATIN2), ("i''", &GREEK2)]),
        fams(&[("j", &TWO), ("j'", &LATIN2), ("j''", &GREEK2)]),
        &[
            (0, 0, &[("1", "1"), ("2", "2")]),
            (0, 1, &[("1", "a"), ("2", "b")]),
            (1, 1, &[("a", "b"), ("b", "a")]),
            (1, 2, &[("a", "α"), ("b", "β")]),
            (2, 0, &[("α", "1"), ("β", "2")]),
            (2, 2, &[("α", "α"), ("β", "β")]),
        ],
    )
}

pub fn two_identity() -> CellExpression {
    expression(
        "two identities",
        fams(&[("i", &TWO), ("i'", &LATIN2), ("i''", &GREEK4)]),
        fams(&[("j", &TWO), ("j'", &LATIN4), ("j''", &GREEK2)]),
        &[
            (0, 0, &[("1", "1"), ("2", "2")]),
            (0, 1, &[("1", "ab"), ("2", "cd")]),
            (1, 1, &[("a", "ac"), ("b", "bd")]),
            (1, 2, &[("a", "α"), ("b", "β")]),
            (2, 0, &[("αβ", "1"), ("εζ", "2")]),
            (2, 2, &[("αζ", "α"), ("βε", "β")]),
            (2, 1, &[("αε", "bc"), ("βζ", "ad")]),
        ],
    )
}

pub fn one_identity() -> CellExpression {
    expression(
        "one identity",
        fams(&[("i", &TWO), ("i'", &LATIN4), ("i''", &GREEK4)]),
        fams(&[("j", &TWO), ("j'", &LATIN4), ("j''", &GREEK4)]),
        &[
            (0, 1, &[("1", "ab"), ("2", "cd")]),
            (0, 2, &[("1", "αβ"), ("2", "εζ")]),
            (1, 0, &[("ab", "2"), ("cd", "1")]),
            (2, 0, &[("εζ", "2"), ("αβ", "1")]),
            (1, 1, &[("bd", "ac"), ("ac", "bd")]),
            (1, 2, &[("bc", "αε"), ("ad", "βζ")]),
            (2, 1, &[("βζ", "ad"), ("αε", "bc")]),
            (2, 2, &[("βε", "αζ"), ("αζ", "βε")]),
        ],
    )
}

/// Maximal 3 × 3 setup without the fourth projector of Bob's first column.
pub fn column_slot_reduced() -> Result<CellExpression> {
    CellExpression::from_index_sets(
        "maximal without F4 of column 1",
        3,
        3,
        &[IndexRef {
            side: Side::Bob,
            line: 0,
            slot: 3,
        }],
    )
}

/// Maximal 3 × 3 setup without the fourth projector of Alice's first row.
pub fn row_slot_reduced() -> Result<CellExpression> {
    CellExpression::from_index_sets(
        "maximal without E4 of row 1",
        3,
        3,
        &[IndexRef {
            side: Side::Alice,
            line: 0,
            slot: 3,
        }],
    )
}

pub fn catalog() -> Result<Vec<CatalogEntry>> {
    use Rule::*;
    Ok(vec![
        CatalogEntry {
            key: "minimal",
            title: "two rows, two columns, two projectors each",
            reconstructed: false,
            expected_rules: vec![Elimination],
            expression: minimal(),
        },
        CatalogEntry {
            key: "three-identity-one-row",
            title: "three identity cells in one row",
            reconstructed: false,
            expected_rules: vec![ParityProducts],
            expression: three_identity_one_row(),
        },
        CatalogEntry {
            key: "three-identity-mixed",
            title: "three identity cells spread over rows and columns",
            reconstructed: false,
            expected_rules: vec![Elimination],
            expression: three_identity_mixed(),
        },
        CatalogEntry {
            key: "two-identity",
            title: "two identity cells",
            reconstructed: false,
            expected_rules: vec![AtomSplit, Elimination],
            expression: two_identity(),
        },
        CatalogEntry {
            key: "one-identity",
            title: "one identity cell",
            reconstructed: false,
            expected_rules: vec![AtomSplit, ParityProducts],
            expression: one_identity(),
        },
        CatalogEntry {
            key: "column-slot-reduced",
            title: "maximal setup reduced by one column projector",
            reconstructed: true,
            expected_rules: vec![AtomSplit, ParityProducts],
            expression: column_slot_reduced()?,
        },
        CatalogEntry {
            key: "three-types",
            title: "maximal setup reduced by one row projector",
            reconstructed: true,
            expected_rules: vec![AtomSplit, ParityProducts],
            expression: row_slot_reduced()?,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nogo::rules::certify_scenario;
    use crate::nogo::scenario::CanonicalForm;

    #[test]
    fn every_entry_is_certified_by_its_rules() {
        for entry in catalog().unwrap() {
            let c = entry.certify().unwrap();
            assert!(c.is_contradiction(), "{}", entry.key);
            assert_eq!(c.rules(), entry.expected_rules, "{}", entry.key);
        }
    }

    #[test]
    fn maximal_setups_are_not_certified() {
        for (m, n) in [(3, 3), (2, 4), (3, 4)] {
            let e = CellExpression::from_index_sets("maximal", m, n, &[]).unwrap();
            for form in [CanonicalForm::Row, CanonicalForm::Column] {
                let c = certify_scenario(&e.canonical_form(form).unwrap()).unwrap();
                assert!(!c.is_contradiction(), "{m}x{n} {form}");
            }
        }
    }

    #[test]
    fn expression_documents_round_trip() {
        for entry in catalog().unwrap() {
            let doc = entry.expression.to_doc();
            let json = serde_json::to_string(&doc).unwrap();
            let back = CellExpression::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back, entry.expression);
        }
    }
}
