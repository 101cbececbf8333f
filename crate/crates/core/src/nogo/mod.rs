//! Parity contradictions certifying that a setup has no perfect strategy.

pub mod catalog;
pub mod numeric;
pub mod rules;
pub mod scenario;
pub mod two_by_n;

pub use catalog::{catalog, CatalogEntry};
pub use numeric::{composite, expression_space, hs_space, numeric_hs, realize, sweep, Realization, RealizationMode};
pub use rules::{certify_expression, certify_scenario, Certificate, Rule, Verdict, Witness};
pub use scenario::{CanonicalForm, Cell, CellExpression, CellTerm, Constraint, Family, ParityScenario, Term};
pub use two_by_n::{certify_2xn, scenario_2xn, Coloring, TwoByNReport};
