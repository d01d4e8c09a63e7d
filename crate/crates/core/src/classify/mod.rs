//! Constraint extraction, case-splitting solver, normalization moves and the
//! classification scenarios built on them.

pub mod constraints;
pub mod normalize;
pub mod scenario;
pub mod solver;

pub use constraints::{deformation_constraints, extract_constraints, extract_constraints_with};
pub use normalize::{normalize, Move};
pub use scenario::{run_scenario, scenarios, Scenario, ScenarioReport};
pub use solver::{solve, Branch, ConstraintSystem, NonzeroGroup, SolverOptions};
