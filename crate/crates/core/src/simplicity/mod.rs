//! Compositional simplicity and pattern theory.
//!
//! A [`CombinationSystem`] is a finite set of entities together with partial
//! binary combinators: applying operator `i` to a pair `(y, z)` yields one or
//! more output entities at a nonnegative cost. On top of that substrate:
//!
//! * [`CombinationSystem::solve_cosm`] computes the compositional simplicity
//!   assignment — the least fixed point of
//!   `sigma(x) = min(base(x), min over decompositions sigma(y) + sigma(z) + cost)`
//!   — by shortest-hyperpath relaxation.
//! * [`pattern`] measures pattern intensity (normalized simplicity savings of
//!   a decomposition), derives the subpattern relation and its hierarchy, and
//!   checks approximate cost-associativity and the approximate-partial-order
//!   property it induces.
//! * [`dag`] evaluates decision dags whose tests may reference other decision
//!   dags (combinatorial decision dags).
//! * [`bundle`] enumerates decompositions under several cost models at once
//!   and keeps the Pareto frontier of simplicity vectors.

pub mod bundle;
pub mod dag;
pub mod pattern;
mod system;
pub mod thm2;

pub use bundle::{simplicity_bundle, CostModel, SimplicityBundle};
pub use dag::{DagEnv, DagError, DagId, DagNode, DagTest, DecisionDag};
pub use pattern::{
    check_approx_cost_associativity, check_approx_partial_order, pattern_intensity,
    subpattern_hierarchy, subpattern_leq, AssociativityReport, OrderViolation, PatternRecord,
    SubpatternHierarchy,
};
pub use system::{
    parse_system, write_system, CombinationSystem, EntityId, Production, SimplicityAssignment,
    SystemBuilder,
};

use thiserror::Error;

/// Errors raised by combination-system operations.
#[derive(Debug, Error, PartialEq)]
pub enum SimplicityError {
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("entity {0:?} declared twice")]
    DuplicateEntity(String),
    #[error("production ({op}, {left}, {right}) declared with conflicting cost")]
    ConflictingCost { op: usize, left: String, right: String },
    #[error("cost must be finite and >= 0, got {0}")]
    InvalidCost(f64),
    #[error("no entity has a finite base cost")]
    NoFinitePrimitive,
    #[error("operator {op} does not produce {x} from ({y}, {z})")]
    NotAProduction { op: usize, y: String, z: String, x: String },
    #[error("pattern target {0} has zero simplicity")]
    ZeroSimplicity(String),
    #[error("pattern target {0} has infinite simplicity")]
    InfiniteSimplicity(String),
    #[error(
        "operators {i} and {j} are not mutually associative at ({x}, {y}, {z})"
    )]
    NotMutuallyAssociative { i: usize, j: usize, x: String, y: String, z: String },
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
}
