//! Exact Z2 connection-matrix machinery.

mod connection;
mod decomposition;
mod graded_map;
mod index;
mod poset;
mod render;
mod scenario;
mod transition;
mod z2;

use thiserror::Error;

pub use connection::{
    enumerate_connection_matrices, homology_of_interval, mod2_connection_count, validate_connection_matrix,
    ConnectionReport, IntervalHomology, Violation, ENUMERATION_DIMENSION_LIMIT, EXHAUSTIVE_INTERVAL_LIMIT,
};
pub use decomposition::{Generator, MorseDecomposition, MorseSet};
pub use graded_map::GradedMap;
pub use index::{GradedIndex, MAX_DEGREE};
pub use poset::{ElementSet, Poset};
pub use render::MatrixView;
pub use scenario::{Scenario, ScenarioParseError};
pub use transition::{
    infer_bifurcation, solve_transition_matrices, BlockConstraint, Certificate, ConstraintEntry, EntryStatus,
    ThetaWindow, TransitionConstraint, TransitionEntry, TransitionSolution,
};
pub use z2::{Z2Matrix, Z2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("{0} is not an interval")]
    NotInterval(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("{which} connection matrix is invalid: {}", violations.join("; "))]
    InvalidConnection { which: String, violations: Vec<String> },
    #[error("no transition matrix exists")]
    NoTransitionMatrix,
}
