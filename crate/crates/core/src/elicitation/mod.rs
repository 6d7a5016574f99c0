//! Preference elicitation: rankings plus intensity-of-preference labels turn
//! into utility functions and 2-additive Choquet capacities.
//!
//! Both phases share one rule ([`derive_value_scale`]): cumulative intensity
//! along the ranking, rescaled so the Bad reference maps to 0 and the Good
//! reference to 1.

mod capacity;
mod consistency;
mod intensity;
mod scale;
mod utility_session;

pub use capacity::{closed_form_two_children, derive_capacity, pattern, pattern_value, CapacitySession, Pattern, FEASIBILITY_EPSILON};
pub use consistency::{check_consistency, Session, Violation, ViolationKind};
pub use intensity::{Gap, IntensityLabel};
pub use scale::{derive_value_scale, value_scale_from_intensities};
pub use utility_session::{derive_utility_function, UtilitySession};

use thiserror::Error;

use crate::mcda::McdaError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElicitationError {
    #[error("the zero and one anchors coincide")]
    AnchorsCoincide,
    #[error("anchor {0} does not appear among the ranked elements")]
    AnchorNotFound(String),
    #[error("the one-anchor must be ranked above the zero-anchor")]
    AnchorOrder,
    #[error("total intensity between the anchors is zero")]
    ZeroIntensity,
    #[error("expected {expected} gaps between {elements} ranked elements, found {found}")]
    GapCount { elements: usize, expected: usize, found: usize },
    #[error("metric `{0}`: stated preference order is neither increasing nor decreasing in the metric")]
    NotMonotone(String),
    #[error("session is malformed: {}", summarize(.0))]
    InvalidSession(Vec<Violation>),
    #[error("answers are inconsistent with any 2-additive capacity: {}", summarize(.0))]
    Inconsistent(Vec<Violation>),
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Model(#[from] McdaError),
}

fn summarize(v: &[Violation]) -> String {
    v.iter().map(|x| x.message.as_str()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = ElicitationError> = std::result::Result<T, E>;
