//! Demand/supply matchmaking with knowledge elicitation.
//!
//! Every supply gets three counters: weighted conflicts (`n_par`), unmet but
//! uncontradicted requirements (`n_pot`) and properties the demand left
//! unspecified (`n_add`). Each counter is normalized by its batch maximum and
//! the three are averaged into a single rank in `[0, 1]`, 0 being a perfect
//! and maximally informative match.

mod cache;
mod constraint;
mod demand;
mod score;

pub use cache::{cache_stats, intersection_by_difference, CacheStats, ComparisonCache};
pub use constraint::{satisfies, Confidence, Constraint, ConstraintOp, ConstraintValue};
pub use demand::{Demand, DemandViolation};
pub use score::{
    match_all, match_all_with, match_one, normalize, rank_order, sort_scores, MatchScore, RankComposition, RawMatch,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("confidence {0} outside 1..=10")]
    InvalidConfidence(u8),
    #[error("property `{property}`: cannot compare {left} value with {right} operand")]
    Incomparable { property: String, left: &'static str, right: &'static str },
    #[error("property `{property}`: operator `{op}` has the wrong operand shape")]
    OperandShape { property: String, op: ConstraintOp },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid demand: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidDemand(Vec<DemandViolation>),
}
