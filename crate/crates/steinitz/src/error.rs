//! Crate-wide error type.
//!
//! Geometric failures that carry a certificate (a separating direction, a
//! recession ray) embed the witness in the variant so callers can report it.

use thiserror::Error;

use crate::geom::Vector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("linear system is singular (pivot below threshold)")]
    SingularSystem,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("halfspace system is unbounded along a feasible ray")]
    Unbounded { ray: Vector },

    #[error("subset enumeration too large: {subsets:.3e} d-subsets exceed budget {budget}")]
    DimensionTooLarge { subsets: f64, budget: u64 },

    #[error("polarity center is not strictly interior to the halfspace")]
    CenterNotInterior,

    #[error("point is not strictly feasible for the halfspace system")]
    InfeasiblePoint,

    #[error("polytope is unbounded; the log objective has no maximizer")]
    UnboundedPolytope,

    #[error("point cloud does not span the ambient space")]
    DegenerateCloud,

    #[error("target point lies outside the convex hull")]
    TargetNotInHull { witness: Vector },

    #[error("convex hull does not contain the ball of radius {required} (support {support:.6e} along witness)")]
    BallNotContained {
        direction: Vector,
        support: f64,
        required: f64,
    },

    #[error("too few points after pruning: {points} points in dimension {dim}")]
    TooFewPoints { points: usize, dim: usize },

    #[error("containment check of the locally maximal simplex failed (point {point_index}, margin {margin:.3e})")]
    InclusionViolated { point_index: usize, margin: f64 },

    #[error("exhaustive search budget exceeded: {subsets:.3e} subsets > {budget}")]
    BudgetExceeded { subsets: f64, budget: u64 },

    #[error("instance generation failed after {attempts} attempts")]
    RetryExhausted { attempts: u32 },

    #[error("internal verification failed [{check}]: {detail}")]
    VerificationFailed { check: String, detail: String },
}

impl Error {
    /// Stable machine-readable tag for result records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularSystem => "singular_system",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::Unbounded { .. } => "unbounded",
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::CenterNotInterior => "center_not_interior",
            Error::InfeasiblePoint => "infeasible_point",
            Error::UnboundedPolytope => "unbounded_polytope",
            Error::DegenerateCloud => "degenerate_cloud",
            Error::TargetNotInHull { .. } => "target_not_in_hull",
            Error::BallNotContained { .. } => "ball_not_contained",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::InclusionViolated { .. } => "inclusion_violated",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::RetryExhausted { .. } => "retry_exhausted",
            Error::VerificationFailed { .. } => "verification_failed",
        }
    }
}
