use thiserror::Error;

use crate::witness::Simplex;

/// Errors raised by geometry predicates, witness construction and the
/// complex builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point for {geometry} geometry: {reason}")]
    InvalidPoint {
        geometry: &'static str,
        reason: String,
    },

    #[error("antipodal pair: the geodesic between the points is not unique")]
    AntipodalPair,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("the projection pole lies inside the ball")]
    PoleInBall,

    #[error("cannot project the projection pole itself")]
    PoleProjection,

    #[error("certification failed for {simplex}: {reason}")]
    CertificationFailure { simplex: Simplex, reason: String },

    #[error("genericity violated: tied points are affinely dependent ({tied} points)")]
    GenericityViolation { tied: usize },

    #[error("no perturbation size produced a robust witness")]
    SearchExhausted,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("witness balls cover the sphere (best pole margin {best_margin:e})")]
    ConditionFailed { best_margin: f64 },

    #[error("face {0} has no weak witness in the sampled domain")]
    MissingWeakWitness(Simplex),

    #[error("unsupported geometry for this operation: {0}")]
    UnsupportedGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
