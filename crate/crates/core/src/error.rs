use thiserror::Error;

/// Errors raised by the varifold library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid varifold: {0}")]
    InvalidVarifold(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate simplex {index}: volume {volume:e} below threshold {threshold:e}")]
    DegenerateSimplex { index: usize, volume: f64, threshold: f64 },

    #[error("non-manifold mesh: {} offending edges, first {:?}", .edges.len(), .edges.first())]
    NonManifold { edges: Vec<(usize, usize)> },

    #[error("point is {distance:e} away from the ambient manifold (tolerance {tolerance:e})")]
    OffManifold { distance: f64, tolerance: f64 },

    #[error("plane is not contained in the ambient tangent space (defect {defect:e})")]
    BundleConstraint { defect: f64 },

    #[error("no ambient manifold attached")]
    NoAmbient,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent p = {p} must exceed the varifold dimension m = {m}")]
    ExponentTooSmall { p: f64, m: usize },

    #[error("hypothesis violated for {lemma}: {hypothesis}")]
    Hypothesis { lemma: &'static str, hypothesis: String },

    #[error("{count} atoms have no curvature value")]
    UnsetCurvature { count: usize },

    #[error("gradient check failed: relative error {rel_error:e} exceeds {limit:e}")]
    GradientCheck { rel_error: f64, limit: f64 },

    #[error("mesh degenerated: {0}")]
    MeshDegeneration(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
