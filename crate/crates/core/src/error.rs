use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements belong to different Lie algebra contexts ({0} vs {1})")]
    ContextMismatch(String, String),

    #[error("bracket leaves the algebra: closure residual {residual:.3e} exceeds {tolerance:.3e}")]
    ClosureViolation { residual: f64, tolerance: f64 },

    #[error("principal logarithm undefined: {0}")]
    LogBranchFailure(String),

    #[error("context `{0}` has no reductive split configured")]
    NoSplitConfigured(String),

    #[error("invalid Lie algebra context: {0}")]
    InvalidContext(String),

    #[error("matrix is not an element of the modeled group: {0}")]
    NotInGroup(String),

    #[error("index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("plane requires two distinct indices, got ({0}, {0})")]
    EqualIndices(usize),

    #[error("curvature symmetry violated: {0}")]
    SymmetryViolation(String),

    #[error("metric is not positive-definite on the stencil at {0:?}")]
    SingularMetric(Vec<f64>),

    #[error("complex Hessian of the potential is degenerate at the base point")]
    DegenerateHessian,

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("linear system for the quartic coefficients is singular")]
    SingularSystem,

    #[error("indices must be non-decreasing, got {0:?}")]
    UnorderedIndices([usize; 4]),

    #[error("vector is not tangent at the base point: residual {0:.3e}")]
    NotTangent(f64),

    #[error("vector has a nonzero h-component of size {0:.3e}")]
    VectorNotInM(f64),

    #[error("paths live on different grids ({0} vs {1} intervals)")]
    GridMismatch(usize, usize),

    #[error("integration blew up at t = {t:.6}: norm {norm:.3e} exceeds bound {bound:.3e}")]
    BlowupDetected { t: f64, norm: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
