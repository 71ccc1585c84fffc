use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the crate.
///
/// Variants fall into three classes (see [`Error::class`]): invalid input,
/// physically unusable input, and numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("interface under-resolved: grid spacing {h:.3e} exceeds eps = {eps:.3e}")]
    UnderResolved { h: f64, eps: f64 },

    #[error("grid mismatch: expected {expected} samples, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("{what}: Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged {
        what: String,
        iterations: usize,
        residual: f64,
    },

    #[error("solvability condition violated: defect {defect:.6e} exceeds tolerance {tolerance:.3e}")]
    SolvabilityViolated { defect: f64, tolerance: f64 },

    #[error("right-hand side does not decay: tail magnitude {tail:.3e} exceeds {tolerance:.3e}")]
    NonDecayingRhs { tail: f64, tolerance: f64 },

    #[error("eigensolver failed for eigenvalue #{index} after {iterations} iterations")]
    EigenNonConvergence { index: usize, iterations: usize },

    #[error("curve self-intersects between segments {first} and {second}")]
    SelfIntersection { first: usize, second: usize },

    #[error("ambiguous closest-point projection for ({x:.6}, {y:.6}): competing parameters {s1:.6} and {s2:.6}")]
    AmbiguousProjection { x: f64, y: f64, s1: f64, s2: f64 },

    #[error("point ({x:.6}, {y:.6}) lies outside the tubular neighbourhood (|d| = {dist:.4e} > {limit:.4e})")]
    OutsideTube { x: f64, y: f64, dist: f64, limit: f64 },

    #[error("coordinate inversion failed at node (r = {r:.6e}, s = {s:.6}) for eps = {eps:.3e}")]
    InversionFailed { r: f64, s: f64, eps: f64 },

    #[error("solution blew up at t = {t:.6e} (norm {norm:.3e})")]
    BlowUp { t: f64, norm: f64 },

    #[error("non-finite value detected at t = {t:.6e} in {field}")]
    NotFinite { t: f64, field: &'static str },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    LinearSolver {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("field has no zero crossing")]
    NoInterface,

    #[error("bubble collapses: R0^2 - 2 m t = {value:.6e} <= 0")]
    Collapse { value: f64 },

    #[error("missing snapshots: {0}")]
    MissingSnapshots(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad configuration or violated precondition.
    Validation,
    /// A well-formed request that is physically unusable, e.g. a grid that
    /// does not resolve the interface or a bubble that collapses.
    Physical,
    /// The numerics failed (divergence, blow-up, solver breakdown).
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_)
            | Error::Config { .. }
            | Error::GridMismatch { .. }
            | Error::SolvabilityViolated { .. }
            | Error::NonDecayingRhs { .. }
            | Error::Json(_)
            | Error::Io(_) => ErrorClass::Validation,
            Error::UnderResolved { .. } | Error::Collapse { .. } => ErrorClass::Physical,
            _ => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
