use thiserror::Error;

/// Errors raised across the library.
///
/// Mathematical verdicts (a system that is oscillatory, a pair that is not
/// normalized) are usually reported as values; the variants here are for
/// preconditions that make a computation meaningless.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("numeric failure: {what}")]
    NumericFailure { what: String },

    #[error("propagation overflow at k = {k}")]
    Overflow { k: usize },

    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("S_k is not symplectic at k = {k} (defect {defect:.3e})")]
    NotSymplectic { k: usize, defect: f64 },

    #[error("weight W_k is not Hermitian positive definite at k = {k}")]
    WeightNotPositive { k: usize },

    #[error("structural identity {identity} fails at k = {k} (defect {defect:.3e})")]
    StructureViolation {
        identity: &'static str,
        k: usize,
        defect: f64,
    },

    #[error("index range [{a}, {b}] is not covered (available [0, {len}))")]
    RangeMismatch { a: usize, b: usize, len: usize },

    #[error("sequence is not a solution of the relation at k = {k} (residual {residual:.3e})")]
    NotASolution { k: usize, residual: f64 },

    #[error("sequence is not admissible at k = {k}")]
    NotAdmissible { k: usize },

    #[error("X_{k} is singular")]
    SingularX { k: usize },

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("system is not controllable on [{from}, {to}]")]
    NotControllable { from: usize, to: usize },

    #[error("system is oscillatory: {0}")]
    Oscillatory(String),

    #[error("recessive approximants did not converge (last discrepancy {last:.3e})")]
    NotConverged { history: Vec<f64>, last: f64 },

    #[error("candidate is not a certified recessive solution: {0}")]
    NotRecessive(String),

    #[error("complement bottom block at m has rank {rank} < {needed}")]
    RankDeficientComplement { rank: usize, needed: usize },

    #[error("leading block of Upsilon differs from the canonical form by {defect:.3e}")]
    SubmatrixCheckFailed { defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("file error: {0}")]
    File(String),
}

pub type Result<T> = std::result::Result<T, Error>;
