//! Numerical thresholds shared by all modules.
//!
//! Rank decisions are always relative to the largest singular value; no
//! computation in this crate tests a floating-point quantity for exact zero.

/// Penrose identities of the pseudoinverse.
pub const PENROSE: f64 = 1e-10;

/// Relative singular-value cutoff for numeric rank and kernels.
pub const RANK: f64 = 1e-9;

/// Relative Hermitian defect accepted by eigen-solvers.
pub const HERMITIAN: f64 = 1e-10;

/// Reconstruction residual of a Hermitian eigen-decomposition.
pub const EIGEN: f64 = 1e-9;

/// Symplectic and block-structure identities of the coefficients.
pub const SYMPLECTIC: f64 = 1e-10;

/// Per-step residual of a recurrence, relative to `1 + |z_k|`.
pub const RESIDUAL: f64 = 1e-9;

/// PSD test of `-X_{k+1} X_k^+ B_k` and of the Lambda summands.
pub const PSD: f64 = 1e-9;

/// Relative discrepancy at which recessive approximants count as converged.
pub const RECESSIVE: f64 = 1e-8;

/// Finite-horizon proxy for `lambda_min(Lambda_k) -> infinity`.
pub const LAMBDA_BIG: f64 = 10.0;

/// Growth ratio of Gram eigen-directions per horizon doubling that separates
/// bounded from divergent directions.
pub const GROWTH_RATIO: f64 = 10.0;

/// Psi-seminorm tail relative to the full seminorm.
pub const TAIL: f64 = 1e-6;

/// Oscillation and size of a boundary-form limit.
pub const LIMIT: f64 = 1e-7;

/// Largest condition number accepted for the normalization point.
pub const NORMALIZATION_COND: f64 = 1e6;

/// Magnitude at which propagation aborts.
pub const OVERFLOW: f64 = 1e300;
