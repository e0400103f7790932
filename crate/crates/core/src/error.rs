//! Error type shared by every module in the crate.

use thiserror::Error;

/// Unified error for state validation, channel construction, and solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix differs from its conjugate transpose by more than the tolerance.
    #[error("NonHermitian: deviation {deviation:.3e} from conjugate-transpose symmetry")]
    NonHermitian { deviation: f64 },

    /// Density matrix trace is not 1.
    #[error("TraceNotOne: trace {trace:.12}")]
    TraceNotOne { trace: f64 },

    /// Matrix has an eigenvalue below the positivity floor.
    #[error("NotPositive: min eigenvalue {min_eigenvalue:.12}")]
    NotPositive { min_eigenvalue: f64 },

    /// Operand dimensions do not match what the operation requires.
    #[error("DimensionMismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    /// Kraus operators fail the trace-preservation sum rule.
    #[error("NotTracePreserving: ΣV†V deviates from identity by {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },

    /// Matrix is not unitary within tolerance.
    #[error("NotUnitary: U†U deviates from identity by {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    /// Matrix is not orthogonal within tolerance.
    #[error("NotOrthogonal: OᵀO deviates from identity by {deviation:.3e}")]
    NotOrthogonal { deviation: f64 },

    /// Orthogonal matrix has determinant -1; only proper rotations are accepted.
    #[error("Reflection: determinant {det:.9}, expected +1")]
    Reflection { det: f64 },

    /// Probability vector does not sum to 1 or has a negative entry.
    #[error("InvalidProbabilities: {detail}")]
    InvalidProbabilities { detail: String },

    /// Direction vector is not unit length.
    #[error("NotUnitVector: norm {norm:.12}")]
    NotUnitVector { norm: f64 },

    /// Scalar argument outside its admissible range.
    #[error("OutOfRange: {what} = {value:.12} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Choi marginal is not maximally mixed, so no trace-preserving channel exists.
    #[error("MarginalNotMixed: Choi marginal deviates from I/2 by {deviation:.3e}")]
    MarginalNotMixed { deviation: f64 },

    /// Coherence magnitude exceeds the bound set by the populations.
    #[error("PositivityBound: p23 = {p23:.12} outside [{lo:.12}, {hi:.12}]")]
    PositivityBound { p23: f64, lo: f64, hi: f64 },

    /// Diagonal entry of the parameterized family is out of range.
    #[error("BadDiagonal: entry {index} = {value:.12} is negative")]
    BadDiagonal { index: usize, value: f64 },

    /// State does not have the X-shaped form the operation requires.
    #[error("NotFamilyForm: {detail}")]
    NotFamilyForm { detail: String },

    /// Iterative solver failed to reach its tolerance.
    #[error(
        "NonConvergence: residual {gap:.3e} after {iterations} iterations{}",
        best_value.map(|v| format!(", best value {v:.9}")).unwrap_or_default()
    )]
    NonConvergence {
        gap: f64,
        iterations: usize,
        best_value: Option<f64>,
    },

    /// A precondition that held before a transformation no longer holds after it.
    #[error("ConditionLost: {detail}")]
    ConditionLost { detail: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
