//! Reduction criterion for two-qubit states and the gate it places on
//! one-sided fidelity improvement.
//!
//! A separable state satisfies both `ρ_A⊗I − ρ ≥ 0` and `I⊗ρ_B − ρ ≥ 0`.
//! When the side-X inequality holds, no trace-preserving channel acting on
//! subsystem X alone can raise the fully entangled fraction above ½, so a
//! violation on the acting side is a necessary condition for improvement.
//! It is not sufficient: some violating states still admit no improving
//! one-sided channel.

use crate::linalg::{hermitian_eig, kron, ComplexMatrix, Subsystem};
use crate::state::TwoQubitState;

/// An eigenvalue below this threshold counts as a violation. The operators
/// have norm of order one and the eigensolver resolves them to ~1e-12, so
/// anything beyond -1e-10 is a genuine negative direction.
pub const VIOLATION_THRESHOLD: f64 = -1e-10;

/// Smallest eigenvalues of the two reduction operators and the resulting
/// verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionReport {
    /// Smallest eigenvalue of `ρ_A⊗I − ρ`.
    pub min_eig_a: f64,
    /// Smallest eigenvalue of `I⊗ρ_B − ρ`.
    pub min_eig_b: f64,
    /// Whether `min_eig_a < -1e-10`.
    pub violated_a: bool,
    /// Whether `min_eig_b < -1e-10`.
    pub violated_b: bool,
}

/// Verdict of [`improvability_gate`]: whether a one-sided channel on the
/// named side could possibly push the fully entangled fraction above ½.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Improvability {
    /// The side's reduction inequality is violated; improvement past ½ is
    /// not excluded. This is a necessary condition only, never a guarantee.
    Possible,
    /// The side's reduction inequality holds, so no trace-preserving map on
    /// that side can reach a fully entangled fraction above ½.
    RuledOut,
}

impl std::fmt::Display for Improvability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Improvability::Possible => write!(f, "possible"),
            Improvability::RuledOut => write!(f, "ruled out"),
        }
    }
}

/// Assemble `ρ_A⊗I − ρ` and `I⊗ρ_B − ρ`, diagonalize both, and report the
/// smallest eigenvalues together with the violation verdicts.
pub fn reduction_check(state: &TwoQubitState) -> ReductionReport {
    let (rho_a, rho_b) = state.reductions();
    let id = ComplexMatrix::identity(2);
    let op_a = kron(&rho_a, &id).sub(state.matrix());
    let op_b = kron(&id, &rho_b).sub(state.matrix());
    let min_eig_a = hermitian_eig(&op_a)
        .expect("ρ_A⊗I − ρ is Hermitian by construction")
        .min_eigenvalue();
    let min_eig_b = hermitian_eig(&op_b)
        .expect("I⊗ρ_B − ρ is Hermitian by construction")
        .min_eigenvalue();
    ReductionReport {
        min_eig_a,
        min_eig_b,
        violated_a: min_eig_a < VIOLATION_THRESHOLD,
        violated_b: min_eig_b < VIOLATION_THRESHOLD,
    }
}

/// Whether improvement of the fully entangled fraction past ½ by a channel
/// on `side` is still possible or already ruled out by the reduction
/// criterion on that side.
pub fn improvability_gate(state: &TwoQubitState, side: Subsystem) -> Improvability {
    let report = reduction_check(state);
    let violated = match side {
        Subsystem::A => report.violated_a,
        Subsystem::B => report.violated_b,
    };
    if violated {
        Improvability::Possible
    } else {
        Improvability::RuledOut
    }
}
