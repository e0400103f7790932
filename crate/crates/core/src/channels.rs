//! Qubit channels in Kraus form, their Choi states, and one-sided action on
//! two-qubit states.
//!
//! A channel is a list of 2x2 Kraus operators `{V_i}` with `Σ V_i† V_i = I`;
//! it acts as `Λ(m) = Σ V_i m V_i†`. The Choi state is `(I⊗Λ)|φ₊⟩⟨φ₊|`,
//! a two-qubit state whose subsystem-A marginal is I/2 exactly when the
//! channel is trace preserving; eigenvectors of the Choi state reshape back
//! into Kraus operators, which is how [`channel_from_choi`] recovers a
//! channel from optimization output.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, partial_trace, ComplexMatrix, Subsystem};
use crate::state::{phi_plus, TwoQubitState};

/// Tolerance on the trace-preservation sum rule.
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;

/// Tolerance on the Choi marginal when accepting a state as a Choi state.
pub const CHOI_MARGINAL_TOL: f64 = 1e-8;

/// Eigenvalues of a Choi state below this weight are dropped during Kraus
/// extraction.
pub const CHOI_RANK_CUTOFF: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A validated trace-preserving qubit channel in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Accept Kraus operators after checking shapes and `Σ V†V = I` to
    /// [`TRACE_PRESERVING_TOL`].
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::NotTracePreserving { deviation: 1.0 });
        }
        for v in &ops {
            if v.rows() != 2 || v.cols() != 2 {
                return Err(Error::DimensionMismatch {
                    expected_rows: 2,
                    expected_cols: 2,
                    rows: v.rows(),
                    cols: v.cols(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(2, 2);
        for v in &ops {
            sum = sum.add(&v.dagger().mul(v));
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(2));
        if dev > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(Self { ops })
    }

    /// The identity channel.
    pub fn identity() -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(2)],
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// Channel action `Λ(m) = Σ V m V†` on a 2x2 matrix.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for v in &self.ops {
            out = out.add(&v.mul(m).mul(&v.dagger()));
        }
        out
    }

    /// Whether the channel also satisfies `Σ V V† = I` (unital direction),
    /// to [`TRACE_PRESERVING_TOL`]. Bistochastic channels cannot raise the
    /// fully entangled fraction by one-sided action.
    pub fn is_bistochastic(&self) -> bool {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for v in &self.ops {
            sum = sum.add(&v.mul(&v.dagger()));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2)) <= TRACE_PRESERVING_TOL
    }

    /// The conjugate channel with Kraus operators `V_i*` (entrywise
    /// conjugate). It satisfies `Λ*(m) = conj(Λ(conj m))` and is trace
    /// preserving whenever `Λ` is; the optimizer modules use it to turn a
    /// channel read off from a Choi-type matrix back into the physical
    /// channel it encodes.
    pub fn conjugate(&self) -> KrausChannel {
        KrausChannel {
            ops: self.ops.iter().map(|v| v.conj()).collect(),
        }
    }
}

/// Amplitude damping toward |0⟩ with mixing angle `θ ∈ [0, π/2]`:
/// Kraus operators `diag(1, cos θ)` and `[[0, sin θ], [0, 0]]`.
/// The decay probability of the excited level is `sin²θ`.
pub fn amplitude_damping(theta: f64) -> Result<KrausChannel> {
    if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::OutOfRange {
            what: "damping angle",
            value: theta,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let (s, co) = theta.sin_cos();
    let a1 = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(co, 0.0)]]);
    let a2 = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(s, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
    KrausChannel::new(vec![a1, a2])
}

/// Amplitude damping toward |1⟩, the σ₁ conjugate of [`amplitude_damping`]:
/// Kraus operators `diag(cos θ, 1)` and `[[0, 0], [sin θ, 0]]`.
pub fn amplitude_damping_toward_one(theta: f64) -> Result<KrausChannel> {
    if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::OutOfRange {
            what: "damping angle",
            value: theta,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let (s, co) = theta.sin_cos();
    let a1 = ComplexMatrix::from_rows(&[vec![c(co, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
    let a2 = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(s, 0.0), c(0.0, 0.0)]]);
    KrausChannel::new(vec![a1, a2])
}

/// Random-unitary channel `Σ p_i U_i m U_i†` from probabilities and
/// unitaries. Always bistochastic.
pub fn random_unitary_channel(probs: &[f64], unitaries: &[ComplexMatrix]) -> Result<KrausChannel> {
    if probs.len() != unitaries.len() || probs.is_empty() {
        return Err(Error::InvalidProbabilities {
            detail: format!(
                "{} probabilities for {} unitaries",
                probs.len(),
                unitaries.len()
            ),
        });
    }
    let mut sum = 0.0;
    for &p in probs {
        if p < -1e-12 {
            return Err(Error::InvalidProbabilities {
                detail: format!("negative probability {p}"),
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities {
            detail: format!("probabilities sum to {sum}"),
        });
    }
    let mut ops = Vec::with_capacity(probs.len());
    for (&p, u) in probs.iter().zip(unitaries) {
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected_rows: 2,
                expected_cols: 2,
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        let dev = u.unitary_deviation();
        if dev > 1e-9 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        ops.push(u.scale_re(p.max(0.0).sqrt()));
    }
    KrausChannel::new(ops)
}

/// A two-qubit state whose subsystem-A marginal is I/2: the Choi state of a
/// trace-preserving qubit channel acting on subsystem B.
#[derive(Debug, Clone)]
pub struct ChoiState {
    state: TwoQubitState,
}

impl ChoiState {
    /// Accept a state as a Choi state, checking the marginal to
    /// [`CHOI_MARGINAL_TOL`].
    pub fn new(state: TwoQubitState) -> Result<Self> {
        let a = partial_trace(state.matrix(), Subsystem::A).expect("4x4 by construction");
        let dev = a.max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5));
        if dev > CHOI_MARGINAL_TOL {
            return Err(Error::MarginalNotMixed { deviation: dev });
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &TwoQubitState {
        &self.state
    }
}

/// Choi state `(I⊗Λ)|φ₊⟩⟨φ₊|` of a channel.
pub fn choi_state(channel: &KrausChannel) -> ChoiState {
    let p = TwoQubitState::from_pure(&phi_plus());
    let out = apply_one_sided(&p, channel, Subsystem::B);
    ChoiState::new(out).expect("trace-preserving channel has mixed Choi marginal")
}

/// Recover a Kraus channel from a Choi state.
///
/// Each eigenvector `v` of the Choi state with eigenvalue `λ` above
/// [`CHOI_RANK_CUTOFF`] reshapes into the operator `W[j][i] = √(2λ) v[2i+j]`;
/// operators come out ordered by descending eigenvalue. Round-tripping
/// through [`choi_state`] reproduces the input to 1e-7.
pub fn channel_from_choi(choi: &ChoiState) -> Result<KrausChannel> {
    let spectrum = hermitian_eig(choi.state().matrix())?;
    let mut ops = Vec::new();
    for k in (0..4).rev() {
        let lam = spectrum.eigenvalues[k];
        if lam < CHOI_RANK_CUTOFF {
            continue;
        }
        let v = spectrum.eigenvector(k);
        let w = (2.0 * lam).sqrt();
        let mut op = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                op.set(j, i, v[2 * i + j] * c(w, 0.0));
            }
        }
        ops.push(op);
    }
    KrausChannel::new(ops)
}

/// Act with a channel on one subsystem of a two-qubit state:
/// `Σ (V⊗I) ρ (V⊗I)†` for side A, `Σ (I⊗V) ρ (I⊗V)†` for side B.
pub fn apply_one_sided(
    state: &TwoQubitState,
    channel: &KrausChannel,
    side: Subsystem,
) -> TwoQubitState {
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::zeros(4, 4);
    for v in channel.operators() {
        let big = match side {
            Subsystem::A => kron(v, &id),
            Subsystem::B => kron(&id, v),
        };
        out = out.add(&big.mul(state.matrix()).mul(&big.dagger()));
    }
    TwoQubitState::from_valid(out)
}
