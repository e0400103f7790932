//! Two-qubit density matrices, their Pauli-basis representation, and the
//! local-unitary canonical form.
//!
//! Basis order throughout is |00⟩, |01⟩, |10⟩, |11⟩ with the first ket
//! belonging to subsystem A. Matrix positions quoted in messages are 1-based,
//! so "entry (2,3)" is the |01⟩⟨10| coherence.
//!
//! Every state admits the representation
//! `ρ = ¼ (I⊗I + r·σ⊗I + I⊗s·σ + Σ_nm t_nm σ_n⊗σ_m)`
//! with real local vectors `r`, `s` and the real 3x3 correlation matrix `T`.
//! Local unitaries act on it as `r' = O₁ r`, `s' = O₂ s`, `T' = O₁ T O₂ᵀ`
//! where `O_i` is the rotation induced by `U_i`, which is what the
//! canonicalization here exploits: a singular value decomposition of `T`
//! restricted to proper rotations diagonalizes `T` and a final sign
//! convention leaves at most one positive diagonal entry, in the third slot.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, outer, partial_trace, pauli, vec_norm, ComplexMatrix, Subsystem,
};

/// Tolerance on hermiticity and unit trace when accepting a density matrix.
pub const STATE_TOL: f64 = 1e-9;

/// Smallest eigenvalue a density matrix may have; slightly below zero to
/// absorb rounding from upstream transformations.
pub const POSITIVITY_FLOOR: f64 = -1e-10;

/// Tolerance used by [`TwoQubitState::is_canonical`].
pub const CANONICAL_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Singlet ψ₋ = (|01⟩ - |10⟩)/√2.
pub fn singlet() -> [Complex64; 4] {
    let s = 1.0 / 2.0f64.sqrt();
    [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]
}

/// Triplet ψ₊ = (|01⟩ + |10⟩)/√2.
pub fn psi_plus() -> [Complex64; 4] {
    let s = 1.0 / 2.0f64.sqrt();
    [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]
}

/// φ₊ = (|00⟩ + |11⟩)/√2.
pub fn phi_plus() -> [Complex64; 4] {
    let s = 1.0 / 2.0f64.sqrt();
    [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]
}

/// φ₋ = (|00⟩ - |11⟩)/√2.
pub fn phi_minus() -> [Complex64; 4] {
    let s = 1.0 / 2.0f64.sqrt();
    [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)]
}

/// A validated 4x4 two-qubit density matrix.
///
/// Construction checks hermiticity and unit trace to [`STATE_TOL`] and
/// positivity down to [`POSITIVITY_FLOOR`]; the wrapped matrix is
/// symmetrized exactly so downstream eigensolves never see asymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
}

impl TwoQubitState {
    /// Accept a matrix as a density matrix or report which invariant failed.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected_rows: 4,
                expected_cols: 4,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let dev = m.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::NonHermitian { deviation: dev });
        }
        let tr = m.trace();
        if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let mut h = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                h.set(i, j, (m.get(i, j) + m.get(j, i).conj()).scale(0.5));
            }
        }
        let spectrum = hermitian_eig(&h)?;
        let min = spectrum.min_eigenvalue();
        if min < POSITIVITY_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix: h })
    }

    /// Wrap a matrix that is already known to satisfy the state invariants,
    /// e.g. the output of an exact unitary conjugation of a valid state.
    pub(crate) fn from_valid(m: ComplexMatrix) -> Self {
        debug_assert!(m.hermitian_deviation() <= 1e-8);
        debug_assert!((m.trace() - c(1.0, 0.0)).norm() <= 1e-8);
        let mut h = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                h.set(i, j, (m.get(i, j) + m.get(j, i).conj()).scale(0.5));
            }
        }
        Self { matrix: h }
    }

    /// The maximally mixed state I/4.
    pub fn maximally_mixed() -> Self {
        Self::from_valid(ComplexMatrix::identity(4).scale_re(0.25))
    }

    /// Projector onto a unit vector.
    pub fn from_pure(v: &[Complex64; 4]) -> Self {
        debug_assert!((vec_norm(v) - 1.0).abs() < 1e-9);
        Self::from_valid(outer(v))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Entry by 0-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    /// Both reduced density matrices `(ρ_A, ρ_B)`.
    pub fn reductions(&self) -> (ComplexMatrix, ComplexMatrix) {
        let a = partial_trace(&self.matrix, Subsystem::A).expect("4x4 by construction");
        let b = partial_trace(&self.matrix, Subsystem::B).expect("4x4 by construction");
        (a, b)
    }

    /// Pauli-basis representation of the state.
    pub fn hilbert_schmidt(&self) -> HilbertSchmidt {
        let mut r = [0.0; 3];
        let mut s = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        let id = ComplexMatrix::identity(2);
        for n in 0..3 {
            let sn = pauli(n + 1);
            r[n] = kron(&sn, &id).hs_inner(&self.matrix);
            s[n] = kron(&id, &sn).hs_inner(&self.matrix);
            for m in 0..3 {
                t[n][m] = kron(&sn, &pauli(m + 1)).hs_inner(&self.matrix);
            }
        }
        HilbertSchmidt { r, s, t }
    }

    /// Joint spin correlation `E(a, b) = Tr(ρ a·σ ⊗ b·σ)` for unit
    /// directions `a` and `b`; equals the bilinear form `(a, T b)`.
    pub fn correlation(&self, a: [f64; 3], b: [f64; 3]) -> Result<f64> {
        for v in [a, b] {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnitVector { norm });
            }
        }
        let dot = |v: [f64; 3]| {
            let mut m = ComplexMatrix::zeros(2, 2);
            for (k, &vk) in v.iter().enumerate() {
                m = m.add(&pauli(k + 1).scale_re(vk));
            }
            m
        };
        Ok(kron(&dot(a), &dot(b)).hs_inner(&self.matrix))
    }

    /// Check the canonical-form conditions entrywise, to [`CANONICAL_TOL`].
    ///
    /// A state is canonical when its correlation matrix is diagonal with the
    /// first two diagonal entries nonpositive. On matrix entries that reads:
    /// entries (1,2) and (3,4) equal, entries (1,3) and (2,4) equal, entries
    /// (2,3) and (1,4) real, entry (2,3) nonpositive and at least as large in
    /// magnitude as entry (1,4).
    pub fn is_canonical(&self) -> CanonicalCheck {
        let tol = CANONICAL_TOL;
        let m = &self.matrix;
        let mut failures = Vec::new();
        let pairs = [((0, 1), (2, 3)), ((0, 2), (1, 3))];
        for ((i1, j1), (i2, j2)) in pairs {
            let d = (m.get(i1, j1) - m.get(i2, j2)).norm();
            if d > tol {
                failures.push(format!(
                    "entry ({},{}) must equal entry ({},{}), differ by {:.3e}",
                    i1 + 1,
                    j1 + 1,
                    i2 + 1,
                    j2 + 1,
                    d
                ));
            }
        }
        for (i, j) in [(1, 2), (0, 3)] {
            let im = m.get(i, j).im.abs();
            if im > tol {
                failures.push(format!(
                    "entry ({},{}) must be real, imaginary part {:.3e}",
                    i + 1,
                    j + 1,
                    im
                ));
            }
        }
        let e23 = m.get(1, 2);
        let e14 = m.get(0, 3);
        if e23.re > tol {
            failures.push(format!(
                "entry (2,3) must be nonpositive, got {:.6}",
                e23.re
            ));
        }
        if e23.norm() < e14.norm() - tol {
            failures.push(format!(
                "entry (2,3) magnitude {:.6} must dominate entry (1,4) magnitude {:.6}",
                e23.norm(),
                e14.norm()
            ));
        }
        CanonicalCheck { canonical: failures.is_empty(), failures }
    }

    /// Diagonalize the correlation matrix by local unitaries.
    ///
    /// Returns the canonical state together with the unitary pair that maps
    /// the input onto it; `apply_local_unitaries(self, &pair)` reproduces
    /// `canonical` to 1e-10. The canonical correlation matrix is diagonal
    /// with its first two entries nonpositive, and local spectra, the
    /// eigenvalues of the state, and the singular values of `T` are all
    /// preserved.
    pub fn canonicalize(&self) -> CanonicalDecomposition {
        let hs = self.hilbert_schmidt();
        let (o1, o2) = canonical_rotations(&hs.t);
        let u1 = so3_to_su2(&o1).expect("constructed rotation is proper");
        let u2 = so3_to_su2(&o2).expect("constructed rotation is proper");
        let pair = LocalUnitaryPair { u1, u2 };
        let canonical = apply_local_unitaries(self, &pair);
        CanonicalDecomposition { canonical, pair }
    }
}

/// Outcome of [`TwoQubitState::is_canonical`]: overall verdict plus one
/// message per violated condition.
#[derive(Debug, Clone)]
pub struct CanonicalCheck {
    pub canonical: bool,
    pub failures: Vec<String>,
}

/// Pauli-basis data of a two-qubit state: local vectors `r` (subsystem A),
/// `s` (subsystem B), and the correlation matrix `t` with `t[n][m]`
/// multiplying `σ_n ⊗ σ_m`.
///
/// For data coming from a state, `|r| ≤ 1`, `|s| ≤ 1`, every `|t[n][m]| ≤ 1`,
/// and the Frobenius norm of `t` is at most √3.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertSchmidt {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl HilbertSchmidt {
    /// Rebuild the density matrix `¼ (I + r·σ⊗I + I⊗s·σ + Σ t_nm σ_n⊗σ_m)`
    /// and validate it as a state.
    pub fn to_state(&self) -> Result<TwoQubitState> {
        let bound = 1.0 + 1e-9;
        for (what, v) in [("r", self.r), ("s", self.s)] {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > bound {
                return Err(Error::OutOfRange {
                    what: if what == "r" { "local vector r norm" } else { "local vector s norm" },
                    value: norm,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        let mut frob = 0.0;
        for row in &self.t {
            for &x in row {
                if x.abs() > bound {
                    return Err(Error::OutOfRange {
                        what: "correlation matrix entry",
                        value: x,
                        lo: -1.0,
                        hi: 1.0,
                    });
                }
                frob += x * x;
            }
        }
        if frob.sqrt() > 3.0f64.sqrt() + 1e-9 {
            return Err(Error::OutOfRange {
                what: "correlation matrix Frobenius norm",
                value: frob.sqrt(),
                lo: 0.0,
                hi: 3.0f64.sqrt(),
            });
        }
        let id = ComplexMatrix::identity(2);
        let mut m = ComplexMatrix::identity(4);
        for n in 0..3 {
            let sn = pauli(n + 1);
            m = m.add(&kron(&sn, &id).scale_re(self.r[n]));
            m = m.add(&kron(&id, &sn).scale_re(self.s[n]));
            for k in 0..3 {
                m = m.add(&kron(&sn, &pauli(k + 1)).scale_re(self.t[n][k]));
            }
        }
        TwoQubitState::new(m.scale_re(0.25))
    }
}

/// A pair of validated 2x2 unitaries acting on subsystems A and B.
#[derive(Debug, Clone)]
pub struct LocalUnitaryPair {
    u1: ComplexMatrix,
    u2: ComplexMatrix,
}

impl LocalUnitaryPair {
    /// Accept two 2x2 matrices that are unitary to 1e-9.
    pub fn new(u1: ComplexMatrix, u2: ComplexMatrix) -> Result<Self> {
        for u in [&u1, &u2] {
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
        }
        Ok(Self { u1, u2 })
    }

    /// The identity pair.
    pub fn identity() -> Self {
        Self {
            u1: ComplexMatrix::identity(2),
            u2: ComplexMatrix::identity(2),
        }
    }

    pub fn u1(&self) -> &ComplexMatrix {
        &self.u1
    }

    pub fn u2(&self) -> &ComplexMatrix {
        &self.u2
    }

    /// The pair of conjugate-transposed unitaries, undoing this pair.
    pub fn inverse(&self) -> Self {
        Self {
            u1: self.u1.dagger(),
            u2: self.u2.dagger(),
        }
    }
}

/// Result of [`TwoQubitState::canonicalize`].
#[derive(Debug, Clone)]
pub struct CanonicalDecomposition {
    pub canonical: TwoQubitState,
    pub pair: LocalUnitaryPair,
}

/// Conjugate a state by local unitaries: `(U₁⊗U₂) ρ (U₁⊗U₂)†`.
pub fn apply_local_unitaries(state: &TwoQubitState, pair: &LocalUnitaryPair) -> TwoQubitState {
    let u = kron(&pair.u1, &pair.u2);
    TwoQubitState::from_valid(u.mul(state.matrix()).mul(&u.dagger()))
}

/// Rotation induced on Bloch vectors by a 2x2 unitary:
/// `O_mn = ½ Tr(σ_m U σ_n U†)`, so that `U (n·σ) U† = (O n)·σ`.
///
/// The global phase of `U` drops out. Errors when `U` is not unitary to 1e-9.
pub fn su2_to_so3(u: &ComplexMatrix) -> Result<[[f64; 3]; 3]> {
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
    let ud = u.dagger();
    let mut o = [[0.0; 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            o[m][n] = 0.5
                * pauli(m + 1)
                    .mul(u)
                    .mul(&pauli(n + 1))
                    .mul(&ud)
                    .trace()
                    .re;
        }
    }
    Ok(o)
}

/// A 2x2 unitary inducing the given proper rotation, via its quaternion.
///
/// The quaternion is recovered with the largest-component branch and the
/// global phase is fixed by making the first entry of magnitude above 1e-8
/// real and positive, so the output is deterministic. Errors on non-orthogonal
/// input and on reflections (determinant -1).
pub fn so3_to_su2(o: &[[f64; 3]; 3]) -> Result<ComplexMatrix> {
    let mut dev: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| o[k][i] * o[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - want).abs());
        }
    }
    if dev > 1e-9 {
        return Err(Error::NotOrthogonal { deviation: dev });
    }
    let det = det3(o);
    if (det - 1.0).abs() > 1e-9 {
        return Err(Error::Reflection { det });
    }
    let tr = o[0][0] + o[1][1] + o[2][2];
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = s / 4.0;
        x = (o[2][1] - o[1][2]) / s;
        y = (o[0][2] - o[2][0]) / s;
        z = (o[1][0] - o[0][1]) / s;
    } else if o[0][0] > o[1][1] && o[0][0] > o[2][2] {
        let s = (1.0 + o[0][0] - o[1][1] - o[2][2]).sqrt() * 2.0;
        w = (o[2][1] - o[1][2]) / s;
        x = s / 4.0;
        y = (o[0][1] + o[1][0]) / s;
        z = (o[0][2] + o[2][0]) / s;
    } else if o[1][1] > o[2][2] {
        let s = (1.0 + o[1][1] - o[0][0] - o[2][2]).sqrt() * 2.0;
        w = (o[0][2] - o[2][0]) / s;
        x = (o[0][1] + o[1][0]) / s;
        y = s / 4.0;
        z = (o[1][2] + o[2][1]) / s;
    } else {
        let s = (1.0 + o[2][2] - o[0][0] - o[1][1]).sqrt() * 2.0;
        w = (o[1][0] - o[0][1]) / s;
        x = (o[0][2] + o[2][0]) / s;
        y = (o[1][2] + o[2][1]) / s;
        z = s / 4.0;
    }
    // U = w I - i (x σ1 + y σ2 + z σ3)
    let mut u = ComplexMatrix::identity(2).scale_re(w);
    for (comp, idx) in [(x, 1), (y, 2), (z, 3)] {
        u = u.add(&pauli(idx).scale(c(0.0, -comp)));
    }
    'phase: for i in 0..2 {
        for j in 0..2 {
            let e = u.get(i, j);
            if e.norm() > 1e-8 {
                u = u.scale(e.conj() / c(e.norm(), 0.0));
                break 'phase;
            }
        }
    }
    Ok(u)
}

pub(crate) fn det3(o: &[[f64; 3]; 3]) -> f64 {
    o[0][0] * (o[1][1] * o[2][2] - o[1][2] * o[2][1])
        - o[0][1] * (o[1][0] * o[2][2] - o[1][2] * o[2][0])
        + o[0][2] * (o[1][0] * o[2][1] - o[1][1] * o[2][0])
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat3_transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// One-sided Jacobi singular value decomposition `T = U Σ Vᵀ` of a real 3x3
/// matrix, singular values descending. Works directly on the columns of `T`
/// (no normal-equations squaring), so rank-deficient input keeps full
/// accuracy; missing columns of `U` are completed by cross products.
fn svd3(t: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], [f64; 3], [[f64; 3]; 3]) {
    let mut a = *t;
    let mut v = [[0.0; 3], [0.0; 3], [0.0; 3]];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..2 {
            for q in (p + 1)..3 {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for k in 0..3 {
                    app += a[k][p] * a[k][p];
                    aqq += a[k][q] * a[k][q];
                    apq += a[k][p] * a[k][q];
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let tval = {
                    let t = 1.0 / (tau.abs() + (1.0 + tau * tau).sqrt());
                    if tau < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let cc = 1.0 / (1.0 + tval * tval).sqrt();
                let ss = tval * cc;
                for m in [&mut a, &mut v] {
                    for row in m.iter_mut() {
                        let (cp, cq) = (row[p], row[q]);
                        row[p] = cc * cp - ss * cq;
                        row[q] = ss * cp + cc * cq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig = [0.0; 3];
    for i in 0..3 {
        sig[i] = (0..3).map(|k| a[k][i] * a[k][i]).sum::<f64>().sqrt();
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]));
    let sorted_sig = [sig[order[0]], sig[order[1]], sig[order[2]]];
    let mut u = [[0.0; 3]; 3];
    let mut vs = [[0.0; 3]; 3];
    let mut good = 0;
    for (slot, &col) in order.iter().enumerate() {
        for k in 0..3 {
            vs[k][slot] = v[k][col];
        }
        if sorted_sig[slot] > 1e-13 {
            for k in 0..3 {
                u[k][slot] = a[k][col] / sorted_sig[slot];
            }
            good += 1;
        }
    }
    match good {
        0 => {
            for (i, row) in u.iter_mut().enumerate() {
                row[i] = 1.0;
            }
        }
        1 => {
            let a0 = [u[0][0], u[1][0], u[2][0]];
            let mut emin = 0;
            for i in 1..3 {
                if a0[i].abs() < a0[emin].abs() {
                    emin = i;
                }
            }
            let mut e = [0.0; 3];
            e[emin] = 1.0;
            let mut b = cross(a0, e);
            let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            for x in b.iter_mut() {
                *x /= nb;
            }
            let cprod = cross(a0, b);
            for k in 0..3 {
                u[k][1] = b[k];
                u[k][2] = cprod[k];
            }
        }
        2 => {
            let a0 = [u[0][0], u[1][0], u[2][0]];
            let a1 = [u[0][1], u[1][1], u[2][1]];
            let cprod = cross(a0, a1);
            for k in 0..3 {
                u[k][2] = cprod[k];
            }
        }
        _ => {}
    }
    (u, sorted_sig, vs)
}

/// Proper rotations `(O₁, O₂)` such that `O₁ T O₂ᵀ` is diagonal with the
/// first two diagonal entries nonpositive.
fn canonical_rotations(t: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let (mut u, _sig, mut v) = svd3(t);
    // Restrict both factors to proper rotations; flipping the column paired
    // with the smallest singular value costs nothing.
    if det3(&u) < 0.0 {
        for row in u.iter_mut() {
            row[2] = -row[2];
        }
    }
    if det3(&v) < 0.0 {
        for row in v.iter_mut() {
            row[2] = -row[2];
        }
    }
    let mut o1 = mat3_transpose(&u);
    let o2 = mat3_transpose(&v);
    let d = mat3_mul(&mat3_mul(&o1, t), &mat3_transpose(&o2));
    // Push signs so that at most the third diagonal entry stays positive;
    // only even sign flips keep the rotations proper.
    let pos: Vec<usize> = (0..2).filter(|&i| d[i][i] > 0.0).collect();
    let mut flip = [1.0, 1.0, 1.0];
    match pos.len() {
        2 => {
            flip[0] = -1.0;
            flip[1] = -1.0;
        }
        1 => {
            flip[pos[0]] = -1.0;
            flip[2] = -1.0;
        }
        _ => {}
    }
    for (i, row) in o1.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x *= flip[i];
        }
    }
    (o1, o2)
}
