//! Best fully entangled fraction reachable with a channel on one subsystem.
//!
//! For a fixed side X, the search over trace-preserving channels
//! `max_Λ f((Λ_X⊗I)ρ)` rewrites exactly as maximizing `Tr(ρ X)` over the
//! convex set of 4×4 PSD matrices whose side-X marginal is pinned to `I/2`:
//! feasible matrices are Choi-type encodings of "apply a channel to one
//! half of a maximally entangled state", and the overlap with ρ evaluates
//! the transformed singlet overlap. The module solves this by projected
//! gradient ascent, using Dykstra's alternating projections onto the PSD
//! cone and the marginal hyperplane, and can translate the optimizer matrix
//! back into the physical improving channel.
//!
//! Any feasible point certifies its overlap as a lower bound on the side-X
//! optimum, so reported values are honest lower bounds that approach the
//! optimum at convergence. Optimization over both-sided protocols with
//! classical communication is out of scope.

use crate::channels::{channel_from_choi, ChoiState, KrausChannel};
use crate::error::{Error, Result};
use crate::fef::fef_closed_form;
use crate::linalg::{hermitian_eig, kron, outer, partial_trace, ComplexMatrix, Subsystem};
use crate::sample::ginibre_state;
use crate::state::TwoQubitState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A point counts as feasible when its feasibility gap is at most this.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// The ascent stops once the best value has improved by less than a
/// relative `tol` over this many iterations.
const STALL_WINDOW: usize = 50;

/// Dykstra iterations exit early below this gap.
const DYKSTRA_EXIT: f64 = 1e-11;

/// Tuning knobs for [`max_overlap_sdp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpConfig {
    /// Base gradient step; iteration k uses `step_size/√k`.
    pub step_size: f64,
    /// Ascent iteration budget per start.
    pub max_iters: usize,
    /// Alternating-projection iterations per ascent step.
    pub dykstra_iters: usize,
    /// Relative stall tolerance for the stopping rule.
    pub tol: f64,
    /// Seed for the random restart.
    pub seed: u64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig {
            step_size: 0.5,
            max_iters: 5000,
            dykstra_iters: 200,
            tol: 1e-7,
            seed: 1,
        }
    }
}

/// Outcome of [`max_overlap_sdp`].
#[derive(Debug, Clone)]
pub struct SdpResult {
    /// Best certified overlap `Tr(ρ·optimizer)`.
    pub value: f64,
    /// The feasible matrix attaining `value`.
    pub optimizer: ComplexMatrix,
    /// Whether the stopping rule fired within the iteration budget.
    pub converged: bool,
    /// Ascent iterations used by the winning start.
    pub iterations: usize,
    /// Feasibility gap of `optimizer`.
    pub feasibility_gap: f64,
}

fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    m.add(&m.dagger()).scale_re(0.5)
}

/// Nearest PSD matrix in Frobenius norm: the spectral decomposition with
/// negative eigenvalues zeroed out.
pub fn project_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let h = symmetrize(m);
    let spectrum = hermitian_eig(&h).expect("symmetrized matrix is Hermitian");
    let mut out = ComplexMatrix::zeros(h.rows(), h.cols());
    for (k, &lambda) in spectrum.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            out = out.add(&outer(&spectrum.eigenvector(k)).scale_re(lambda));
        }
    }
    out
}

/// Orthogonal projection onto the affine set of matrices whose side-`side`
/// marginal equals `I/2`: add `(I/2 − marginal)⊗I/2` lifted to the named
/// factor. The result's marginal is exact up to rounding and its trace is 1.
pub fn project_marginal(m: &ComplexMatrix, side: Subsystem) -> ComplexMatrix {
    let marginal = partial_trace(m, side).expect("projection input is 4×4");
    let id = ComplexMatrix::identity(2);
    let correction = id.scale_re(0.5).sub(&marginal);
    let lift = match side {
        Subsystem::A => kron(&correction, &id),
        Subsystem::B => kron(&id, &correction),
    };
    m.add(&lift.scale_re(0.5))
}

/// Distance from feasibility: the larger of the PSD deficit `max(0, −λ_min)`
/// and the largest entry deviation of the side marginal from `I/2`.
pub fn feasibility_gap(m: &ComplexMatrix, side: Subsystem) -> f64 {
    let min_eig = hermitian_eig(&symmetrize(m))
        .expect("symmetrized matrix is Hermitian")
        .min_eigenvalue();
    let marginal = partial_trace(m, side).expect("gap input is 4×4");
    let target = ComplexMatrix::identity(2).scale_re(0.5);
    (-min_eig).max(0.0).max(marginal.max_abs_diff(&target))
}

fn dykstra_core(m: &ComplexMatrix, side: Subsystem, iters: usize) -> (ComplexMatrix, f64, usize) {
    let mut x = symmetrize(m);
    let zero = ComplexMatrix::zeros(x.rows(), x.cols());
    let mut p = zero.clone();
    let mut q = zero;
    let mut gap = feasibility_gap(&x, side);
    let mut used = 0;
    for k in 1..=iters {
        if gap <= DYKSTRA_EXIT {
            break;
        }
        let y = project_psd(&x.add(&p));
        p = x.add(&p).sub(&y);
        let z = project_marginal(&y.add(&q), side);
        q = y.add(&q).sub(&z);
        x = z;
        gap = feasibility_gap(&x, side);
        used = k;
    }
    (x, gap, used)
}

/// Dykstra's alternating projections onto the intersection of the PSD cone
/// and the marginal hyperplane. Fails with `NonConvergence` when the gap is
/// still above 1e-6 after `iters` rounds.
pub fn dykstra_feasible(
    m: &ComplexMatrix,
    side: Subsystem,
    iters: usize,
) -> Result<(ComplexMatrix, f64)> {
    let (x, gap, _) = dykstra_core(m, side, iters);
    if gap > FEASIBILITY_TOL {
        return Err(Error::NonConvergence {
            gap,
            iterations: iters,
            best_value: None,
        });
    }
    Ok((x, gap))
}

fn ascend(
    rho: &ComplexMatrix,
    side: Subsystem,
    start: ComplexMatrix,
    cfg: &SdpConfig,
) -> (f64, ComplexMatrix, usize, bool) {
    let mut x = start;
    let mut best_val = rho.hs_inner(&x);
    let mut best_x = x.clone();
    let mut history = vec![best_val];
    let mut used = 0;
    let mut converged = false;
    for k in 1..=cfg.max_iters {
        used = k;
        let eta = cfg.step_size / (k as f64).sqrt();
        let stepped = x.add(&rho.scale_re(eta));
        let (projected, _, _) = dykstra_core(&stepped, side, cfg.dykstra_iters);
        x = projected;
        let value = rho.hs_inner(&x);
        if value > best_val {
            best_val = value;
            best_x = x.clone();
        }
        history.push(best_val);
        if history.len() > STALL_WINDOW {
            let earlier = history[history.len() - 1 - STALL_WINDOW];
            if best_val - earlier <= cfg.tol * best_val.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }
    (best_val, best_x, used, converged)
}

/// Maximize `Tr(ρ X)` over PSD matrices with the side-`side` marginal
/// pinned to `I/2` by projected gradient ascent.
///
/// Three starts are merged by best value: the maximally mixed matrix, the
/// projector onto the witness of [`fef_closed_form`] (which certifies
/// `value ≥ f` from iteration zero), and a seeded random state projected to
/// feasibility. Fails with `NonConvergence` when the winning point is not
/// feasible within 1e-6; the reported value is then attached to the error.
pub fn max_overlap_sdp(
    state: &TwoQubitState,
    side: Subsystem,
    cfg: &SdpConfig,
) -> Result<SdpResult> {
    let rho = state.matrix();
    let witness = TwoQubitState::from_pure(&fef_closed_form(state).witness);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (random_start, _, _) = dykstra_core(ginibre_state(&mut rng).matrix(), side, cfg.dykstra_iters);
    let starts = [
        ComplexMatrix::identity(4).scale_re(0.25),
        witness.matrix().clone(),
        random_start,
    ];
    let mut best: Option<(f64, ComplexMatrix, usize, bool)> = None;
    for start in starts {
        let run = ascend(rho, side, start, cfg);
        if best.as_ref().map_or(true, |b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (_, optimizer, iterations, converged) = best.expect("at least one start ran");
    let value = rho.hs_inner(&optimizer);
    let gap = feasibility_gap(&optimizer, side);
    if gap > FEASIBILITY_TOL {
        return Err(Error::NonConvergence {
            gap,
            iterations,
            best_value: Some(value),
        });
    }
    Ok(SdpResult {
        value,
        optimizer,
        converged,
        iterations,
        feasibility_gap: gap,
    })
}

/// Translate an optimizer matrix back into the physical improving channel
/// acting on `side`.
///
/// The optimizer encodes the adjoint of the physical channel acting on the
/// opposite tensor factor; undoing that means reading a channel off the
/// matrix as a Choi state (swapping subsystems first for side B) and taking
/// the entrywise conjugate of its Kraus operators. The returned channel is
/// trace preserving and satisfies
/// `f((Λ⊗I)ρ) ≈ value` at convergence.
pub fn recover_channel(result: &SdpResult, side: Subsystem) -> Result<KrausChannel> {
    let oriented = match side {
        Subsystem::A => result.optimizer.clone(),
        Subsystem::B => swap_sides(&result.optimizer),
    };
    // Polish to near-machine feasibility so the extracted Kraus operators
    // pass the trace-preservation check.
    let (polished, gap, _) = dykstra_core(&oriented, Subsystem::A, 2000);
    if gap > 1e-9 {
        return Err(Error::NonConvergence {
            gap,
            iterations: 2000,
            best_value: Some(result.value),
        });
    }
    let choi = ChoiState::new(TwoQubitState::new(polished)?)?;
    Ok(channel_from_choi(&choi)?.conjugate())
}

/// Side-resolved summary of the one-sided optimization.
#[derive(Debug, Clone)]
pub struct OneSidedMax {
    /// Fully entangled fraction of the input state.
    pub f: f64,
    /// Best value reachable with a channel on subsystem A.
    pub f_a: f64,
    /// Best value reachable with a channel on subsystem B.
    pub f_b: f64,
    /// `max(f, f_a, f_b)`.
    pub best: f64,
    /// Teleportation fidelity `(2·best + 1)/3` of the best option.
    pub fidelity_best: f64,
    /// Full side-A result, for channel recovery.
    pub result_a: SdpResult,
    /// Full side-B result, for channel recovery.
    pub result_b: SdpResult,
}

/// Run [`max_overlap_sdp`] on both sides and fold in the untransformed
/// fully entangled fraction.
pub fn f_max_one_sided(state: &TwoQubitState, cfg: &SdpConfig) -> Result<OneSidedMax> {
    let f = fef_closed_form(state).value;
    let result_a = max_overlap_sdp(state, Subsystem::A, cfg)?;
    let result_b = max_overlap_sdp(state, Subsystem::B, cfg)?;
    let best = f.max(result_a.value).max(result_b.value);
    Ok(OneSidedMax {
        f,
        f_a: result_a.value,
        f_b: result_b.value,
        best,
        fidelity_best: (2.0 * best + 1.0) / 3.0,
        result_a,
        result_b,
    })
}

fn swap_sides(m: &ComplexMatrix) -> ComplexMatrix {
    let perm = [0usize, 2, 1, 3];
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            out.set(i, j, m.get(perm[i], perm[j]));
        }
    }
    out
}
