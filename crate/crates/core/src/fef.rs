//! Fully entangled fraction: closed form, brute force, and fidelity maps.
//!
//! The fully entangled fraction of a two-qubit state is its largest overlap
//! `⟨ψ|ρ|ψ⟩` with any maximally entangled `ψ`. Every maximally entangled
//! projector has Pauli correlation matrix `-R` for some proper rotation `R`,
//! so after canonicalizing `T` to a diagonal `D` the overlap is
//! `¼ (1 - Tr(D S))` with `S` ranging over the four diagonal sign matrices of
//! even flip count. The maximum over those four candidates is the closed
//! form: with `det T ≤ 0` it equals `¼ (1 + Σ|dᵢ|)`, and with `det T > 0`
//! it equals `¼ (1 + max over pairs (|dᵢ| + |dⱼ| - |dₖ|))`.
//!
//! An `N` value, the diagonal magnitude sum `Σ|dᵢ|` itself, tracks the
//! fraction: `N ≤ 1` exactly when the fraction is at most ½, and the
//! fraction equals `(1 + N)/4` whenever it is at least ½.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expectation, kron};
use crate::state::{phi_minus, phi_plus, psi_plus, singlet, TwoQubitState};

/// Grid resolution per Euler angle used by the brute-force default.
pub const DEFAULT_GRID_STEPS: usize = 24;

/// Simplex refinement iterations used by the brute-force default.
pub const DEFAULT_REFINE_ITERS: usize = 200;

/// Overlap with the singlet: `⟨ψ₋|ρ|ψ₋⟩ = (ρ₂₂ + ρ₃₃)/2 - Re ρ₂₃`.
pub fn singlet_fraction(state: &TwoQubitState) -> f64 {
    let m = state.matrix();
    (m.get(1, 1).re + m.get(2, 2).re) / 2.0 - m.get(1, 2).re
}

/// Diagonal magnitude sum `Σ|dᵢ|` of the canonicalized correlation matrix.
///
/// For inputs already in canonical form this agrees with the entrywise
/// expression `|1 - 2(ρ₂₂ + ρ₃₃)| - 4 Re ρ₂₃` to 1e-9.
pub fn n_value(state: &TwoQubitState) -> f64 {
    let canonical = state.canonicalize().canonical;
    let t = canonical.hilbert_schmidt().t;
    let n = t[0][0].abs() + t[1][1].abs() + t[2][2].abs();
    debug_assert!({
        let m = canonical.matrix();
        let direct = (1.0 - 2.0 * (m.get(1, 1).re + m.get(2, 2).re)).abs() - 4.0 * m.get(1, 2).re;
        (n - direct).abs() <= 1e-9
    });
    n
}

/// Result of the closed-form fraction evaluation.
#[derive(Debug, Clone)]
pub struct FefResult {
    /// The fully entangled fraction, in [¼, 1].
    pub value: f64,
    /// Whether the canonical-frame maximum sits on the singlet ψ₋.
    pub attained_on_singlet: bool,
    /// A maximally entangled unit vector attaining the value on the input
    /// state: `⟨witness|ρ|witness⟩ = value` to 1e-9.
    pub witness: [Complex64; 4],
}

/// Sign triples with an even number of flips, each paired with the Bell
/// state whose correlation matrix is `-diag(signs)`. Listed singlet-first so
/// ties resolve toward ψ₋.
const SIGN_CANDIDATES: [([f64; 3], fn() -> [Complex64; 4]); 4] = [
    ([1.0, 1.0, 1.0], singlet),
    ([1.0, -1.0, -1.0], phi_minus),
    ([-1.0, -1.0, 1.0], psi_plus),
    ([-1.0, 1.0, -1.0], phi_plus),
];

/// Closed-form fully entangled fraction with an attaining witness.
pub fn fef_closed_form(state: &TwoQubitState) -> FefResult {
    let dec = state.canonicalize();
    let t = dec.canonical.hilbert_schmidt().t;
    let d = [t[0][0], t[1][1], t[2][2]];
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (idx, (signs, _)) in SIGN_CANDIDATES.iter().enumerate() {
        let v = -(signs[0] * d[0] + signs[1] * d[1] + signs[2] * d[2]);
        if v > best {
            best = v;
            best_idx = idx;
        }
    }
    let value = 0.25 * (1.0 + best);
    let bell = (SIGN_CANDIDATES[best_idx].1)();
    let undo = kron(&dec.pair.u1().dagger(), &dec.pair.u2().dagger());
    let w = undo.mul_vec(&bell);
    FefResult {
        value,
        attained_on_singlet: best_idx == 0,
        witness: [w[0], w[1], w[2], w[3]],
    }
}

fn rotation_state(alpha: f64, beta: f64, gamma: f64) -> [Complex64; 4] {
    // U = Rz(α) Ry(β) Rz(γ); the candidate is (I⊗U)|φ₊⟩, whose components
    // are the columns of U stacked, divided by √2.
    let (ca, sa) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let (cg, sg) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let rz_a = [Complex64::new(ca, -sa), Complex64::new(ca, sa)];
    let rz_g = [Complex64::new(cg, -sg), Complex64::new(cg, sg)];
    let u00 = rz_a[0] * Complex64::new(cb, 0.0) * rz_g[0];
    let u01 = rz_a[0] * Complex64::new(-sb, 0.0) * rz_g[1];
    let u10 = rz_a[1] * Complex64::new(sb, 0.0) * rz_g[0];
    let u11 = rz_a[1] * Complex64::new(cb, 0.0) * rz_g[1];
    let s = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    [u00 * s, u10 * s, u01 * s, u11 * s]
}

/// Brute-force fraction: exhaustive Euler-angle grid over the maximally
/// entangled manifold followed by Nelder-Mead simplex refinement.
///
/// `grid_steps` points per angle over `[0,2π) x [0,π] x [0,2π)`, then
/// `refine_iters` simplex iterations from the best grid point. Use
/// [`DEFAULT_GRID_STEPS`] and [`DEFAULT_REFINE_ITERS`] unless profiling says
/// otherwise; the result is a lower bound that meets the closed form to
/// high accuracy at those settings.
pub fn fef_bruteforce(state: &TwoQubitState, grid_steps: usize, refine_iters: usize) -> f64 {
    let m = state.matrix();
    let eval = |p: &[f64; 3]| expectation(m, &rotation_state(p[0], p[1], p[2]));
    let tau = 2.0 * std::f64::consts::PI;
    let g = grid_steps.max(2);
    let mut best = f64::NEG_INFINITY;
    let mut best_p = [0.0; 3];
    for i in 0..g {
        let alpha = tau * i as f64 / g as f64;
        for j in 0..g {
            let beta = std::f64::consts::PI * j as f64 / (g - 1) as f64;
            for k in 0..g {
                let gamma = tau * k as f64 / g as f64;
                let v = eval(&[alpha, beta, gamma]);
                if v > best {
                    best = v;
                    best_p = [alpha, beta, gamma];
                }
            }
        }
    }
    let step = tau / g as f64;
    best.max(nelder_mead_max(eval, best_p, step * 0.5, refine_iters))
}

/// Nelder-Mead ascent in 3 dimensions with the standard coefficients.
fn nelder_mead_max<F: Fn(&[f64; 3]) -> f64>(
    f: F,
    start: [f64; 3],
    scale: f64,
    iters: usize,
) -> f64 {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for k in 0..3 {
        let mut p = start;
        p[k] += scale;
        simplex.push((p, f(&p)));
    }
    for _ in 0..iters {
        // Descending by value: best first.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let worst = simplex[3];
        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += p[k] / 3.0;
            }
        }
        let shifted = |coef: f64| {
            let mut p = [0.0; 3];
            for k in 0..3 {
                p[k] = centroid[k] + coef * (centroid[k] - worst.0[k]);
            }
            p
        };
        let refl = shifted(1.0);
        let f_refl = f(&refl);
        if f_refl > simplex[0].1 {
            let exp = shifted(2.0);
            let f_exp = f(&exp);
            simplex[3] = if f_exp > f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl > simplex[2].1 {
            simplex[3] = (refl, f_refl);
        } else {
            let contr = shifted(-0.5);
            let f_contr = f(&contr);
            if f_contr > worst.1 {
                simplex[3] = (contr, f_contr);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for k in 0..3 {
                        entry.0[k] = best[k] + 0.5 * (entry.0[k] - best[k]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max)
}

/// Average teleportation fidelity from the fully entangled fraction:
/// `F = (f d + 1)/(d + 1)` in dimension `d`.
pub fn teleport_fidelity_from_f(f: f64, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfRange {
            what: "dimension",
            value: d as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&f) {
        return Err(Error::OutOfRange {
            what: "fully entangled fraction",
            value: f,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let d = d as f64;
    Ok((f * d + 1.0) / (d + 1.0))
}

/// Best classical (measure-and-resend) average fidelity `2/(1 + d)`; ⅔ for
/// qubits. Exceeding it certifies the resource as a nonclassical channel.
pub fn classical_fidelity(d: u32) -> f64 {
    debug_assert!(d >= 2);
    2.0 / (1.0 + d as f64)
}
