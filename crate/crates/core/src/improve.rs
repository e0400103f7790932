//! One-sided amplitude-damping improvement of the fully entangled fraction.
//!
//! The construction works on a family of canonical states parameterized by
//! `(ε, γ, δ, p₂₃, ρ₁₄)`: diagonal `((1−ε−γ)/4, (1+ε−δ)/4, (1+ε+δ)/4,
//! (1−ε+γ)/4)`, coherences `ρ₂₃ = −p₂₃` and an optional real `ρ₁₄`. On this
//! family the fully entangled fraction is `f = (ρ₂₂+ρ₃₃)/2 + p₂₃`, and
//! damping one qubit trades diagonal weight for singlet coherence. The gain
//! at mixing angle θ has the closed form `Δ(c) = (1−c)[(1+c)·a/2 − p₂₃]`
//! with `c = cos θ` and `a` a difference of diagonal entries, so the state
//! is improvable exactly when `a > p₂₃`, with the optimum at `c = p₂₃/a` and
//! maximal gain `(a−p₂₃)²/(2a)`.
//!
//! The border state exported here has `f = ½` (useless for teleportation as
//! is) yet gains Δ ≈ 0.0224 from a one-sided channel, pushing teleportation
//! fidelity past the classical threshold.

use crate::channels::{amplitude_damping, amplitude_damping_toward_one, apply_one_sided, KrausChannel};
use crate::error::{Error, Result};
use crate::fef::{fef_bruteforce, fef_closed_form, DEFAULT_GRID_STEPS, DEFAULT_REFINE_ITERS};
use crate::linalg::{ComplexMatrix, Subsystem};
use crate::state::{det3, TwoQubitState};
use num_complex::Complex64;
use rand::Rng;

/// Tolerance for recognizing the family's zero pattern in a matrix.
pub const FAMILY_FORM_TOL: f64 = 1e-9;

/// Slack allowed on the `p₂₃` positivity bounds; the border state sits on
/// the upper bound up to rounding in the last bit.
const BOUND_SLACK: f64 = 1e-12;

/// Parameters of the canonical state family.
///
/// Valid parameters keep the derived diagonal nonnegative, keep `p₂₃`
/// within `[(1−ε)/4, ¼√((1+ε)²−δ²)]` (the lower end keeps `f ≥ ½`, the
/// upper end keeps the matrix positive), and keep `|ρ₁₄| ≤ p₂₃` so the
/// state stays canonical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    /// Splits diagonal weight between the inner pair (|01⟩, |10⟩) and the
    /// outer pair (|00⟩, |11⟩).
    pub eps: f64,
    /// Imbalance of the outer diagonal pair.
    pub gamma: f64,
    /// Imbalance of the inner diagonal pair.
    pub delta: f64,
    /// Magnitude of the singlet coherence; the state carries `ρ₂₃ = −p₂₃`.
    pub p23: f64,
    /// Optional real coherence between |00⟩ and |11⟩.
    pub rho14: f64,
}

impl FamilyParams {
    /// Parameters with `ρ₁₄ = 0`.
    pub fn new(eps: f64, gamma: f64, delta: f64, p23: f64) -> FamilyParams {
        FamilyParams {
            eps,
            gamma,
            delta,
            p23,
            rho14: 0.0,
        }
    }

    /// The same parameters with the |00⟩⟨11| coherence set.
    pub fn with_rho14(mut self, rho14: f64) -> FamilyParams {
        self.rho14 = rho14;
        self
    }
}

/// The four one-sided damping variants. The names record which subsystem
/// the channel acts on and which outer diagonal entry feeds the gain:
/// `ρ₄₄` variants damp toward |0⟩, `ρ₁₁` variants damp toward |1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Damping toward |0⟩ on subsystem B; gain driven by `ρ₄₄ − ρ₂₂`.
    BFromRho44,
    /// Damping toward |0⟩ on subsystem A; gain driven by `ρ₄₄ − ρ₃₃`.
    AFromRho44,
    /// Damping toward |1⟩ on subsystem B; gain driven by `ρ₁₁ − ρ₃₃`.
    BFromRho11,
    /// Damping toward |1⟩ on subsystem A; gain driven by `ρ₁₁ − ρ₂₂`.
    AFromRho11,
}

impl Variant {
    /// All four variants, B-side first.
    pub const ALL: [Variant; 4] = [
        Variant::BFromRho44,
        Variant::AFromRho44,
        Variant::BFromRho11,
        Variant::AFromRho11,
    ];

    /// The subsystem the channel acts on.
    pub fn side(self) -> Subsystem {
        match self {
            Variant::BFromRho44 | Variant::BFromRho11 => Subsystem::B,
            Variant::AFromRho44 | Variant::AFromRho11 => Subsystem::A,
        }
    }

    /// The single-qubit channel at mixing angle θ.
    pub fn channel(self, theta: f64) -> Result<KrausChannel> {
        match self {
            Variant::BFromRho44 | Variant::AFromRho44 => amplitude_damping(theta),
            Variant::BFromRho11 | Variant::AFromRho11 => amplitude_damping_toward_one(theta),
        }
    }

    /// Stable label used in reports: `B-rho44`, `A-rho44`, `B-rho11`,
    /// `A-rho11`.
    pub fn label(self) -> &'static str {
        match self {
            Variant::BFromRho44 => "B-rho44",
            Variant::AFromRho44 => "A-rho44",
            Variant::BFromRho11 => "B-rho11",
            Variant::AFromRho11 => "A-rho11",
        }
    }

    fn diagonal_gap(self, view: &FamilyView) -> f64 {
        match self {
            Variant::BFromRho44 => view.r44 - view.r22,
            Variant::AFromRho44 => view.r44 - view.r33,
            Variant::BFromRho11 => view.r11 - view.r33,
            Variant::AFromRho11 => view.r11 - view.r22,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of [`best_improvement`].
#[derive(Debug, Clone)]
pub struct ImprovementReport {
    /// The damping variant selected by the max/min diagonal pairing.
    pub variant: Variant,
    /// Optimal mixing angle; 0 when the state is not improvable.
    pub theta_star: f64,
    /// Closed-form gain `Δ` at `theta_star`.
    pub predicted_delta: f64,
    /// The state after the channel is applied.
    pub transformed: TwoQubitState,
    /// Fully entangled fraction before.
    pub f_before: f64,
    /// Fully entangled fraction of `transformed`, recomputed from scratch.
    pub f_after_recomputed: f64,
}

struct FamilyView {
    r11: f64,
    r22: f64,
    r33: f64,
    r44: f64,
    p23: f64,
}

fn family_view(state: &TwoQubitState) -> Result<FamilyView> {
    let form_err = |detail: String| Error::NotFamilyForm { detail };
    for &(i, j) in &[(0, 1), (0, 2), (1, 3), (2, 3)] {
        if state.entry(i, j).norm() > FAMILY_FORM_TOL {
            return Err(form_err(format!(
                "entry ({}, {}) must vanish, found magnitude {:.3e}",
                i + 1,
                j + 1,
                state.entry(i, j).norm()
            )));
        }
    }
    let inner = state.entry(1, 2);
    let outer = state.entry(0, 3);
    if inner.im.abs() > FAMILY_FORM_TOL {
        return Err(form_err(format!("Im ρ₂₃ = {:.3e} must vanish", inner.im)));
    }
    if outer.im.abs() > FAMILY_FORM_TOL {
        return Err(form_err(format!("Im ρ₁₄ = {:.3e} must vanish", outer.im)));
    }
    if inner.re > FAMILY_FORM_TOL {
        return Err(form_err(format!(
            "ρ₂₃ = {:.3e} must be ≤ 0 in the canonical family",
            inner.re
        )));
    }
    let p23 = (-inner.re).max(0.0);
    if outer.re.abs() > p23 + FAMILY_FORM_TOL {
        return Err(form_err(format!(
            "|ρ₁₄| = {:.3e} exceeds p₂₃ = {:.3e}",
            outer.re.abs(),
            p23
        )));
    }
    let view = FamilyView {
        r11: state.entry(0, 0).re,
        r22: state.entry(1, 1).re,
        r33: state.entry(2, 2).re,
        r44: state.entry(3, 3).re,
        p23,
    };
    // The gain formula reads f off the singlet overlap, which is only the
    // fully entangled fraction while f ≥ ½.
    let regime = view.r22 + view.r33 + 2.0 * view.p23;
    if regime < 1.0 - FAMILY_FORM_TOL {
        return Err(form_err(format!(
            "ρ₂₂+ρ₃₃+2p₂₃ = {regime:.9} is below 1, outside the f ≥ ½ regime"
        )));
    }
    Ok(view)
}

/// Build the family member for the given parameters and validate it.
///
/// Fails with `BadDiagonal` when a derived diagonal entry is negative,
/// `PositivityBound` when `p₂₃` leaves its allowed interval, and
/// `OutOfRange` when `|ρ₁₄| > p₂₃`.
pub fn family_state(params: &FamilyParams) -> Result<TwoQubitState> {
    let diag = [
        (1.0 - params.eps - params.gamma) / 4.0,
        (1.0 + params.eps - params.delta) / 4.0,
        (1.0 + params.eps + params.delta) / 4.0,
        (1.0 - params.eps + params.gamma) / 4.0,
    ];
    for (k, &d) in diag.iter().enumerate() {
        if d < -1e-12 {
            return Err(Error::BadDiagonal {
                index: k + 1,
                value: d,
            });
        }
    }
    let lo = (1.0 - params.eps) / 4.0;
    let hi_sq = (1.0 + params.eps).powi(2) - params.delta.powi(2);
    let hi = 0.25 * hi_sq.max(0.0).sqrt();
    if params.p23 < lo - BOUND_SLACK || params.p23 > hi + BOUND_SLACK {
        return Err(Error::PositivityBound {
            p23: params.p23,
            lo,
            hi,
        });
    }
    if params.rho14.abs() > params.p23 + BOUND_SLACK {
        return Err(Error::OutOfRange {
            what: "rho14",
            value: params.rho14,
            lo: -params.p23,
            hi: params.p23,
        });
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for (k, &d) in diag.iter().enumerate() {
        m.set(k, k, Complex64::new(d, 0.0));
    }
    m.set(1, 2, Complex64::new(-params.p23, 0.0));
    m.set(2, 1, Complex64::new(-params.p23, 0.0));
    m.set(0, 3, Complex64::new(params.rho14, 0.0));
    m.set(3, 0, Complex64::new(params.rho14, 0.0));
    TwoQubitState::new(m)
}

/// Draw uniformly distributed valid family parameters with `ρ₁₄ = 0`.
///
/// `ε ~ U(0,1)`, `γ ~ U(−(1−ε), 1−ε)`, `δ ~ U(−2√ε, 2√ε)`, and `p₂₃`
/// uniform on its full allowed interval `[(1−ε)/4, ¼√((1+ε)²−δ²)]`. Every
/// draw satisfies the family constraints, so `family_state` accepts it and
/// the resulting state has `f ≥ ½`.
pub fn random_family_params<R: Rng>(rng: &mut R) -> FamilyParams {
    let eps: f64 = rng.gen();
    let gamma = (2.0 * rng.gen::<f64>() - 1.0) * (1.0 - eps);
    let delta = (2.0 * rng.gen::<f64>() - 1.0) * 2.0 * eps.sqrt();
    let lo = (1.0 - eps) / 4.0;
    let hi = 0.25 * ((1.0 + eps).powi(2) - delta.powi(2)).sqrt();
    let p23 = lo + rng.gen::<f64>() * (hi - lo);
    FamilyParams::new(eps, gamma, delta, p23)
}

/// Fully entangled fraction of a family state in the `f ≥ ½` regime, read
/// directly off the matrix entries: `f = (ρ₂₂+ρ₃₃)/2 + p₂₃`.
pub fn family_f(state: &TwoQubitState) -> Result<f64> {
    let view = family_view(state)?;
    Ok((view.r22 + view.r33) / 2.0 + view.p23)
}

/// The family member with `f = ½` and the largest achievable gain:
/// `½·[[0,0,0,0],[0,3−2√2,1−√2,0],[0,1−√2,1,0],[0,0,0,2√2−2]]`.
pub fn border_state() -> TwoQubitState {
    let s = std::f64::consts::SQRT_2;
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(1, 1, Complex64::new((3.0 - 2.0 * s) / 2.0, 0.0));
    m.set(2, 2, Complex64::new(0.5, 0.0));
    m.set(3, 3, Complex64::new(s - 1.0, 0.0));
    m.set(1, 2, Complex64::new((1.0 - s) / 2.0, 0.0));
    m.set(2, 1, Complex64::new((1.0 - s) / 2.0, 0.0));
    TwoQubitState::new(m).expect("border state entries form a valid state")
}

/// Gain in the fully entangled fraction from applying `variant` at angle
/// `theta` to a family state: `Δ(c) = (1−c)[(1+c)·gap/2 − p₂₃]` with
/// `c = cos θ`.
pub fn delta(state: &TwoQubitState, variant: Variant, theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::OutOfRange {
            what: "damping angle",
            value: theta,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let view = family_view(state)?;
    let c = theta.cos();
    Ok((1.0 - c) * ((1.0 + c) * variant.diagonal_gap(&view) / 2.0 - view.p23))
}

/// Optimal damping angle and gain for one specific variant, as
/// `(θ*, Δ*)`.
///
/// When the variant's diagonal gap `a` does not exceed `p₂₃` there is
/// nothing to gain and the result is `(0, 0)`; otherwise `cos θ* = p₂₃/a`
/// and `Δ* = (a−p₂₃)²/(2a)`.
pub fn variant_optimum(state: &TwoQubitState, variant: Variant) -> Result<(f64, f64)> {
    let view = family_view(state)?;
    Ok(optimum_from_gap(variant.diagonal_gap(&view), view.p23))
}

fn optimum_from_gap(a: f64, p23: f64) -> (f64, f64) {
    if a > p23 {
        let c = (p23 / a).clamp(0.0, 1.0);
        (c.acos(), (a - p23).powi(2) / (2.0 * a))
    } else {
        (0.0, 0.0)
    }
}

/// Whether any of the four variants can increase the fully entangled
/// fraction: true exactly when `max(ρ₁₁,ρ₄₄) − min(ρ₂₂,ρ₃₃) > p₂₃`.
pub fn improvable(state: &TwoQubitState) -> Result<bool> {
    let view = family_view(state)?;
    let a = view.r11.max(view.r44) - view.r22.min(view.r33);
    Ok(a - view.p23 > 0.0)
}

/// Pick the best variant and angle, apply the channel, and recompute the
/// fully entangled fraction of the result.
///
/// The variant pairs the larger of `ρ₁₁, ρ₄₄` with the smaller of
/// `ρ₂₂, ρ₃₃`; ties go to the `ρ₄₄`/B-side choice. When the state is not
/// improvable the report carries `theta_star = 0` and the identity action.
pub fn best_improvement(state: &TwoQubitState) -> Result<ImprovementReport> {
    let view = family_view(state)?;
    let variant = if view.r44 >= view.r11 {
        if view.r22 <= view.r33 {
            Variant::BFromRho44
        } else {
            Variant::AFromRho44
        }
    } else if view.r33 <= view.r22 {
        Variant::BFromRho11
    } else {
        Variant::AFromRho11
    };
    let (theta_star, predicted_delta) = optimum_from_gap(variant.diagonal_gap(&view), view.p23);
    let channel = variant.channel(theta_star)?;
    let transformed = apply_one_sided(state, &channel, variant.side());
    let f_before = fef_closed_form(state).value;
    let f_after_recomputed = fef_closed_form(&transformed).value;
    Ok(ImprovementReport {
        variant,
        theta_star,
        predicted_delta,
        transformed,
        f_before,
        f_after_recomputed,
    })
}

/// Independently confirm an improvement report.
///
/// Checks that the transformed state is still canonical with
/// `ρ₂₂+ρ₃₃ ≥ ½` and `det T ≤ 0` (the regime where the closed-form `f` is
/// read off the singlet overlap), then returns the brute-force fully
/// entangled fraction of the transformed state. Fails with `ConditionLost`
/// when the transformed state left that regime.
pub fn verify_improvement(report: &ImprovementReport) -> Result<f64> {
    let check = report.transformed.is_canonical();
    if !check.canonical {
        return Err(Error::ConditionLost {
            detail: format!(
                "transformed state is not canonical: {}",
                check.failures.join("; ")
            ),
        });
    }
    let inner = report.transformed.entry(1, 1).re + report.transformed.entry(2, 2).re;
    if inner < 0.5 - 1e-9 {
        return Err(Error::ConditionLost {
            detail: format!("transformed ρ₂₂+ρ₃₃ = {inner:.9} dropped below ½"),
        });
    }
    let det_t = det3(&report.transformed.hilbert_schmidt().t);
    if det_t > 1e-9 {
        return Err(Error::ConditionLost {
            detail: format!("transformed correlation determinant {det_t:.3e} is positive"),
        });
    }
    Ok(fef_bruteforce(
        &report.transformed,
        DEFAULT_GRID_STEPS,
        DEFAULT_REFINE_ITERS,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::reduction_check;
    use crate::fef::singlet_fraction;
    use crate::state::singlet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn random_family(rng: &mut ChaCha8Rng, with_rho14: bool) -> (FamilyParams, TwoQubitState) {
        loop {
            let mut params = random_family_params(rng);
            if with_rho14 {
                let r11 = (1.0 - params.eps - params.gamma) / 4.0;
                let r44 = (1.0 - params.eps + params.gamma) / 4.0;
                let cap = params.p23.min((r11 * r44).sqrt()) * 0.9;
                params = params.with_rho14((2.0 * rng.gen::<f64>() - 1.0) * cap);
            }
            if let Ok(state) = family_state(&params) {
                return (params, state);
            }
        }
    }

    #[test]
    fn family_limit_reproduces_singlet() {
        let state = family_state(&FamilyParams::new(1.0, 0.0, 0.0, 0.5)).unwrap();
        let pure = TwoQubitState::from_pure(&singlet());
        assert!(state.matrix().max_abs_diff(pure.matrix()) < 1e-15);
        assert!((family_f(&state).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn family_f_simple_point() {
        let state = family_state(&FamilyParams::new(0.2, 0.0, 0.0, 0.25)).unwrap();
        let f = family_f(&state).unwrap();
        assert!((f - 0.55).abs() < 1e-12);
        assert!((singlet_fraction(&state) - f).abs() < 1e-12);
        assert!((fef_closed_form(&state).value - f).abs() < 1e-10);
    }

    #[test]
    fn family_f_matches_fef_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for k in 0..60 {
            let (_, state) = random_family(&mut rng, k % 3 == 0);
            let f = family_f(&state).unwrap();
            assert!((singlet_fraction(&state) - f).abs() < 1e-12);
            let result = fef_closed_form(&state);
            assert!((result.value - f).abs() < 1e-10);
            assert!(result.attained_on_singlet);
            assert!(state.is_canonical().canonical);
        }
    }

    #[test]
    fn border_parameters_match_entries() {
        let params = FamilyParams::new(
            3.0 - 2.0 * SQRT2,
            2.0 * SQRT2 - 2.0,
            2.0 * SQRT2 - 2.0,
            (SQRT2 - 1.0) / 2.0,
        );
        let state = family_state(&params).unwrap();
        assert!(state.matrix().max_abs_diff(border_state().matrix()) < 1e-15);
    }

    #[test]
    fn border_state_shape() {
        let state = border_state();
        let mut trace = 0.0;
        for k in 0..4 {
            trace += state.entry(k, k).re;
        }
        assert!((trace - 1.0).abs() < 1e-15);
        assert!(state.is_canonical().canonical);
        assert!((family_f(&state).unwrap() - 0.5).abs() < 1e-12);
        let result = fef_closed_form(&state);
        assert!((result.value - 0.5).abs() < 1e-12);
        assert!(result.attained_on_singlet);
        let spectrum = crate::linalg::hermitian_eig(state.matrix()).unwrap();
        let expected = [0.0, 0.0, SQRT2 - 1.0, 2.0 - SQRT2];
        for (have, want) in spectrum.eigenvalues.iter().zip(expected.iter()) {
            assert!((have - want).abs() < 1e-9);
        }
    }

    #[test]
    fn parameter_bounds_are_enforced() {
        let above = FamilyParams::new(0.2, 0.0, 0.0, 0.35);
        assert!(matches!(
            family_state(&above),
            Err(Error::PositivityBound { .. })
        ));
        let below = FamilyParams::new(0.2, 0.0, 0.0, 0.1);
        assert!(matches!(
            family_state(&below),
            Err(Error::PositivityBound { .. })
        ));
        let negative_diag = FamilyParams::new(0.0, 1.5, 0.0, 0.25);
        assert!(matches!(
            family_state(&negative_diag),
            Err(Error::BadDiagonal { .. })
        ));
    }

    #[test]
    fn rho14_bounds_are_enforced() {
        let base = FamilyParams::new(0.2, 0.0, 0.0, 0.25);
        let ok = family_state(&base.with_rho14(0.1)).unwrap();
        assert!(ok.is_canonical().canonical);
        assert!((family_f(&ok).unwrap() - 0.55).abs() < 1e-12);
        assert!((fef_closed_form(&ok).value - 0.55).abs() < 1e-10);
        // With γ = 0.4 the outer diagonal is (0.1, 0.3), so ρ₁₄ = 0.2 passes
        // the canonical bound |ρ₁₄| ≤ p₂₃ but breaks positivity.
        let skewed = FamilyParams::new(0.2, 0.4, 0.0, 0.25);
        assert!(matches!(
            family_state(&skewed.with_rho14(0.2)),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            family_state(&base.with_rho14(0.3)),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn delta_vanishes_at_theta_zero() {
        let state = border_state();
        for variant in Variant::ALL {
            assert!(delta(&state, variant, 0.0).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn delta_matches_channel_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for k in 0..40 {
            let (_, state) = random_family(&mut rng, k % 4 == 0);
            let theta = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
            for variant in Variant::ALL {
                let predicted = delta(&state, variant, theta).unwrap();
                let out = apply_one_sided(&state, &variant.channel(theta).unwrap(), variant.side());
                let actual = singlet_fraction(&out) - singlet_fraction(&state);
                assert!(
                    (predicted - actual).abs() < 1e-10,
                    "variant {variant} predicted {predicted} actual {actual}"
                );
            }
        }
    }

    #[test]
    fn border_best_improvement_constants() {
        let report = best_improvement(&border_state()).unwrap();
        assert_eq!(report.variant, Variant::BFromRho44);
        let cos_star = report.theta_star.cos();
        assert!((cos_star - (SQRT2 - 1.0) / (4.0 * SQRT2 - 5.0)).abs() < 1e-12);
        assert!((cos_star - 0.6306019374818705).abs() < 1e-12);
        assert!((report.predicted_delta - 0.0224077499274828).abs() < 1e-12);
        assert!((report.f_before - 0.5).abs() < 1e-12);
        assert!((report.f_after_recomputed - 0.522407749927483).abs() < 1e-9);
        assert!(
            (report.f_after_recomputed - report.f_before - report.predicted_delta).abs() < 1e-9
        );
    }

    #[test]
    fn singlet_cannot_be_improved() {
        let state = family_state(&FamilyParams::new(1.0, 0.0, 0.0, 0.5)).unwrap();
        assert!(!improvable(&state).unwrap());
        let report = best_improvement(&state).unwrap();
        assert_eq!(report.theta_star, 0.0);
        assert_eq!(report.predicted_delta, 0.0);
        assert!(report.transformed.matrix().max_abs_diff(state.matrix()) < 1e-12);
        for variant in Variant::ALL {
            assert!(delta(&state, variant, 0.7).unwrap() < 0.0);
        }
        assert!((verify_improvement(&report).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn counterexample_gains_nothing_anywhere() {
        // ½·ψ₋ψ₋† + ½·|00⟩⟨00| sits exactly on the improvability boundary.
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 0, Complex64::new(0.5, 0.0));
        m.set(1, 1, Complex64::new(0.25, 0.0));
        m.set(2, 2, Complex64::new(0.25, 0.0));
        m.set(1, 2, Complex64::new(-0.25, 0.0));
        m.set(2, 1, Complex64::new(-0.25, 0.0));
        let state = TwoQubitState::new(m).unwrap();
        assert!(!improvable(&state).unwrap());
        for variant in Variant::ALL {
            for k in 0..=1000 {
                let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 1000.0;
                assert!(delta(&state, variant, theta).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn gap_below_p23_is_not_improvable() {
        let state = family_state(&FamilyParams::new(0.1, 0.8, 0.0, 0.225)).unwrap();
        assert!(!improvable(&state).unwrap());
        let report = best_improvement(&state).unwrap();
        assert_eq!(report.theta_star, 0.0);
        assert_eq!(report.predicted_delta, 0.0);
    }

    #[test]
    fn random_params_always_valid_and_above_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..300 {
            let params = random_family_params(&mut rng);
            let state = family_state(&params).unwrap();
            assert!(family_f(&state).unwrap() >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn variant_optimum_matches_delta_and_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..40 {
            let (_, state) = random_family(&mut rng, false);
            let report = best_improvement(&state).unwrap();
            let mut top = f64::NEG_INFINITY;
            for variant in Variant::ALL {
                let (theta, gain) = variant_optimum(&state, variant).unwrap();
                assert!((delta(&state, variant, theta).unwrap() - gain).abs() < 1e-12);
                top = top.max(gain);
            }
            assert!((top - report.predicted_delta).abs() < 1e-12);
        }
    }

    #[test]
    fn best_improvement_beats_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut states = vec![border_state()];
        while states.len() < 6 {
            let (_, state) = random_family(&mut rng, false);
            if improvable(&state).unwrap() {
                states.push(state);
            }
        }
        for state in &states {
            let report = best_improvement(state).unwrap();
            let mut grid_best = f64::NEG_INFINITY;
            for variant in Variant::ALL {
                for k in 0..=10_000 {
                    let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 10_000.0;
                    grid_best = grid_best.max(delta(state, variant, theta).unwrap());
                }
            }
            assert!((grid_best - report.predicted_delta).abs() < 1e-6);
        }
    }

    #[test]
    fn gain_has_unique_interior_maximum() {
        let state = border_state();
        let report = best_improvement(&state).unwrap();
        let c_star = report.theta_star.cos();
        let gain = |c: f64| {
            let view_p23 = (SQRT2 - 1.0) / 2.0;
            let a = (4.0 * SQRT2 - 5.0) / 2.0;
            (1.0 - c) * ((1.0 + c) * a / 2.0 - view_p23)
        };
        for k in 0..=1000 {
            let c = k as f64 / 1000.0;
            assert!(gain(c) <= gain(c_star) + 1e-15);
        }
        for k in 1..=1000 {
            let c = k as f64 / 1000.0;
            let prev = (k - 1) as f64 / 1000.0;
            if c <= c_star - 1e-3 {
                assert!(gain(c) > gain(prev));
            }
            if prev >= c_star + 1e-3 {
                assert!(gain(c) < gain(prev));
            }
        }
        assert!((gain(c_star) - report.predicted_delta).abs() < 1e-15);
    }

    #[test]
    fn improvement_implies_reduction_violation() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut improved = 0;
        for _ in 0..200 {
            let (_, state) = random_family(&mut rng, false);
            let report = best_improvement(&state).unwrap();
            if report.f_after_recomputed > 0.5 + 1e-9 {
                improved += 1;
                let reduction = reduction_check(&state);
                let violated = match report.variant.side() {
                    Subsystem::A => reduction.violated_a,
                    Subsystem::B => reduction.violated_b,
                };
                assert!(violated, "improved past ½ without reduction violation");
            }
        }
        assert!(improved > 20, "sweep produced too few improved states");
    }

    #[test]
    fn verify_improvement_confirms_border_gain() {
        let report = best_improvement(&border_state()).unwrap();
        let brute = verify_improvement(&report).unwrap();
        assert!((brute - report.f_after_recomputed).abs() < 1e-4);
        assert!((brute - 0.5224).abs() < 2e-4);
    }

    #[test]
    fn verify_improvement_on_random_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let mut checked = 0;
        while checked < 25 {
            let (_, state) = random_family(&mut rng, false);
            if !improvable(&state).unwrap() {
                continue;
            }
            checked += 1;
            let report = best_improvement(&state).unwrap();
            match verify_improvement(&report) {
                Ok(brute) => {
                    assert!((brute - report.f_after_recomputed).abs() < 1e-4);
                    assert!(
                        (report.f_after_recomputed - report.f_before - report.predicted_delta)
                            .abs()
                            < 1e-9
                    );
                }
                Err(Error::ConditionLost { .. }) => {}
                Err(other) => panic!("unexpected error {other}"),
            }
        }
    }
}
