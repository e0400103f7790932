//! Seeded random generators for states, unitaries, and measurement inputs.
//!
//! Everything takes the generator by argument so callers control seeding;
//! all demo and test entry points use `ChaCha8Rng` with fixed seeds to stay
//! reproducible across platforms.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, ComplexMatrix};
use crate::state::TwoQubitState;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One draw from the standard normal distribution.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex standard normal entry (real and imaginary parts independent).
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(standard_normal(rng), standard_normal(rng))
}

/// Random full-rank density matrix `G G† / Tr(G G†)` with `G` a 4x4 matrix
/// of independent complex normals (the Ginibre construction).
pub fn ginibre_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let mut g = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            g.set(i, j, complex_normal(rng));
        }
    }
    let gg = g.mul(&g.dagger());
    let tr = gg.trace().re;
    TwoQubitState::from_valid(gg.scale_re(1.0 / tr))
}

/// Haar-random single-qubit pure state.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 2] {
    loop {
        let v = [complex_normal(rng), complex_normal(rng)];
        let n = vec_norm(&v);
        if n > 1e-12 {
            return [v[0] / c(n, 0.0), v[1] / c(n, 0.0)];
        }
    }
}

/// Haar-random two-qubit pure state vector.
pub fn haar_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    loop {
        let v = [
            complex_normal(rng),
            complex_normal(rng),
            complex_normal(rng),
            complex_normal(rng),
        ];
        let n = vec_norm(&v);
        if n > 1e-12 {
            return [
                v[0] / c(n, 0.0),
                v[1] / c(n, 0.0),
                v[2] / c(n, 0.0),
                v[3] / c(n, 0.0),
            ];
        }
    }
}

/// Projector onto a Haar-random two-qubit pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    TwoQubitState::from_pure(&haar_two_qubit(rng))
}

/// Haar-random element of SU(2) via a uniform unit quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let q: [f64; 4] = loop {
        let q = [
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        ];
        let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if n > 1e-12 {
            break [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        }
    };
    // U = w I - i (x σ1 + y σ2 + z σ3)
    ComplexMatrix::from_rows(&[
        vec![c(q[0], -q[3]), c(-q[2], -q[1])],
        vec![c(q[2], -q[1]), c(q[0], q[3])],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ginibre_states_are_valid_and_full_rank() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let state = ginibre_state(&mut rng);
            let sp = crate::linalg::hermitian_eig(state.matrix()).unwrap();
            assert!(sp.min_eigenvalue() > 0.0);
            assert!((state.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_su2_is_unitary_with_unit_determinant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let u = random_su2(&mut rng);
            assert!(u.unitary_deviation() < 1e-12);
            let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
            assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn haar_qubit_is_normalized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = haar_qubit(&mut rng);
            assert!((vec_norm(&v) - 1.0).abs() < 1e-12);
        }
    }
}
