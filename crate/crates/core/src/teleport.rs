//! The standard teleportation scheme as an effective single-qubit channel.
//!
//! Teleporting through a resource state ρ (Bell measurement on the input
//! and Alice's half, Pauli correction on Bob's half) acts on the input
//! qubit as a channel `Λ(φφ†) = Σᵢ Uᵢ Tr_CA[(Pᵢ⊗I)(φφ†⊗ρ)] Uᵢ†` with the
//! Bell projectors `Pᵢ` and corrections `{I, σ₃, σ₁, σ₃σ₁}` fixed so that
//! the singlet resource teleports perfectly. The module builds that channel
//! in Kraus form from the eigendecomposition of ρ, exposes its Bloch-sphere
//! action `v ↦ M v + c`, and evaluates the average teleportation fidelity
//! both exactly, `F = ½ + Tr(M)/6`, and by Monte Carlo over Haar-random
//! input states.

use crate::error::{Error, Result};
use crate::linalg::{expectation, hermitian_eig, outer, pauli, ComplexMatrix};
use crate::sample::haar_qubit;
use crate::state::{phi_minus, phi_plus, psi_plus, singlet, TwoQubitState};
use num_complex::Complex64;

/// Eigenvalues of the resource below this weight are dropped from the
/// Kraus expansion.
const RESOURCE_RANK_CUTOFF: f64 = 1e-12;

/// Completeness tolerance for `Σ K†K = I`.
const TRACE_PRESERVING_TOL: f64 = 1e-9;

/// A single-qubit channel in Kraus form together with its action on the
/// Bloch sphere, `v ↦ bloch_m·v + bloch_c`.
#[derive(Debug, Clone)]
pub struct QubitChannel {
    /// Kraus operators, 2×2, satisfying `Σ K†K = I` within 1e-9.
    pub kraus: Vec<ComplexMatrix>,
    /// Linear part of the Bloch action.
    pub bloch_m: [[f64; 3]; 3],
    /// Translation part of the Bloch action.
    pub bloch_c: [f64; 3],
}

impl QubitChannel {
    /// Wrap a Kraus family, checking completeness and deriving the Bloch
    /// representation from it.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<QubitChannel> {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for k in &kraus {
            if k.rows() != 2 || k.cols() != 2 {
                return Err(Error::DimensionMismatch {
                    expected_rows: 2,
                    expected_cols: 2,
                    rows: k.rows(),
                    cols: k.cols(),
                });
            }
            sum = sum.add(&k.dagger().mul(k));
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(2));
        if deviation > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        let apply = |m: &ComplexMatrix| -> ComplexMatrix {
            let mut out = ComplexMatrix::zeros(2, 2);
            for k in &kraus {
                out = out.add(&k.mul(m).mul(&k.dagger()));
            }
            out
        };
        let half_identity = ComplexMatrix::identity(2).scale_re(0.5);
        let image_of_mixed = apply(&half_identity);
        let mut bloch_c = [0.0; 3];
        let mut bloch_m = [[0.0; 3]; 3];
        for n in 0..3 {
            bloch_c[n] = pauli(n + 1).mul(&image_of_mixed).trace().re;
        }
        for m in 0..3 {
            let image = apply(&pauli(m + 1).scale_re(0.5));
            for n in 0..3 {
                bloch_m[n][m] = pauli(n + 1).mul(&image).trace().re;
            }
        }
        Ok(QubitChannel {
            kraus,
            bloch_m,
            bloch_c,
        })
    }

    /// Apply the channel to a 2×2 density matrix.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for k in &self.kraus {
            out = out.add(&k.mul(m).mul(&k.dagger()));
        }
        out
    }
}

/// The effective channel of standard teleportation through the resource
/// state `rho`.
///
/// With the resource eigendecomposition `ρ = Σ λ_m χ_m χ_m†`, the Kraus
/// operators are `K_{i,m} = √λ_m · Uᵢ · L_{i,m}` where
/// `L_{i,m}[b][c] = Σ_a conj(βᵢ[2c+a]) χ_m[2a+b]` contracts the Bell vector
/// `βᵢ` with the eigenvector over the measured qubits. At most 16 operators
/// are produced.
pub fn sts_channel(rho: &TwoQubitState) -> QubitChannel {
    let spectrum = hermitian_eig(rho.matrix()).expect("density matrix is Hermitian");
    let bells: [[Complex64; 4]; 4] = [singlet(), psi_plus(), phi_minus(), phi_plus()];
    let corrections = [
        ComplexMatrix::identity(2),
        pauli(3),
        pauli(1),
        pauli(3).mul(&pauli(1)),
    ];
    let mut kraus = Vec::new();
    for (bell, correction) in bells.iter().zip(&corrections) {
        for (m, &lambda) in spectrum.eigenvalues.iter().enumerate() {
            if lambda < RESOURCE_RANK_CUTOFF {
                continue;
            }
            let chi = spectrum.eigenvector(m);
            let mut l = ComplexMatrix::zeros(2, 2);
            for b in 0..2 {
                for cc in 0..2 {
                    let mut entry = Complex64::new(0.0, 0.0);
                    for a in 0..2 {
                        entry += bell[2 * cc + a].conj() * chi[2 * a + b];
                    }
                    l.set(b, cc, entry);
                }
            }
            kraus.push(correction.mul(&l).scale_re(lambda.sqrt()));
        }
    }
    QubitChannel::new(kraus).expect("teleportation channel is trace preserving")
}

/// Average teleportation fidelity over Haar-random pure inputs, in closed
/// form: `F = ½ + Tr(bloch_m)/6`.
pub fn average_fidelity_exact(channel: &QubitChannel) -> f64 {
    let trace = channel.bloch_m[0][0] + channel.bloch_m[1][1] + channel.bloch_m[2][2];
    0.5 + trace / 6.0
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fidelity_sums(channel: &QubitChannel, range: std::ops::Range<u64>, seed: u64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for index in range {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(sample_seed(seed, index));
        let psi = haar_qubit(&mut rng);
        let fidelity = expectation(&channel.apply(&outer(&psi)), &psi);
        sum += fidelity;
        sum_sq += fidelity * fidelity;
    }
    (sum, sum_sq)
}

/// Monte Carlo estimate of the average fidelity from `samples` Haar-random
/// pure inputs. Each sample draws from its own stream derived from
/// `(seed, sample index)`, so the estimate is reproducible and independent
/// of how the index range is split across workers.
pub fn average_fidelity_mc(channel: &QubitChannel, samples: usize, seed: u64) -> McEstimate {
    average_fidelity_mc_with_workers(channel, samples, seed, 1)
}

/// [`average_fidelity_mc`] with the index range split across `workers`
/// threads. The mean agrees with the single-threaded estimate up to
/// floating-point reduction order (1e-12).
pub fn average_fidelity_mc_with_workers(
    channel: &QubitChannel,
    samples: usize,
    seed: u64,
    workers: usize,
) -> McEstimate {
    assert!(samples > 0, "at least one sample is required");
    let workers = workers.clamp(1, samples);
    let n = samples as u64;
    let chunk = n.div_ceil(workers as u64);
    let (sum, sum_sq) = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers as u64 {
            let start = w * chunk;
            let end = ((w + 1) * chunk).min(n);
            handles.push(scope.spawn(move || fidelity_sums(channel, start..end, seed)));
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for handle in handles {
            let (s, sq) = handle.join().expect("worker thread panicked");
            sum += s;
            sum_sq += sq;
        }
        (sum, sum_sq)
    });
    let count = samples as f64;
    let mean = sum / count;
    let stderr = if samples > 1 {
        let variance = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
        (variance / count).sqrt()
    } else {
        0.0
    };
    McEstimate { mean, stderr }
}

use rand::SeedableRng;
