//! Dense complex matrices and the eigensolvers the rest of the crate builds on.
//!
//! Everything here is sized for small systems: density matrices are 4x4, qubit
//! operators are 2x2, and the embedded real eigenproblem never exceeds 8x8. The
//! hermitian solver runs a cyclic Jacobi sweep on the real embedding
//! `[[A, -B], [B, A]]` of `H = A + iB`, which is foolproof for symmetric input
//! and needs no pivoting or shift heuristics at these sizes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which tensor factor of a two-qubit system an operation acts on or traces out.
///
/// Subsystem `A` is the first factor (row-block index), `B` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl std::fmt::Display for Subsystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Subsystem::A => write!(f, "A"),
            Subsystem::B => write!(f, "B"),
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Build from a real row-major array.
    pub fn from_real(rows: usize, cols: usize, re: &[f64]) -> Self {
        assert_eq!(re.len(), rows * cols);
        Self {
            rows,
            cols,
            data: re.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// Matrix product `self * other`; panics on incompatible shapes.
    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product; panics on incompatible length.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    /// Real scalar multiple.
    pub fn scale_re(&self, c: f64) -> ComplexMatrix {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Trace; panics if not square.
    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose; 0 for exactly
    /// hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Largest deviation of `self† self` from the identity; 0 for exactly
    /// unitary matrices.
    pub fn unitary_deviation(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.cols))
    }

    /// Real part of `Tr(self† other)`, the Hilbert-Schmidt inner product.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a.conj() * b).re)
            .sum()
    }
}

/// Pauli matrix σ_n for `n` in 1..=3 (x, y, z).
pub fn pauli(n: usize) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match n {
        1 => ComplexMatrix::from_rows(&[vec![z, one], vec![one, z]]),
        2 => ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]),
        3 => ComplexMatrix::from_rows(&[vec![one, z], vec![z, -one]]),
        _ => panic!("pauli index must be 1, 2, or 3"),
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Partial trace of a 4x4 two-qubit operator, keeping the named subsystem.
///
/// `partial_trace(m, Subsystem::A)` traces out `B` and returns the reduced
/// 2x2 operator on `A`, and vice versa. The full trace is preserved.
pub fn partial_trace(m: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected_rows: 4,
            expected_cols: 4,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                let v = match keep {
                    // Σ_k ⟨i k| m |j k⟩
                    Subsystem::A => m.get(2 * i + k, 2 * j + k),
                    // Σ_k ⟨k i| m |k j⟩
                    Subsystem::B => m.get(2 * k + i, 2 * k + j),
                };
                acc += v;
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Inner product `⟨a|b⟩` with conjugation on the first argument.
pub fn vec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank-one projector `|v⟩⟨v|`.
pub fn outer(v: &[Complex64]) -> ComplexMatrix {
    let n = v.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, v[i] * v[j].conj());
        }
    }
    out
}

/// Expectation value `⟨v| m |v⟩`, real part.
pub fn expectation(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    vec_inner(v, &m.mul_vec(v)).re
}

/// Eigendecomposition of a hermitian matrix.
///
/// Eigenvalues ascend; `eigenvectors` holds the matching orthonormal
/// eigenvectors as columns. `Σ λᵢ |vᵢ⟩⟨vᵢ|` reconstructs the input to 1e-8
/// and the eigenvector Gram matrix equals the identity to 1e-9.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Column `k` as an owned vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }

    /// `Σ λᵢ |vᵢ⟩⟨vᵢ|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let v = self.eigenvector(k);
            out = out.add(&outer(&v).scale_re(self.eigenvalues[k]));
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of a real symmetric matrix given row-major.
/// Returns unsorted eigenvalues and the accumulated rotation matrix (columns
/// are eigenvectors), also row-major.
pub(crate) fn jacobi_symmetric(n: usize, a_in: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = a_in.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // After a few sweeps, entries negligible against both diagonal
                // neighbors are snapped to zero outright.
                if sweep > 3
                    && a[p * n + p].abs() + g == a[p * n + p].abs()
                    && a[q * n + q].abs() + g == a[q * n + q].abs()
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }
                let h = a[q * n + q] - a[p * n + p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let delta = t * apq;
                a[p * n + p] -= delta;
                a[q * n + q] += delta;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                let rot = |x: &mut f64, y: &mut f64| {
                    let (xo, yo) = (*x, *y);
                    *x = xo - s * (yo + tau * xo);
                    *y = yo + s * (xo - tau * yo);
                };
                for k in 0..p {
                    let (mut x, mut y) = (a[k * n + p], a[k * n + q]);
                    rot(&mut x, &mut y);
                    a[k * n + p] = x;
                    a[p * n + k] = x;
                    a[k * n + q] = y;
                    a[q * n + k] = y;
                }
                for k in (p + 1)..q {
                    let (mut x, mut y) = (a[p * n + k], a[k * n + q]);
                    rot(&mut x, &mut y);
                    a[p * n + k] = x;
                    a[k * n + p] = x;
                    a[k * n + q] = y;
                    a[q * n + k] = y;
                }
                for k in (q + 1)..n {
                    let (mut x, mut y) = (a[p * n + k], a[q * n + k]);
                    rot(&mut x, &mut y);
                    a[p * n + k] = x;
                    a[k * n + p] = x;
                    a[q * n + k] = y;
                    a[k * n + q] = y;
                }
                for k in 0..n {
                    let (mut x, mut y) = (v[k * n + p], v[k * n + q]);
                    rot(&mut x, &mut y);
                    v[k * n + p] = x;
                    v[k * n + q] = y;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[i * n + i]).collect();
    (evals, v)
}

/// Tolerance for accepting a matrix as hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigendecomposition of a hermitian matrix via its real embedding.
///
/// `H = A + iB` embeds as the symmetric `2n x 2n` matrix `[[A, -B], [B, A]]`
/// whose spectrum is that of `H` with every eigenvalue doubled: if `H v = λ v`
/// with `v = x + iy`, both `[x; y]` and `[-y; x]` are real eigenvectors for
/// `λ`. The doubled pairs are collapsed back to complex eigenvectors by a
/// pivoted Gram-Schmidt pass inside each eigenvalue cluster.
///
/// Errors with [`Error::NonHermitian`] when the deviation from conjugate
/// symmetry exceeds [`HERMITIAN_TOL`].
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation: dev });
    }
    // Symmetrize exactly so the embedding is symmetric to machine precision.
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let avg = (m.get(i, j) + m.get(j, i).conj()) * Complex64::new(0.5, 0.0);
            h.set(i, j, avg);
        }
    }
    let dim = 2 * n;
    let mut e = vec![0.0; dim * dim];
    for i in 0..n {
        for j in 0..n {
            let hij = h.get(i, j);
            e[i * dim + j] = hij.re;
            e[i * dim + (j + n)] = -hij.im;
            e[(i + n) * dim + j] = hij.im;
            e[(i + n) * dim + (j + n)] = hij.re;
        }
    }
    let (evals, evecs) = jacobi_symmetric(dim, &e);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));

    let scale = evals.iter().fold(1.0f64, |acc, &x| acc.max(x.abs()));
    let cluster_tol = 1e-9 * scale;

    // Partition the sorted doubled spectrum into clusters of near-equal values.
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=dim {
        if i == dim || evals[order[i]] - evals[order[i - 1]] > cluster_tol {
            clusters.push((start, i));
            start = i;
        }
    }
    // Doubled multiplicities make every cluster even; merge forward if
    // rounding ever splits one.
    let mut fixed: Vec<(usize, usize)> = Vec::new();
    let mut carry: Option<usize> = None;
    for &(a, b) in &clusters {
        let a = carry.take().unwrap_or(a);
        if (b - a) % 2 == 1 && b < dim {
            carry = Some(a);
        } else {
            fixed.push((a, b));
        }
    }
    if let Some(a) = carry {
        fixed.push((a, dim));
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for &(a, b) in &fixed {
        let want = (b - a) / 2;
        let mut cands: Vec<Vec<Complex64>> = (a..b)
            .map(|s| {
                let col = order[s];
                (0..n)
                    .map(|i| Complex64::new(evecs[i * dim + col], evecs[(i + n) * dim + col]))
                    .collect()
            })
            .collect();
        let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(want);
        for _ in 0..want {
            let mut best: Option<(f64, Vec<Complex64>)> = None;
            for cand in &cands {
                let mut u = cand.clone();
                for w in &accepted {
                    let ov = vec_inner(w, &u);
                    for (ui, wi) in u.iter_mut().zip(w) {
                        *ui -= ov * wi;
                    }
                }
                let r = vec_norm(&u);
                if best.as_ref().map_or(true, |(br, _)| r > *br) {
                    best = Some((r, u));
                }
            }
            let (r, u) = best.expect("cluster candidates exhausted");
            let v: Vec<Complex64> = u.iter().map(|&x| x / Complex64::new(r, 0.0)).collect();
            // Drop the consumed direction so later pivots stay well conditioned.
            cands.retain(|c| {
                let mut u = c.clone();
                let ov = vec_inner(&v, &u);
                for (ui, vi) in u.iter_mut().zip(&v) {
                    *ui -= ov * vi;
                }
                vec_norm(&u) > 1e-12
            });
            accepted.push(v);
        }
        for v in accepted {
            let lam = expectation(&h, &v);
            pairs.push((lam, v));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, (lam, v)) in pairs.into_iter().enumerate() {
        eigenvalues.push(lam);
        for i in 0..n {
            eigenvectors.set(i, k, v[i]);
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_algebra() {
        let sx = pauli(1);
        let sy = pauli(2);
        let sz = pauli(3);
        // σ1 σ2 = i σ3
        let prod = sx.mul(&sy);
        assert!(prod.max_abs_diff(&sz.scale(c(0.0, 1.0))) < 1e-15);
        for n in 1..=3 {
            let s = pauli(n);
            assert!(s.mul(&s).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
            assert!(s.hermitian_deviation() < 1e-15);
            assert!(s.trace().norm() < 1e-15);
        }
    }

    #[test]
    fn kron_shapes_and_values() {
        let sx = pauli(1);
        let sz = pauli(3);
        let k = kron(&sz, &sx);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        // σ3 ⊗ σ1 has +σ1 in the upper-left block and -σ1 in the lower-right.
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(1, 0), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(-1.0, 0.0));
        assert_eq!(k.get(3, 2), c(-1.0, 0.0));
        assert_eq!(k.get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.7, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.3, 0.0)],
        ]);
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.4, 0.0), c(0.0, -0.1)],
            vec![c(0.0, 0.1), c(0.6, 0.0)],
        ]);
        let prod = kron(&a, &b);
        let on_a = partial_trace(&prod, Subsystem::A).unwrap();
        let on_b = partial_trace(&prod, Subsystem::B).unwrap();
        // Tr a = Tr b = 1, so keeping one subsystem recovers its factor.
        assert!(on_a.max_abs_diff(&a) < 1e-14);
        assert!(on_b.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn partial_trace_of_singlet_is_maximally_mixed() {
        let s = 1.0 / 2.0f64.sqrt();
        let psi = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        let p = outer(&psi);
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(partial_trace(&p, Subsystem::A).unwrap().max_abs_diff(&half) < 1e-14);
        assert!(partial_trace(&p, Subsystem::B).unwrap().max_abs_diff(&half) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_wrong_shape() {
        let m = ComplexMatrix::identity(3);
        assert!(matches!(
            partial_trace(&m, Subsystem::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_of_diagonal() {
        let m = ComplexMatrix::diag(&[0.3, -0.1, 0.5, 0.3]);
        let sp = hermitian_eig(&m).unwrap();
        let expect = [-0.1, 0.3, 0.3, 0.5];
        for (got, want) in sp.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(sp.reconstruct().max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn eig_of_singlet_projector() {
        let s = 1.0 / 2.0f64.sqrt();
        let psi = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        let p = outer(&psi);
        let sp = hermitian_eig(&p).unwrap();
        let expect = [0.0, 0.0, 0.0, 1.0];
        for (got, want) in sp.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-10);
        }
        // Top eigenvector spans the singlet line.
        let top = sp.eigenvector(3);
        let overlap = vec_inner(&top, &psi).norm();
        assert!((overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn eig_handles_complex_entries() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(2.0, 0.0)],
        ]);
        let sp = hermitian_eig(&m).unwrap();
        // Analytic eigenvalues 1.5 ∓ sqrt(0.5).
        let r = 0.5f64.sqrt();
        assert!((sp.eigenvalues[0] - (1.5 - r)).abs() < 1e-12);
        assert!((sp.eigenvalues[1] - (1.5 + r)).abs() < 1e-12);
        assert!(sp.reconstruct().max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.2, 0.0)],
            vec![c(0.7, 0.0), c(1.0, 0.0)],
        ]);
        match hermitian_eig(&m) {
            Err(Error::NonHermitian { deviation }) => assert!((deviation - 0.5).abs() < 1e-12),
            other => panic!("expected NonHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_random_hermitian_reconstruction_and_gram() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let mut g = ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    g.set(i, j, c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
                }
            }
            let h = g.add(&g.dagger()).scale_re(0.5);
            let sp = hermitian_eig(&h).unwrap();
            assert!(sp.reconstruct().max_abs_diff(&h) < 1e-8);
            for k in 0..4 {
                for l in 0..4 {
                    let want = if k == l { 1.0 } else { 0.0 };
                    let got = vec_inner(&sp.eigenvector(k), &sp.eigenvector(l));
                    assert!((got - c(want, 0.0)).norm() < 1e-9);
                }
            }
            for k in 1..4 {
                assert!(sp.eigenvalues[k] >= sp.eigenvalues[k - 1]);
            }
        }
    }

    #[test]
    fn eig_degenerate_rank_one_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let mut v: Vec<Complex64> = (0..4)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let nrm = vec_norm(&v);
            for x in v.iter_mut() {
                *x /= c(nrm, 0.0);
            }
            let p = outer(&v);
            let sp = hermitian_eig(&p).unwrap();
            assert!(sp.reconstruct().max_abs_diff(&p) < 1e-8);
            assert!((sp.eigenvalues[3] - 1.0).abs() < 1e-10);
            assert!(sp.eigenvalues[0].abs() < 1e-10);
        }
    }
}
