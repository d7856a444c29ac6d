//! Dense complex matrices, Hermitian eigendecomposition and spectral
//! clustering. Sizes are small (a few dozen at most), so everything is a
//! plain row-major `Vec`.

mod jacobi;
mod random;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{validation, Result};

pub use jacobi::{eigh, eigvalsh, EigenDecomposition, MAX_SWEEPS};
pub use random::{random_psd, random_psd_with, random_unitary, random_unitary_with, seeded_rng, TestRng};

/// Default tolerance for positivity checks and spectral clustering.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hermitian-ness tolerance applied when a matrix is validated.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A square complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from separate real and imaginary row-major arrays.
    /// An absent imaginary part means a real matrix.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let n = re.len();
        if n == 0 {
            return validation("matrix must have at least one row");
        }
        if let Some(row) = re.iter().position(|r| r.len() != n) {
            return validation(format!("matrix is not square: row {} has {} entries, expected {n}", row + 1, re[row].len()));
        }
        if let Some(im) = im {
            if im.len() != n || im.iter().any(|r| r.len() != n) {
                return validation("imaginary part does not match the real part's dimensions");
            }
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(re[i][j], im.map_or(0.0, |im| im[i][j]))))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)].re).collect()).collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)].im).collect()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix product of mismatched sizes");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, t: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * t).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `self · diag(d) · self*`, symmetrized to an exactly Hermitian result.
    pub fn conjugate_diagonal(&self, d: &[f64]) -> HermitianMatrix {
        assert_eq!(self.n, d.len());
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &dk) in d.iter().enumerate() {
                    if dk != 0.0 {
                        acc += self[(i, k)] * dk * self[(j, k)].conj();
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        HermitianMatrix(out)
    }

    /// Max-norm distance of `self · self*` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&Self::identity(self.n))
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<Complex64>> =
            (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect();
        f.debug_struct("SquareMatrix").field("rows", &rows).finish()
    }
}

/// A Hermitian matrix, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(SquareMatrix);

impl HermitianMatrix {
    /// Validates `m[i][j] == conj(m[j][i])` within [`HERMITIAN_TOL`].
    pub fn new(m: SquareMatrix) -> Result<Self> {
        if m.size() == 0 {
            return validation("matrix size must be positive");
        }
        for i in 0..m.size() {
            for j in i..m.size() {
                let defect = (m[(i, j)] - m[(j, i)].conj()).norm();
                if defect > HERMITIAN_TOL {
                    return validation(format!(
                        "matrix is not Hermitian: entries ({}, {}) and ({}, {}) differ by {defect:e}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    ));
                }
            }
        }
        Ok(Self::hermitize(m))
    }

    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        Self::new(SquareMatrix::from_parts(re, im)?)
    }

    /// Replaces `m` by `(m + m*) / 2` without validation.
    pub(crate) fn hermitize(mut m: SquareMatrix) -> Self {
        let n = m.size();
        for i in 0..n {
            m[(i, i)].im = 0.0;
            for j in i + 1..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        HermitianMatrix(m)
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        HermitianMatrix(SquareMatrix::from_real_diagonal(diag))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(SquareMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(SquareMatrix::identity(n))
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::hermitize(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::hermitize(self.0.sub(&other.0))
    }

    pub fn scale(&self, t: f64) -> Self {
        HermitianMatrix(self.0.scale(t))
    }

    /// `u · self · u*`.
    pub fn conjugate_by(&self, u: &SquareMatrix) -> Self {
        Self::hermitize(u.mul(&self.0).mul(&u.adjoint()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Operator norm (spectral radius for a Hermitian matrix).
    pub fn norm(&self) -> Result<f64> {
        let s = eigvalsh(self)?;
        Ok(s.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max))
    }
}

/// Eigenvalues of a Hermitian matrix, non-increasing, with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
}

impl SpectralData {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// True iff the smallest eigenvalue of `m` is at least `-tol`.
pub fn is_positive(m: &HermitianMatrix, tol: f64) -> Result<bool> {
    if !(tol >= 0.0) {
        return validation(format!("tolerance must be non-negative, got {tol}"));
    }
    Ok(eigvalsh(m)?.min() >= -tol)
}

/// Result of [`cluster_spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Cluster representatives (cluster maxima), strictly decreasing.
    pub distinct: Vec<f64>,
    /// `cumulative_counts[j]` = number of eigenvalues in clusters `0..=j`.
    pub cumulative_counts: Vec<usize>,
}

/// Merges consecutive eigenvalues whose gap is at most `tol`.
pub fn cluster_spectrum(s: &SpectralData, tol: f64) -> Clustering {
    let labels = cluster_labels(&s.eigenvalues, tol);
    let mut distinct = Vec::new();
    let mut cumulative_counts = Vec::new();
    for (i, (&x, &label)) in s.eigenvalues.iter().zip(&labels).enumerate() {
        if label == distinct.len() {
            distinct.push(x);
            cumulative_counts.push(0);
        }
        cumulative_counts[label] = i + 1;
    }
    Clustering { distinct, cumulative_counts }
}

/// Cluster index of each entry of a non-increasing list under the gap rule.
pub(crate) fn cluster_labels(sorted_desc: &[f64], tol: f64) -> Vec<usize> {
    let mut labels = Vec::with_capacity(sorted_desc.len());
    let mut current = 0usize;
    for (i, &x) in sorted_desc.iter().enumerate() {
        if i > 0 && sorted_desc[i - 1] - x > tol {
            current += 1;
        }
        labels.push(current);
    }
    labels
}
