//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a[p][q]` with a
//! diagonal unitary, then applies the classical real symmetric rotation.

use num_complex::Complex64;

use super::{HermitianMatrix, SpectralData, SquareMatrix};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 60;
const CONVERGENCE_FACTOR: f64 = 1e-13;

/// Eigenvalues in non-increasing order and the matching unit eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: SquareMatrix,
}

impl EigenDecomposition {
    pub fn spectral_data(&self) -> SpectralData {
        SpectralData { eigenvalues: self.values.clone() }
    }

    /// `V · diag(values) · V*`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.vectors.conjugate_diagonal(&self.values)
    }

    /// Rebuilds the matrix with each eigenvalue replaced by `f(eigenvalue)`.
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self.values.iter().enumerate().map(|(i, &x)| f(i, x)).collect();
        self.vectors.conjugate_diagonal(&mapped)
    }
}

fn off_diagonal_norm(a: &SquareMatrix) -> f64 {
    let n = a.size();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = m.size();
    let mut a = m.as_matrix().clone();
    let mut v = SquareMatrix::identity(n);
    let threshold = CONVERGENCE_FACTOR * (1.0 + a.frobenius_norm());

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (size {n}, off-diagonal norm {:e})",
                off_diagonal_norm(&a)
            )));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = SquareMatrix::from_fn(n, |row, col| v[(row, order[col])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, non-increasing.
pub fn eigvalsh(m: &HermitianMatrix) -> Result<SpectralData> {
    Ok(eigh(m)?.spectral_data())
}

fn rotate(a: &mut SquareMatrix, v: &mut SquareMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // d removes the phase of a[p][q]
    let d = apq.conj() / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = diag(1, d) · [[c, s], [-s, c]] acting on coordinates (p, q)
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -d * s;
    let j_qq = d * c;

    let n = a.size();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}
