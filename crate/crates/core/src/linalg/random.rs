//! Seeded random unitaries and positive matrices.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{eigvalsh, HermitianMatrix, SquareMatrix};
use crate::error::{validation, Result};

/// The generator used everywhere randomness is needed.
pub type TestRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SquareMatrix> {
    if n == 0 {
        return validation("unitary size must be at least 1");
    }
    let g = gaussian_matrix(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        // two passes of modified Gram-Schmidt keep the defect at rounding level
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Ok(SquareMatrix::from_fn(n, |i, j| cols[j][i]))
}

pub fn random_unitary(n: usize, seed: u64) -> Result<SquareMatrix> {
    random_unitary_with(&mut seeded_rng(seed), n)
}

/// `G·G*` for a complex Gaussian `G`, rescaled to operator norm `norm_bound`.
pub fn random_psd_with<R: Rng + ?Sized>(rng: &mut R, n: usize, norm_bound: f64) -> Result<HermitianMatrix> {
    if n == 0 {
        return validation("matrix size must be at least 1");
    }
    if !(norm_bound > 0.0) {
        return validation(format!("norm bound must be positive, got {norm_bound}"));
    }
    let g = gaussian_matrix(rng, n);
    let m = HermitianMatrix::hermitize(g.mul(&g.adjoint()));
    let top = eigvalsh(&m)?.max();
    Ok(if top > 0.0 { m.scale(norm_bound / top) } else { m })
}

pub fn random_psd(n: usize, seed: u64, norm_bound: f64) -> Result<HermitianMatrix> {
    random_psd_with(&mut seeded_rng(seed), n, norm_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_positive;

    #[test]
    fn unitary_of_size_one_has_unit_modulus() {
        for seed in 0..10 {
            let u = random_unitary(1, seed).unwrap();
            assert!((u[(0, 0)].norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn unitary_is_deterministic() {
        assert_eq!(random_unitary(5, 42).unwrap(), random_unitary(5, 42).unwrap());
        assert_ne!(random_unitary(5, 42).unwrap(), random_unitary(5, 43).unwrap());
    }

    #[test]
    fn unitary_defect_is_small() {
        assert!(random_unitary(4, 7).unwrap().unitarity_defect() <= 1e-12);
        assert!(random_unitary(32, 7).unwrap().unitarity_defect() <= 1e-12);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(random_unitary(0, 1).is_err());
        assert!(random_psd(0, 1, 1.0).is_err());
        assert!(random_psd(2, 1, 0.0).is_err());
    }

    #[test]
    fn psd_respects_bound() {
        for seed in 0..20 {
            let m = random_psd(4, seed, 2.5).unwrap();
            assert!(is_positive(&m, 1e-12).unwrap());
            assert!(eigvalsh(&m).unwrap().max() <= 2.5 + 1e-12);
        }
    }
}
