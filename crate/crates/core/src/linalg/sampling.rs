use num_complex::Complex64;
use rand::Rng;

use super::{psd_sqrt, CMatrix, HermitianMatrix};
use crate::error::{invalid, Result};
use crate::random::complex_gaussian;

/// A `p × m` matrix with orthonormal rows, `ΦΦ* = I_p`.
#[derive(Debug, Clone)]
pub struct StiefelMatrix(CMatrix);

impl StiefelMatrix {
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Draws `Φ ∈ C^{p×m}` from the Haar measure on matrices with orthonormal
/// rows.
///
/// A complex Gaussian `m × p` matrix is QR-factorized and each column of `Q`
/// is rotated by the phase of the matching diagonal entry of `R`; without the
/// phase fix the law of `Q` depends on the QR convention and is not Haar.
pub fn sample_haar_stiefel<R: Rng + ?Sized>(p: usize, m: usize, rng: &mut R) -> Result<StiefelMatrix> {
    if p == 0 || p > m {
        return Err(invalid(format!("sample_haar_stiefel: need 1 <= p <= m, got p={p}, m={m}")));
    }
    let g = CMatrix::from_fn(m, p, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(StiefelMatrix(q.adjoint()))
}

/// `m × n` data matrix with i.i.d. columns `Σ^{1/2} g`, `g` standard complex
/// Gaussian.
pub fn sample_gaussian_data<R: Rng + ?Sized>(sigma: &HermitianMatrix, n: usize, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(invalid("sample_gaussian_data: n must be at least 1"));
    }
    let root = psd_sqrt(sigma)?;
    let m = sigma.dim();
    let g = CMatrix::from_fn(m, n, |_, _| complex_gaussian(rng));
    Ok(root.as_matrix() * g)
}

/// Sample covariance `K = (1/n) M M*` of `n` Gaussian draws with covariance
/// `Σ`.
pub fn sample_gaussian_covariance<R: Rng + ?Sized>(
    sigma: &HermitianMatrix,
    n: usize,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    let x = sample_gaussian_data(sigma, n, rng)?;
    let k = &x * x.adjoint() * Complex64::new(1.0 / n as f64, 0.0);
    Ok(HermitianMatrix::symmetrized(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::{frobenius_norm, numerical_rank};
    use crate::random::RandomSource;

    #[test]
    fn stiefel_rows_are_orthonormal() {
        let mut rng = RandomSource::new(5).stream(0);
        for (p, m) in [(1, 1), (1, 4), (2, 4), (3, 6), (6, 6)] {
            let phi = sample_haar_stiefel(p, m, &mut rng).unwrap();
            let gram = phi.as_matrix() * phi.as_matrix().adjoint();
            assert!(frobenius_norm(&(gram - CMatrix::identity(p, p))) <= 1e-10);
        }
        let phi = sample_haar_stiefel(1, 1, &mut rng).unwrap();
        assert!((phi.as_matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(sample_haar_stiefel(3, 2, &mut rng).is_err());
    }

    #[test]
    fn gaussian_covariance_converges() {
        let mut rng = RandomSource::new(17).stream(0);
        let k = sample_gaussian_covariance(&HermitianMatrix::identity(5), 100_000, &mut rng).unwrap();
        let err = frobenius_norm(&(k.as_matrix() - CMatrix::identity(5, 5)));
        assert!(err < 0.1, "{err}");
    }

    #[test]
    fn gaussian_covariance_rank_and_degenerate_cases() {
        let mut rng = RandomSource::new(3).stream(0);
        let k = sample_gaussian_covariance(&HermitianMatrix::identity(8), 5, &mut rng).unwrap();
        assert_eq!(numerical_rank(&k).unwrap(), 5);
        let z = sample_gaussian_covariance(&HermitianMatrix::zeros(4), 10, &mut rng).unwrap();
        assert_eq!(frobenius_norm(z.as_matrix()), 0.0);
        let bad = HermitianMatrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(sample_gaussian_covariance(&bad, 3, &mut rng), Err(Error::NotPsd(_))));
    }
}
