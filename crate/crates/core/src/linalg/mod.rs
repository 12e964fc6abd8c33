//! Dense complex Hermitian linear algebra.
//!
//! Everything is `Complex64`; real inputs are embedded with zero imaginary
//! parts. [`HermitianMatrix`] is the carrier for covariances and estimates,
//! while rectangular intermediates use the plain [`CMatrix`] alias.

mod block_pinv;
pub mod io;
mod sampling;

pub use block_pinv::{block_pinv_update, BlockPinvBranch, BlockPinvUpdate};
pub use sampling::{sample_gaussian_covariance, sample_gaussian_data, sample_haar_stiefel, StiefelMatrix};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance used when accepting caller-supplied Hermitian input.
const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Dense complex Hermitian matrix of dimension `m >= 1`.
///
/// Construction symmetrizes exactly, so `a_ij == conj(a_ji)` holds bit for bit
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates that `m` is square, finite and Hermitian to within
    /// `1e-10 * (1 + max|a_ij|)`, then symmetrizes.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(invalid("matrix dimension must be at least 1"));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n = m.nrows();
        for i in 0..n {
            for j in i..n {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > HERMITIAN_INPUT_TOL * scale {
                    return Err(invalid(format!(
                        "matrix is not Hermitian: |a[{i},{j}] - conj(a[{j},{i}])| = {d:e}"
                    )));
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Takes the Hermitian part `(M + M*)/2` without validation. For use on
    /// results that are Hermitian up to rounding.
    pub fn symmetrized(m: CMatrix) -> Self {
        assert!(m.is_square(), "symmetrized: matrix must be square");
        let n = m.nrows();
        let mut out = m;
        for i in 0..n {
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        Self(out)
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(m: usize) -> Self {
        Self(CMatrix::identity(m, m))
    }

    pub fn zeros(m: usize) -> Self {
        Self(CMatrix::zeros(m, m))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let v = CVector::from_iterator(d.len(), d.iter().map(|&x| Complex64::new(x, 0.0)));
        Self(CMatrix::from_diagonal(&v))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    /// `U self U*` for a square `u`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u * &self.0 * u.adjoint())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(m: &CMatrix) -> f64 {
        let n = m.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// `K = U diag(eigenvalues) U*`, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuilds `U f(D) U*` for an arbitrary spectral map `f`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let c = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= c);
        }
        HermitianMatrix::symmetrized(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn eig_hermitian(k: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let m = k.as_matrix();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("eig_hermitian: non-finite entries"));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| invalid("eig_hermitian: eigen solver did not converge"))?;
    let n = k.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn eigenvalues(k: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(k)?.eigenvalues)
}

/// Default relative rank tolerance: `m * eps`, applied against the largest
/// singular value.
pub fn default_rank_tol(m: usize) -> f64 {
    m as f64 * f64::EPSILON
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix. Eigenvalues with
/// `|λ| <= rank_tol * max|λ|` are treated as zero.
pub fn pseudoinverse(k: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    if !(rank_tol > 0.0) {
        return Err(invalid("pseudoinverse: rank_tol must be positive"));
    }
    let sd = eig_hermitian(k)?;
    let top = sd.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cut = rank_tol * top;
    Ok(sd.map_spectrum(|x| if x.abs() <= cut || x == 0.0 { 0.0 } else { 1.0 / x }))
}

/// [`pseudoinverse`] with the default numerical-rank rule.
pub fn pseudoinverse_default(k: &HermitianMatrix) -> Result<HermitianMatrix> {
    pseudoinverse(k, default_rank_tol(k.dim()))
}

/// SVD-based pseudoinverse of a rectangular matrix, singular values below
/// `max(rows, cols) * eps * σ_max` dropped.
pub fn pinv(a: &CMatrix) -> CMatrix {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return CMatrix::zeros(c, r);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cut = r.max(c) as f64 * f64::EPSILON * smax;
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let mut out = CMatrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            let vk = vt.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk) * Complex64::new(1.0 / s, 0.0);
        }
    }
    out
}

/// Numerical rank by the default tolerance rule.
pub fn numerical_rank(k: &HermitianMatrix) -> Result<usize> {
    let ev = eigenvalues(k)?;
    let top = ev.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cut = default_rank_tol(k.dim()) * top;
    Ok(ev.iter().filter(|x| x.abs() > cut).count())
}

/// Frobenius norm `sqrt(Tr(A A*))`.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Principal square root of a PSD matrix; eigenvalues in
/// `[-1e-10 * (1 + max|λ|), 0)` are clamped to zero.
pub fn psd_sqrt(k: &HermitianMatrix) -> Result<HermitianMatrix> {
    let sd = eig_hermitian(k)?;
    let top = sd.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let low = sd.eigenvalues.last().copied().unwrap_or(0.0);
    if low < -1e-10 * (1.0 + top) {
        return Err(Error::NotPsd(low));
    }
    Ok(sd.map_spectrum(|x| x.max(0.0).sqrt()))
}

/// Diagonal-loading estimate `αK + βI`.
pub fn diagonal_loading(k: &HermitianMatrix, alpha: f64, beta: f64) -> HermitianMatrix {
    let mut out = k.as_matrix() * Complex64::new(alpha, 0.0);
    for i in 0..k.dim() {
        out[(i, i)] += beta;
    }
    HermitianMatrix::symmetrized(out)
}

/// The measure placing mass `1/m` at each eigenvalue of an `m×m` Hermitian
/// matrix. Eigenvalues are stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectralDistribution {
    eigenvalues: Vec<f64>,
}

impl EmpiricalSpectralDistribution {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let below = self.eigenvalues.partition_point(|&v| v <= x);
        below as f64 / self.eigenvalues.len() as f64
    }

    /// Fraction of mass outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let n = self.eigenvalues.iter().filter(|&&v| v < lo || v > hi).count();
        n as f64 / self.eigenvalues.len() as f64
    }

    /// Kolmogorov distance `sup_x |F_μ(x) - F(x)|` against a continuous CDF.
    /// The supremum of a step function against a continuous one is attained at
    /// the jumps, from the left or the right.
    pub fn kolmogorov_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let m = self.eigenvalues.len() as f64;
        let mut worst: f64 = 0.0;
        for (k, &x) in self.eigenvalues.iter().enumerate() {
            let f = cdf(x);
            worst = worst.max((f - k as f64 / m).abs());
            worst = worst.max((f - (k + 1) as f64 / m).abs());
        }
        worst
    }
}

/// Empirical spectral distribution of `k`.
pub fn esd(k: &HermitianMatrix) -> Result<EmpiricalSpectralDistribution> {
    Ok(EmpiricalSpectralDistribution::from_eigenvalues(eigenvalues(k)?))
}

/// `((1/m) Tr((A-B)(A-B)*))^{1/3}`, an upper bound on the Lévy distance
/// between the spectral distributions of `A` and `B`.
pub fn levy_bound(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a.as_matrix() - b.as_matrix();
    let ms = diff.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.dim() as f64;
    Ok(ms.cbrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, RandomSource};

    pub(crate) fn random_hermitian(m: usize, seed: u64) -> HermitianMatrix {
        let mut rng = RandomSource::new(seed).stream(0);
        let a = CMatrix::from_fn(m, m, |_, _| complex_gaussian(&mut rng));
        HermitianMatrix::symmetrized(&a + a.adjoint())
    }

    fn random_psd(m: usize, rank: usize, seed: u64) -> HermitianMatrix {
        let mut rng = RandomSource::new(seed).stream(0);
        let a = CMatrix::from_fn(m, rank, |_, _| complex_gaussian(&mut rng));
        HermitianMatrix::symmetrized(&a * a.adjoint())
    }

    #[test]
    fn rejects_non_hermitian_and_non_finite() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
        let mut m = CMatrix::identity(2, 2);
        m[(1, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
        assert!(HermitianMatrix::new(CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let sd = eig_hermitian(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(sd.eigenvalues.len(), 3);
        for v in &sd.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let sd = eig_hermitian(&HermitianMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        for (got, want) in sd.eigenvalues.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_tridiagonal_matches_cosine_formula() {
        let b = 0.3;
        let mut m = DMatrix::<f64>::identity(3, 3);
        for i in 0..2 {
            m[(i, i + 1)] = b;
            m[(i + 1, i)] = b;
        }
        let ev = eigenvalues(&HermitianMatrix::from_real(&m).unwrap()).unwrap();
        let want: Vec<f64> = (1..=3)
            .map(|j| 1.0 + 2.0 * b * (std::f64::consts::PI * j as f64 / 4.0).cos())
            .collect();
        for (g, w) in ev.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!((ev[0] - 1.4243).abs() < 1e-4);
        assert!((ev[2] - 0.5757).abs() < 1e-4);
    }

    #[test]
    fn eig_reconstruction_and_unitarity() {
        for seed in 0..10 {
            let k = random_hermitian(7, seed);
            let sd = eig_hermitian(&k).unwrap();
            let rec = sd.reconstruct();
            let err = frobenius_norm(&(rec.as_matrix() - k.as_matrix()));
            assert!(err <= 1e-10 * (1.0 + frobenius_norm(k.as_matrix())));
            let u = &sd.eigenvectors;
            let uu = u * u.adjoint() - CMatrix::identity(7, 7);
            assert!(frobenius_norm(&uu) <= 1e-10);
            assert!(sd.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let p = pseudoinverse_default(&HermitianMatrix::from_diagonal(&[2.0, 0.0])).unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(p[(1, 1)].norm() < 1e-15);

        let k = random_psd(4, 4, 3);
        let inv = k.as_matrix().clone().try_inverse().unwrap();
        let p = pseudoinverse_default(&k).unwrap();
        assert!(frobenius_norm(&(p.as_matrix() - inv)) < 1e-9 * frobenius_norm(p.as_matrix()));

        let v = CVector::from_vec(vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.5),
            Complex64::new(0.0, 3.0),
        ]);
        let proj = HermitianMatrix::symmetrized(&v * v.adjoint() / Complex64::new(v.norm_squared(), 0.0));
        let p = pseudoinverse_default(&proj).unwrap();
        assert!(frobenius_norm(&(p.as_matrix() - proj.as_matrix())) < 1e-12);
    }

    fn penrose_residual(k: &CMatrix, x: &CMatrix) -> f64 {
        let r1 = frobenius_norm(&(k * x * k - k));
        let r2 = frobenius_norm(&(x * k * x - x));
        let kx = k * x;
        let xk = x * k;
        let r3 = frobenius_norm(&(kx.adjoint() - &kx));
        let r4 = frobenius_norm(&(xk.adjoint() - &xk));
        r1.max(r2).max(r3).max(r4)
    }

    #[test]
    fn penrose_identities_hold_for_rank_deficient_inputs() {
        for (seed, rank) in (0..12).zip([1, 2, 3, 4, 5, 6].iter().cycle()) {
            let k = random_psd(6, *rank, 100 + seed);
            let x = pseudoinverse_default(&k).unwrap();
            let tol = 1e-9 * (1.0 + frobenius_norm(k.as_matrix()));
            assert!(penrose_residual(k.as_matrix(), x.as_matrix()) <= tol);
            let xr = pinv(k.as_matrix());
            assert!(penrose_residual(k.as_matrix(), &xr) <= tol);
        }
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&CMatrix::zeros(3, 3)), 0.0);
        assert!((frobenius_norm(&CMatrix::identity(5, 5)) - 5f64.sqrt()).abs() < 1e-15);
        let d = HermitianMatrix::from_diagonal(&[3.0, 4.0]);
        assert!((frobenius_norm(d.as_matrix()) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn esd_examples() {
        let e = esd(&HermitianMatrix::identity(4)).unwrap();
        assert_eq!(e.cdf(0.999), 0.0);
        assert_eq!(e.cdf(1.0 + 1e-12), 1.0);
        let e = esd(&HermitianMatrix::from_diagonal(&[1.0, 2.0])).unwrap();
        assert!((e.cdf(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(e.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn esd_is_unitarily_invariant() {
        let k = random_hermitian(6, 9);
        let u = eig_hermitian(&random_hermitian(6, 10)).unwrap().eigenvectors;
        let a = esd(&k).unwrap();
        let b = esd(&k.conjugate_by(&u)).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn levy_bound_examples() {
        let k = random_hermitian(5, 1);
        assert_eq!(levy_bound(&k, &k).unwrap(), 0.0);
        for m in [1, 4, 17] {
            let v = levy_bound(&HermitianMatrix::identity(m), &HermitianMatrix::zeros(m)).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(levy_bound(&HermitianMatrix::identity(2), &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn diagonal_loading_examples() {
        let k = random_psd(4, 2, 5);
        let a = diagonal_loading(&k, 1.0, 0.0);
        assert_eq!(a, k);
        let b = diagonal_loading(&k, 0.0, 1.0);
        assert_eq!(b, HermitianMatrix::identity(4));
        let ev = eigenvalues(&k).unwrap();
        let ev2 = eigenvalues(&diagonal_loading(&k, 1.0, 0.7)).unwrap();
        for (x, y) in ev.iter().zip(&ev2) {
            assert!((y - x - 0.7).abs() < 1e-12);
        }
    }
}
