//! Haar averages over one-sided unitaries.
//!
//! For `Φ ∈ C^{p×m}` Haar-distributed with `ΦΦ* = I_p`:
//!
//! - `cov_p(K) = E[Φ*(ΦKΦ*)Φ]` has the closed form
//!   `p/((m²-1)m) · ((mp-1)K + (m-p)Tr(K) I)`, a diagonal loading of `K`.
//! - `invcov_p(K) = E[Φ*(ΦKΦ*)^{-1}Φ]` shares the eigenvectors of `K` and maps
//!   every zero eigenvalue to one common value `μ`; it is estimated by Monte
//!   Carlo.
//! - `E[Φ*(ΦDΦ*)^lΦ]` for diagonal `D` is a degree-`l` polynomial in `D` whose
//!   coefficients come from hook Schur polynomials of `D`.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::combinatorics::{ln_factorial, schur_hook_derivative_coeffs, schur_hook_powersum, HookShape, PowerSums};
use crate::error::{invalid, Result};
use crate::linalg::{eig_hermitian, numerical_rank, sample_haar_stiefel, CMatrix, HermitianMatrix};
use crate::mc::{matrix_mean, run, scalar_mean, McEstimate};
use crate::random::RandomSource;

/// Draws whose compressed matrix `ΦKΦ*` has a condition number above this
/// are rejected and redrawn.
pub const MAX_CONDITION: f64 = 1e12;

/// Loading parameters of `αK + βI`; not both zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadingParameters {
    alpha: f64,
    beta: f64,
}

impl LoadingParameters {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) || (alpha == 0.0 && beta == 0.0) {
            return Err(invalid(format!("loading parameters must be nonnegative and not both zero, got ({alpha}, {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub fn diagonal_loading(k: &HermitianMatrix, params: LoadingParameters) -> HermitianMatrix {
    crate::linalg::diagonal_loading(k, params.alpha, params.beta)
}

fn check_p(p: usize, m: usize) -> Result<()> {
    if p == 0 || p > m {
        return Err(invalid(format!("need 1 <= p <= m, got p={p}, m={m}")));
    }
    Ok(())
}

/// Closed form of `cov_p(K)`. Requires `m >= 2`.
pub fn cov_p_closed(k: &HermitianMatrix, p: usize) -> Result<HermitianMatrix> {
    let m = k.dim();
    if m < 2 {
        return Err(invalid("cov_p: dimension must be at least 2"));
    }
    check_p(p, m)?;
    let (mf, pf) = (m as f64, p as f64);
    let scale = pf / ((mf * mf - 1.0) * mf);
    let ck = scale * (mf * pf - 1.0);
    let ci = scale * (mf - pf) * k.trace();
    Ok(crate::linalg::diagonal_loading(k, ck, ci))
}

/// `Φ*(ΦKΦ*)^l Φ` for one Haar draw.
fn compressed_power(k: &CMatrix, phi: &CMatrix, l: u32) -> CMatrix {
    let w = phi * k * phi.adjoint();
    let mut acc = CMatrix::identity(w.nrows(), w.ncols());
    for _ in 0..l {
        acc = &acc * &w;
    }
    phi.adjoint() * acc * phi
}

/// Monte Carlo estimate of `E[Φ*(ΦKΦ*)^l Φ]`; `l = 1` is `cov_p(K)`.
pub fn haar_power_mc(k: &HermitianMatrix, p: usize, l: u32, samples: usize, source: &RandomSource) -> Result<McEstimate> {
    let m = k.dim();
    check_p(p, m)?;
    let km = k.as_matrix();
    matrix_mean(m, m, samples, source, |rng| {
        let phi = sample_haar_stiefel(p, m, rng)?;
        Ok(Some(compressed_power(km, phi.as_matrix(), l)))
    })
}

/// Monte Carlo estimate of `E[Tr((ΦDΦ*)^N)]`.
pub fn trace_moment_mc(d: &[f64], p: usize, order: u32, samples: usize, source: &RandomSource) -> Result<(f64, f64)> {
    let n = d.len();
    check_p(p, n)?;
    let dm = HermitianMatrix::from_diagonal(d);
    scalar_mean(samples, source, |rng| {
        let phi = sample_haar_stiefel(p, n, rng)?;
        let w = phi.as_matrix() * dm.as_matrix() * phi.as_matrix().adjoint();
        let mut acc = CMatrix::identity(p, p);
        for _ in 0..order {
            acc = &acc * &w;
        }
        Ok(acc.trace().re)
    })
}

/// Inverse of a Hermitian positive definite compressed matrix, or `None`
/// when its condition number exceeds [`MAX_CONDITION`].
fn guarded_inverse(w: CMatrix) -> Option<CMatrix> {
    let eig = SymmetricEigen::new(w);
    let hi = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x));
    let lo = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return None;
    }
    let mut scaled = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z /= lam);
    }
    Some(scaled * eig.eigenvectors.adjoint())
}

fn check_invcov_rank(k: &HermitianMatrix, p: usize) -> Result<()> {
    check_p(p, k.dim())?;
    let rank = numerical_rank(k)?;
    if p > rank {
        return Err(invalid(format!("invcov_p needs p <= rank(K); p={p}, rank={rank}")));
    }
    Ok(())
}

/// Monte Carlo estimate of `invcov_p(K) = E[Φ*(ΦKΦ*)^{-1}Φ]`, with per-entry
/// standard errors. Ill-conditioned draws are redrawn; see
/// [`McEstimate::rejected`].
pub fn invcov_p_mc(k: &HermitianMatrix, p: usize, samples: usize, source: &RandomSource) -> Result<McEstimate> {
    check_invcov_rank(k, p)?;
    let m = k.dim();
    let km = k.as_matrix();
    matrix_mean(m, m, samples, source, |rng| {
        let phi = sample_haar_stiefel(p, m, rng)?;
        let phi = phi.as_matrix();
        Ok(guarded_inverse(phi * km * phi.adjoint()).map(|inv| phi.adjoint() * inv * phi))
    })
}

/// Eigenvalue profile of `invcov_p` applied to `diag(d_1..d_n, 0..0)`.
#[derive(Debug, Clone)]
pub struct InvcovSpectrum {
    /// Transformed nonzero eigenvalues, in the order of the input.
    pub lambdas: Vec<f64>,
    pub lambda_se: Vec<f64>,
    /// Common value taken by every zero eigenvalue (`NaN` if there are none).
    pub mu: f64,
    pub mu_se: f64,
    pub p: usize,
    pub samples: usize,
    pub rejected: usize,
}

/// Monte Carlo estimate of the diagonal of `invcov_p(diag(d))`.
///
/// Only the diagonal is accumulated, and the zero-eigenvalue entries are
/// pooled into one estimate of `μ` per draw, since `invcov_p` of a diagonal
/// matrix is diagonal with a constant zero block.
pub fn invcov_p_spectrum(d: &[f64], p: usize, samples: usize, source: &RandomSource) -> Result<InvcovSpectrum> {
    let m = d.len();
    let top = d.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cut = crate::linalg::default_rank_tol(m) * top;
    let nonzero: Vec<usize> = (0..m).filter(|&i| d[i].abs() > cut).collect();
    let zero: Vec<usize> = (0..m).filter(|&i| d[i].abs() <= cut).collect();
    check_p(p, m)?;
    if p > nonzero.len() {
        return Err(invalid(format!("invcov_p needs p <= rank; p={p}, rank={}", nonzero.len())));
    }
    if d.iter().any(|&x| x < -cut) {
        return Err(invalid("invcov_p_spectrum: diagonal must be nonnegative"));
    }
    let len = nonzero.len() + 1;
    let (w, rejected) = run(samples, len, source, |rng| {
        let phi = sample_haar_stiefel(p, m, rng)?.into_matrix();
        // ΦDΦ* = Σ_i d_i φ_i φ_i*
        let mut w = CMatrix::zeros(p, p);
        for &i in &nonzero {
            let col = phi.column(i);
            w += (&col * col.adjoint()) * Complex64::new(d[i], 0.0);
        }
        let Some(inv) = guarded_inverse(w) else {
            return Ok(None);
        };
        let quad = |i: usize| {
            let col = phi.column(i);
            (col.adjoint() * &inv * col)[(0, 0)].re
        };
        let mut out: Vec<f64> = nonzero.iter().map(|&i| quad(i)).collect();
        let mu = if zero.is_empty() {
            0.0
        } else {
            zero.iter().map(|&i| quad(i)).sum::<f64>() / zero.len() as f64
        };
        out.push(mu);
        Ok(Some(out))
    })?;
    let mean = w.mean();
    let se = w.standard_error();
    let n = nonzero.len();
    Ok(InvcovSpectrum {
        lambdas: mean[..n].to_vec(),
        lambda_se: se[..n].to_vec(),
        mu: if zero.is_empty() { f64::NAN } else { mean[n] },
        mu_se: if zero.is_empty() { f64::NAN } else { se[n] },
        p,
        samples: w.count(),
        rejected,
    })
}

/// `invcov_p(K)` assembled as `U diag(λ.., μ..) U*` from the spectral
/// estimate of `K = U D U*`.
pub fn invcov_p_structured(k: &HermitianMatrix, p: usize, samples: usize, source: &RandomSource) -> Result<(HermitianMatrix, InvcovSpectrum)> {
    let sd = eig_hermitian(k)?;
    let low = sd.eigenvalues.last().copied().unwrap_or(0.0);
    let top = sd.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if low < -1e-10 * (1.0 + top) {
        return Err(crate::error::Error::NotPsd(low));
    }
    let cut = crate::linalg::default_rank_tol(k.dim()) * top;
    let d: Vec<f64> = sd.eigenvalues.iter().map(|&x| if x.abs() <= cut { 0.0 } else { x }).collect();
    let spec = invcov_p_spectrum(&d, p, samples, source)?;
    let mut values = Vec::with_capacity(d.len());
    let mut it = spec.lambdas.iter();
    for &x in &d {
        values.push(if x == 0.0 { spec.mu } else { *it.next().expect("one lambda per nonzero eigenvalue") });
    }
    let est = crate::linalg::SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: sd.eigenvectors,
    }
    .map_spectrum(|x| x);
    Ok((est, spec))
}

/// `(N+p-j-1)!(n-j-1)! / ((N+n-j-1)!(p-j-1)!)`, the weight of the hook
/// `(N-j, 1^j)` in `E[Tr((ΦDΦ*)^N)]`, evaluated in log space.
pub fn hook_weight(n: usize, p: usize, order: usize, j: usize) -> f64 {
    assert!(j < p && p <= n);
    let ln = ln_factorial(order + p - j - 1) + ln_factorial(n - j - 1)
        - ln_factorial(order + n - j - 1)
        - ln_factorial(p - j - 1);
    ln.exp()
}

fn check_moment_args(d: &[f64], p: usize, order: usize) -> Result<()> {
    check_p(p, d.len())?;
    if order == 0 {
        return Err(invalid("moment order must be at least 1"));
    }
    Ok(())
}

/// `E[Tr((ΦDΦ*)^N)]` for Haar `Φ ∈ C^{p×n}` and `D = diag(d)`, as a signed
/// sum of hook Schur polynomials.
pub fn trace_moment(d: &[f64], p: usize, order: usize) -> Result<f64> {
    check_moment_args(d, p, order)?;
    let n = d.len();
    let ps = PowerSums::of(d, order);
    let mut total = 0.0;
    for j in 0..p.min(order) {
        let s = schur_hook_powersum(HookShape::new(order, j)?, &ps)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * hook_weight(n, p, order, j) * s;
    }
    Ok(total)
}

/// Coefficients of `E[Φ*(ΦDΦ*)^l Φ] = Σ_k a_k D^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCoefficients {
    pub degree: usize,
    /// `a_0..a_l`.
    pub coeffs: Vec<f64>,
}

impl MomentCoefficients {
    /// `Σ_k a_k x^k`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// The diagonal matrix `Σ_k a_k D^k`.
    pub fn apply(&self, d: &[f64]) -> HermitianMatrix {
        let v: Vec<f64> = d.iter().map(|&x| self.eval(x)).collect();
        HermitianMatrix::from_diagonal(&v)
    }
}

/// Polynomial coefficients of `E[Φ*(ΦDΦ*)^l Φ]`, obtained by differentiating
/// the order-`l+1` trace moment in each `d_i`.
pub fn moment_matrix_coeffs(d: &[f64], p: usize, l: usize) -> Result<MomentCoefficients> {
    check_moment_args(d, p, l)?;
    let n = d.len();
    let order = l + 1;
    let ps = PowerSums::of(d, order);
    let mut coeffs = vec![0.0; order];
    for j in 0..p.min(order) {
        let c = schur_hook_derivative_coeffs(HookShape::new(order, j)?, &ps)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * hook_weight(n, p, order, j) / order as f64;
        for (a, ck) in coeffs.iter_mut().zip(&c) {
            *a += w * ck;
        }
    }
    Ok(MomentCoefficients { degree: l, coeffs })
}

/// `E[Φ*(ΦDΦ*)Φ] = p(np-1)/(n(n²-1)) D + p(n-p)/(n(n²-1)) Tr(D) I`.
pub fn first_moment_closed(d: &[f64], p: usize) -> Result<HermitianMatrix> {
    check_moment_args(d, p, 2)?;
    let (n, pf) = (d.len() as f64, p as f64);
    if d.len() < 2 {
        return Err(invalid("first moment closed form needs n >= 2"));
    }
    let den = n * (n * n - 1.0);
    let tr: f64 = d.iter().sum();
    let v: Vec<f64> = d.iter().map(|&x| (pf * (n * pf - 1.0) * x + pf * (n - pf) * tr) / den).collect();
    Ok(HermitianMatrix::from_diagonal(&v))
}

/// `c_j = (1/3) (2+p-j)!(n-j-1)! / ((2+n-j)!(p-j-1)!)` for `j = 0, 1, 2`;
/// `c_j = 0` when `j >= p` (no hook of that height contributes).
pub fn second_moment_coefficients(n: usize, p: usize) -> [f64; 3] {
    let mut c = [0.0; 3];
    for (j, cj) in c.iter_mut().enumerate() {
        if j < p && j < n {
            *cj = hook_weight(n, p, 3, j) / 3.0;
        }
    }
    c
}

/// `E[Φ*(ΦDΦ*)²Φ] = (c_0+c_1+c_2) D² + (c_0-c_2) Tr(D) D
///  + (c_0 (Tr(D)²+Tr(D²))/2 - c_1 Tr(D)² + c_2 (Tr(D)²-Tr(D²))/2) I`.
pub fn second_moment_closed(d: &[f64], p: usize) -> Result<HermitianMatrix> {
    check_moment_args(d, p, 3)?;
    let [c0, c1, c2] = second_moment_coefficients(d.len(), p);
    let t1: f64 = d.iter().sum();
    let t2: f64 = d.iter().map(|x| x * x).sum();
    let constant = c0 * (t1 * t1 + t2) / 2.0 - c1 * t1 * t1 + c2 * (t1 * t1 - t2) / 2.0;
    let v: Vec<f64> = d.iter().map(|&x| (c0 + c1 + c2) * x * x + (c0 - c2) * t1 * x + constant).collect();
    Ok(HermitianMatrix::from_diagonal(&v))
}

/// Real diagonal of a complex matrix.
pub fn real_diagonal(a: &CMatrix) -> Vec<f64> {
    (0..a.nrows()).map(|i| a[(i, i)].re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::random::complex_gaussian;

    fn random_hermitian(m: usize, seed: u64) -> HermitianMatrix {
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
    fn cov_p_special_cases() {
        let k = random_hermitian(5, 1);
        let full = cov_p_closed(&k, 5).unwrap();
        assert!(frobenius_norm(&(full.as_matrix() - k.as_matrix())) < 1e-13);
        for p in 1..=5 {
            let c = cov_p_closed(&HermitianMatrix::identity(5), p).unwrap();
            let want = CMatrix::identity(5, 5) * Complex64::new(p as f64 / 5.0, 0.0);
            assert!(frobenius_norm(&(c.as_matrix() - want)) < 1e-14);
            let t = cov_p_closed(&k, p).unwrap().trace();
            assert!((t - p as f64 / 5.0 * k.trace()).abs() < 1e-12 * (1.0 + k.trace().abs()));
        }
        assert!(cov_p_closed(&HermitianMatrix::identity(1), 1).is_err());
        assert!(cov_p_closed(&k, 6).is_err());
    }

    #[test]
    fn cov_p_is_linear_and_equivariant() {
        let a = random_hermitian(4, 2);
        let b = random_hermitian(4, 3);
        let sum = HermitianMatrix::symmetrized(a.as_matrix() * Complex64::new(2.0, 0.0) + b.as_matrix());
        let lhs = cov_p_closed(&sum, 2).unwrap();
        let rhs = cov_p_closed(&a, 2).unwrap().as_matrix() * Complex64::new(2.0, 0.0) + cov_p_closed(&b, 2).unwrap().as_matrix();
        assert!(frobenius_norm(&(lhs.as_matrix() - rhs)) < 1e-12);
        let u = eig_hermitian(&random_hermitian(4, 4)).unwrap().eigenvectors;
        let lhs = cov_p_closed(&a.conjugate_by(&u), 3).unwrap();
        let rhs = cov_p_closed(&a, 3).unwrap().conjugate_by(&u);
        assert!(frobenius_norm(&(lhs.as_matrix() - rhs.as_matrix())) < 1e-12);
    }

    #[test]
    fn cov_p_matches_haar_average() {
        let k = random_psd(5, 3, 10);
        let est = haar_power_mc(&k, 2, 1, 40_000, &RandomSource::new(1)).unwrap();
        let exact = cov_p_closed(&k, 2).unwrap();
        assert!(est.max_z(exact.as_matrix(), 1e-12) < 5.0);
    }

    #[test]
    fn trace_moment_first_order() {
        let d = [0.5, 1.0, 3.0, 2.0];
        for p in 1..=4 {
            let t = trace_moment(&d, p, 1).unwrap();
            assert!((t - p as f64 / 4.0 * 6.5).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_coefficients_first_order_reduce_to_cov_p() {
        let d = [0.5, 1.0, 3.0, 2.0, 0.25];
        let n = 5.0;
        let tr: f64 = d.iter().sum();
        for p in 1..=5usize {
            let pf = p as f64;
            let c = moment_matrix_coeffs(&d, p, 1).unwrap();
            let a1 = pf * (n * pf - 1.0) / (n * (n * n - 1.0));
            let a0 = pf * (n - pf) / (n * (n * n - 1.0)) * tr;
            assert!((c.coeffs[1] - a1).abs() < 1e-13);
            assert!((c.coeffs[0] - a0).abs() < 1e-13);
        }
    }

    #[test]
    fn displayed_moment_forms() {
        for (d, p) in [(vec![1.0, 2.0, 0.5, 3.0], 2), (vec![0.3, 1.7, 2.2, 0.9, 1.1], 3), (vec![1.0, 2.0, 3.0], 3)] {
            let general = moment_matrix_coeffs(&d, p, 1).unwrap().apply(&d);
            let shown = first_moment_closed(&d, p).unwrap();
            assert!(frobenius_norm(&(general.as_matrix() - shown.as_matrix())) < 1e-12);
            let general = moment_matrix_coeffs(&d, p, 2).unwrap().apply(&d);
            let shown = second_moment_closed(&d, p).unwrap();
            assert!(frobenius_norm(&(general.as_matrix() - shown.as_matrix())) < 1e-12);
        }
        assert_eq!(second_moment_coefficients(4, 2)[2], 0.0);
        let c = second_moment_coefficients(5, 3);
        assert!((c[2] - 1.0 / 30.0).abs() < 1e-15);
        let src = RandomSource::new(12);
        let d = [0.5, 1.0, 2.0, 1.5];
        let mc = haar_power_mc(&HermitianMatrix::from_diagonal(&d), 2, 2, 40_000, &src).unwrap();
        assert!(mc.max_z(second_moment_closed(&d, 2).unwrap().as_matrix(), 1e-12) < 5.0);
    }

    #[test]
    fn moment_trace_consistency() {
        // Tr E[Φ*(ΦDΦ*)^lΦ] = E Tr (ΦDΦ*)^l
        let d = [0.3, 1.7, 2.2, 0.9, 1.1];
        for p in 1..=5 {
            for l in 1..=4 {
                let c = moment_matrix_coeffs(&d, p, l).unwrap();
                let tr: f64 = d.iter().map(|&x| c.eval(x)).sum();
                let want = trace_moment(&d, p, l).unwrap();
                assert!((tr - want).abs() < 1e-12 * (1.0 + want.abs()), "p={p} l={l}");
            }
        }
    }

    #[test]
    fn invcov_identity_and_errors() {
        let k = HermitianMatrix::identity(4);
        let est = invcov_p_mc(&k, 2, 2_000, &RandomSource::new(3)).unwrap();
        let want = CMatrix::identity(4, 4) * Complex64::new(0.5, 0.0);
        // Φ*(ΦΦ*)^{-1}Φ = Φ*Φ exactly; mean is p/m I up to MC error
        assert!(est.max_z(&want, 1e-12) < 5.0);
        let low = random_psd(4, 1, 2);
        assert!(invcov_p_mc(&low, 2, 10, &RandomSource::new(3)).is_err());
    }

    #[test]
    fn invcov_scales_inversely() {
        let k = random_psd(4, 4, 6);
        let src = RandomSource::new(8);
        let base = invcov_p_mc(&k, 2, 4_000, &src).unwrap();
        for c in [0.5, 2.0] {
            let scaled = invcov_p_mc(&k.scale(c), 2, 4_000, &src).unwrap();
            // identical draws, so the relation holds draw by draw
            let diff = scaled.mean.clone() * Complex64::new(c, 0.0) - &base.mean;
            assert!(frobenius_norm(&diff) < 1e-9 * frobenius_norm(&base.mean));
        }
    }

    #[test]
    fn structured_invcov_agrees_with_full_mc() {
        let d = [3.0, 2.0, 1.0, 0.5, 0.0, 0.0];
        let src = RandomSource::new(21);
        let spec = invcov_p_spectrum(&d, 3, 20_000, &src).unwrap();
        let full = invcov_p_mc(&HermitianMatrix::from_diagonal(&d), 3, 20_000, &RandomSource::new(22)).unwrap();
        for i in 0..4 {
            let diff = spec.lambdas[i] - full.mean[(i, i)].re;
            let se = spec.lambda_se[i].hypot(full.se_re[(i, i)]);
            assert!(diff.abs() < 5.0 * se, "i={i}: {diff} vs se {se}");
        }
        assert!(spec.mu > 0.0);
    }

    #[test]
    fn loading_parameters_validation() {
        assert!(LoadingParameters::new(0.0, 0.0).is_err());
        assert!(LoadingParameters::new(-1.0, 1.0).is_err());
        let k = random_psd(3, 2, 1);
        let p = LoadingParameters::new(1.0, 0.0).unwrap();
        assert_eq!(diagonal_loading(&k, p), k);
    }
}
