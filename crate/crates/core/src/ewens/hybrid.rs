//! Injection-average estimators `K_{θ,m,p} = E(P_σ K P_σ)` and
//! `K̃_{θ,m,p} = E(V_σ^T (V_σ K V_σ^T)^+ V_σ)`, where `σ` is the restriction
//! to `[p]` of an Ewens permutation.

use num_complex::Complex64;

use super::measure::{enumerate_injections, injection_probability, sample_ewens, Injection, Theta};
use crate::error::{invalid, Error, Result};
use crate::linalg::block_pinv_update;
use crate::linalg::{eig_hermitian, pseudoinverse_default, CMatrix, CVector, HermitianMatrix};
use crate::mc::{matrix_mean, McEstimate};
use crate::random::RandomSource;

fn check_dims(m: usize, p: usize) -> Result<()> {
    if m < 2 {
        return Err(invalid("hybrid estimators need m >= 2"));
    }
    if p == 0 || p > m {
        return Err(invalid(format!("need 1 <= p <= m, got p={p}, m={m}")));
    }
    Ok(())
}

/// Coefficient multiplying `a_ij` in `K_{θ,m,p}`.
fn hybrid_coefficient(i: usize, j: usize, t: f64, m: usize, p: usize) -> f64 {
    let (mf, pf) = (m as f64, p as f64);
    if i == j {
        return if i < p { (t + pf - 1.0) / (t + mf - 1.0) } else { pf / (t + mf - 1.0) };
    }
    let den = (t + mf - 1.0) * (t + mf - 2.0);
    match (i < p, j < p) {
        (true, true) => (t + pf - 1.0) * (t + pf - 2.0) / den,
        (false, false) => pf * (pf - 1.0) / den,
        _ => (pf - 1.0) * (t + pf - 1.0) / den,
    }
}

/// Closed form of `K_{θ,m,p}`: every entry is rescaled by a coefficient that
/// depends on whether `i`, `j` lie in `[p]` and whether `i = j`.
pub fn hybrid_estimator(k: &HermitianMatrix, theta: Theta, p: usize) -> Result<HermitianMatrix> {
    let m = k.dim();
    check_dims(m, p)?;
    let t = theta.value();
    let a = k.as_matrix();
    Ok(HermitianMatrix::symmetrized(CMatrix::from_fn(m, m, |i, j| {
        a[(i, j)] * hybrid_coefficient(i, j, t, m, p)
    })))
}

/// `V_σ^T X V_σ`: places the `p × p` block `X` at rows/columns `σ(0..p)`.
fn embed(x: &CMatrix, sigma: &[usize], m: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m, m);
    for (s, &a) in sigma.iter().enumerate() {
        for (t, &b) in sigma.iter().enumerate() {
            out[(a, b)] = x[(s, t)];
        }
    }
    out
}

/// `V_σ K V_σ^T`.
fn compress(k: &CMatrix, sigma: &[usize]) -> CMatrix {
    let p = sigma.len();
    CMatrix::from_fn(p, p, |s, t| k[(sigma[s], sigma[t])])
}

fn weighted_injection_sum<F>(m: usize, p: usize, theta: Theta, term: F) -> Result<CMatrix>
where
    F: Fn(&Injection) -> Result<CMatrix>,
{
    let mut out = CMatrix::zeros(m, m);
    for sigma in enumerate_injections(p, m)? {
        let w = injection_probability(&sigma, theta);
        out += term(&sigma)? * Complex64::new(w, 0.0);
    }
    Ok(out)
}

/// `K_{θ,m,p}` by summing over all of `S_{p,m}`.
pub fn hybrid_estimator_exhaustive(k: &HermitianMatrix, theta: Theta, p: usize) -> Result<HermitianMatrix> {
    let m = k.dim();
    check_dims(m, p)?;
    let a = k.as_matrix();
    let out = weighted_injection_sum(m, p, theta, |s| Ok(embed(&compress(a, s.images()), s.images(), m)))?;
    Ok(HermitianMatrix::symmetrized(out))
}

/// `K̃_{θ,m,p}` by summing over all of `S_{p,m}`.
pub fn hybrid_inverse_exhaustive(k: &HermitianMatrix, theta: Theta, p: usize) -> Result<HermitianMatrix> {
    let m = k.dim();
    check_dims(m, p)?;
    let a = k.as_matrix();
    let out = weighted_injection_sum(m, p, theta, |s| {
        let w = pseudoinverse_default(&HermitianMatrix::symmetrized(compress(a, s.images())))?;
        Ok(embed(w.as_matrix(), s.images(), m))
    })?;
    Ok(HermitianMatrix::symmetrized(out))
}

/// Closed form of `K̃_{θ,m,p}` for `K = diag(d_1, .., d_n, 0, .., 0)`.
///
/// `d` holds the `n` positive entries; `m` is the full dimension. Entry `i`
/// is `d_i^{-1}` times the probability that `i` lies in the image of `σ`,
/// which is `(θ+p-1)/(θ+m-1)` for `i <= p` and `p/(θ+m-1)` for `i > p`.
pub fn hybrid_inverse_diagonal(d: &[f64], m: usize, theta: Theta, p: usize) -> Result<HermitianMatrix> {
    check_dims(m, p)?;
    if d.len() > m {
        return Err(Error::DimensionMismatch { expected: m, found: d.len() });
    }
    if let Some(bad) = d.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(invalid(format!("nonzero block must be positive, found {bad}")));
    }
    let (t, mf, pf) = (theta.value(), m as f64, p as f64);
    let mut diag = vec![0.0; m];
    for (i, &di) in d.iter().enumerate() {
        let c = if i < p { (t + pf - 1.0) / (t + mf - 1.0) } else { pf / (t + mf - 1.0) };
        diag[i] = c / di;
    }
    Ok(HermitianMatrix::from_diagonal(&diag))
}

/// Monte Carlo estimate of `K̃_{θ,m,p}`: each draw is a full Ewens
/// permutation restricted to `[p]`.
pub fn hybrid_inverse_mc(
    k: &HermitianMatrix,
    theta: Theta,
    p: usize,
    samples: usize,
    source: &RandomSource,
) -> Result<McEstimate> {
    let m = k.dim();
    check_dims(m, p)?;
    let a = k.as_matrix();
    matrix_mean(m, m, samples, source, |rng| {
        let sigma = sample_ewens(m, theta, rng);
        let s = &sigma.images()[..p];
        let w = pseudoinverse_default(&HermitianMatrix::symmetrized(compress(a, s)))?;
        Ok(Some(embed(w.as_matrix(), s, m)))
    })
}

/// Rows `ũ_i` of a factor `Ũ` with `Ũ Ũ* = K`, i.e. `ũ_i = (√d_k U_ik)_k`
/// for `K = U D U*`.
pub fn gram_factor(k: &HermitianMatrix) -> Result<CMatrix> {
    let sd = eig_hermitian(k)?;
    let top = sd.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if let Some(&low) = sd.eigenvalues.iter().find(|&&x| x < -1e-10 * (1.0 + top)) {
        return Err(Error::NotPsd(low));
    }
    let m = k.dim();
    let u = &sd.eigenvectors;
    Ok(CMatrix::from_fn(m, m, |i, c| u[(i, c)] * sd.eigenvalues[c].max(0.0).sqrt()))
}

/// `M` with columns `ũ_{σ(s)}^*`, so that `M*M = V_σ K V_σ^T`.
fn gram_columns(factor: &CMatrix, sigma: &[usize]) -> CMatrix {
    let m = factor.ncols();
    CMatrix::from_fn(m, sigma.len(), |r, s| factor[(sigma[s], r)].conj())
}

/// `K̃_{θ,m,1}` exactly: `σ(1) = i` has probability `θ/(θ+m-1)` for `i = 1`
/// and `1/(θ+m-1)` otherwise, and contributes `a_ii^+` at `(i, i)`.
pub fn hybrid_inverse_base(k: &HermitianMatrix, theta: Theta) -> Result<HermitianMatrix> {
    let m = k.dim();
    check_dims(m, 1)?;
    let t = theta.value();
    let scale = k.diagonal().iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let diag: Vec<f64> = k
        .diagonal()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = if i == 0 { t } else { 1.0 } / (t + m as f64 - 1.0);
            if x.abs() <= crate::linalg::default_rank_tol(1) * scale || x == 0.0 { 0.0 } else { w / x }
        })
        .collect();
    Ok(HermitianMatrix::from_diagonal(&diag))
}

/// Monte Carlo estimate of `E(V_σ^T E_σ V_σ)`, the correction taking
/// `K̃_{θ,m,p-1}` to `K̃_{θ,m,p}`. `E_σ` is the block pseudoinverse update
/// for appending column `ũ_{σ(p)}^*` to the first `p - 1` columns.
pub fn inductive_correction_mc(
    k: &HermitianMatrix,
    theta: Theta,
    p: usize,
    samples: usize,
    source: &RandomSource,
) -> Result<McEstimate> {
    let m = k.dim();
    check_dims(m, p)?;
    if p < 2 {
        return Err(invalid("the inductive correction needs p >= 2"));
    }
    let factor = gram_factor(k)?;
    matrix_mean(m, m, samples, source, |rng| {
        let sigma = sample_ewens(m, theta, rng);
        let s = &sigma.images()[..p];
        let cols = gram_columns(&factor, s);
        let head = cols.columns(0, p - 1).into_owned();
        let tail: CVector = cols.column(p - 1).into_owned();
        let upd = block_pinv_update(&head, &tail);
        Ok(Some(embed(&upd.correction, s, m)))
    })
}

/// `K̃_{θ,m,p} ≈ K̃_{θ,m,p-1} + E(V_σ^T E_σ V_σ)` given an estimate of the
/// previous level. The standard errors are those of the correction alone.
pub fn hybrid_inverse_inductive_step(
    k: &HermitianMatrix,
    previous: &HermitianMatrix,
    theta: Theta,
    p: usize,
    samples: usize,
    source: &RandomSource,
) -> Result<McEstimate> {
    if previous.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: previous.dim() });
    }
    let mut est = inductive_correction_mc(k, theta, p, samples, source)?;
    est.mean += previous.as_matrix();
    Ok(est)
}

/// Runs the induction from the exact `p = 1` base up to `p`, one independent
/// sub-stream per level. Standard errors add in quadrature across levels.
pub fn hybrid_inverse_inductive(
    k: &HermitianMatrix,
    theta: Theta,
    p: usize,
    samples: usize,
    source: &RandomSource,
) -> Result<McEstimate> {
    let m = k.dim();
    check_dims(m, p)?;
    let base = hybrid_inverse_base(k, theta)?;
    let mut est = McEstimate {
        mean: base.into_matrix(),
        se_re: nalgebra::DMatrix::zeros(m, m),
        se_im: nalgebra::DMatrix::zeros(m, m),
        samples,
        rejected: 0,
    };
    for level in 2..=p {
        let prev = HermitianMatrix::symmetrized(est.mean.clone());
        let step = hybrid_inverse_inductive_step(k, &prev, theta, level, samples, &source.derive(level as u64))?;
        est.se_re = est.se_re.zip_map(&step.se_re, |a, b| a.hypot(b));
        est.se_im = est.se_im.zip_map(&step.se_im, |a, b| a.hypot(b));
        est.mean = step.mean;
        est.rejected += step.rejected;
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewens::estimator::ewens_estimator;
    use crate::linalg::{frobenius_norm, pinv, sample_gaussian_covariance};
    use crate::random::complex_gaussian;
    use rand::Rng;

    fn th(t: f64) -> Theta {
        Theta::new(t).unwrap()
    }

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        frobenius_norm(&(a - b)) / frobenius_norm(b).max(1e-300)
    }

    fn random_hermitian<R: Rng>(m: usize, rng: &mut R) -> HermitianMatrix {
        let g = CMatrix::from_fn(m, m, |_, _| complex_gaussian(rng));
        HermitianMatrix::symmetrized(&g + g.adjoint())
    }

    fn random_psd<R: Rng>(m: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
        let g = CMatrix::from_fn(m, rank, |_, _| complex_gaussian(rng));
        HermitianMatrix::symmetrized(&g * g.adjoint())
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let mut rng = RandomSource::new(21).stream(0);
        for m in 2..=7 {
            for p in 1..=m {
                for t in [0.5, 1.0, 2.0, 5.0] {
                    let k = random_hermitian(m, &mut rng);
                    let a = hybrid_estimator(&k, th(t), p).unwrap();
                    let b = hybrid_estimator_exhaustive(&k, th(t), p).unwrap();
                    assert!(rel(a.as_matrix(), b.as_matrix()) < 1e-12, "m={m} p={p} θ={t}");
                }
            }
        }
    }

    #[test]
    fn small_examples() {
        let t = 1.3;
        let k = HermitianMatrix::from_real(&nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 0.3, -0.7, 0.3, 5.0, 1.1, -0.7, 1.1, 3.0],
        ))
        .unwrap();
        let a = |i, j| k[(i, j)];
        let w = [[t + 1.0, t, 1.0], [t, t + 1.0, 1.0], [1.0, 1.0, 2.0]];
        let expected = CMatrix::from_fn(3, 3, |i, j| a(i, j) * w[i][j] / (t + 2.0));
        assert!(rel(hybrid_estimator(&k, th(t), 2).unwrap().as_matrix(), &expected) < 1e-14);

        let d = HermitianMatrix::from_diagonal(&[2.0, 5.0, 3.0]);
        let expected = HermitianMatrix::from_diagonal(&[t * 2.0 / (t + 2.0), 5.0 / (t + 2.0), 3.0 / (t + 2.0)]);
        assert!(rel(hybrid_estimator(&d, th(t), 1).unwrap().as_matrix(), expected.as_matrix()) < 1e-14);

        assert!(hybrid_estimator(&HermitianMatrix::identity(1), th(t), 1).is_err());
        assert!(hybrid_estimator(&d, th(t), 4).is_err());
    }

    #[test]
    fn full_p_is_identity_map() {
        // V_σ is a permutation matrix when p = m, so every term is K itself
        let mut rng = RandomSource::new(2).stream(0);
        let k = random_hermitian(6, &mut rng);
        let a = hybrid_estimator(&k, th(1.7), 6).unwrap();
        assert!(rel(a.as_matrix(), k.as_matrix()) < 1e-14);
        assert!(rel(a.as_matrix(), ewens_estimator(&k, th(1.7)).as_matrix()) > 1e-3);
    }

    #[test]
    fn block_coefficients_constant() {
        let mut rng = RandomSource::new(4).stream(0);
        let (m, p) = (6, 2);
        let k = random_hermitian(m, &mut rng);
        let out = hybrid_estimator(&k, th(2.2), p).unwrap();
        let ratio = |i: usize, j: usize| (out[(i, j)] / k[(i, j)]).re;
        let groups = [
            [(0, 1), (1, 0)],
            [(0, 3), (4, 1)],
            [(2, 3), (5, 4)],
            [(0, 0), (1, 1)],
        ];
        for g in groups {
            assert!((ratio(g[0].0, g[0].1) - ratio(g[1].0, g[1].1)).abs() < 1e-13);
        }
        assert!((ratio(2, 2) - ratio(5, 5)).abs() < 1e-13);
    }

    #[test]
    fn restriction_consistency() {
        // summing μ_{θ,m,p} over the last image recovers μ_{θ,m,p-1}
        for (m, p) in [(4, 2), (5, 3), (5, 5)] {
            let t = th(1.9);
            for prev in enumerate_injections(p - 1, m).unwrap() {
                let total: f64 = (0..m)
                    .filter(|x| !prev.images().contains(x))
                    .map(|x| {
                        let mut im = prev.images().to_vec();
                        im.push(x);
                        injection_probability(&Injection::new(im, m).unwrap(), t)
                    })
                    .sum();
                assert!((total - injection_probability(&prev, t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_inverse_matches_enumeration() {
        for (d, m, p, t) in [
            (vec![1.5, 0.4, 2.0], 3, 3, 2.0),
            (vec![1.5], 3, 1, 2.0),
            (vec![1.0; 5], 5, 2, 0.7),
            (vec![3.0, 0.5, 1.2, 2.2], 6, 2, 1.4),
            (vec![3.0, 0.5], 5, 3, 4.0),
        ] {
            let closed = hybrid_inverse_diagonal(&d, m, th(t), p).unwrap();
            let mut full = d.clone();
            full.resize(m, 0.0);
            let brute = hybrid_inverse_exhaustive(&HermitianMatrix::from_diagonal(&full), th(t), p).unwrap();
            assert!(rel(closed.as_matrix(), brute.as_matrix()) < 1e-12, "{d:?} m={m} p={p}");
        }
        let c = hybrid_inverse_diagonal(&[2.0], 3, th(2.0), 1).unwrap();
        assert!((c[(0, 0)].re - 2.0 / 4.0 / 2.0).abs() < 1e-15);
        assert!(hybrid_inverse_diagonal(&[1.0, 0.0], 3, th(2.0), 1).is_err());
    }

    #[test]
    fn mc_matches_closed_and_exhaustive() {
        let src = RandomSource::new(31);
        let d = [2.0, 1.0, 0.5, 3.0];
        let mut full = d.to_vec();
        full.resize(6, 0.0);
        let mc = hybrid_inverse_mc(&HermitianMatrix::from_diagonal(&full), th(2.0), 3, 20_000, &src).unwrap();
        let closed = hybrid_inverse_diagonal(&d, 6, th(2.0), 3).unwrap();
        assert!(mc.max_z(closed.as_matrix(), 1e-12) < 5.0);

        let mut rng = src.stream(99);
        let k = random_psd(4, 4, &mut rng);
        let mc = hybrid_inverse_mc(&k, th(1.0), 2, 20_000, &src).unwrap();
        let brute = hybrid_inverse_exhaustive(&k, th(1.0), 2).unwrap();
        assert!(mc.max_z(brute.as_matrix(), 1e-12) < 5.0);

        let mc = hybrid_inverse_mc(&k, th(1e6), 4, 2_000, &src).unwrap();
        let inv = pinv(k.as_matrix());
        assert!((&mc.mean - &inv).iter().all(|z| z.norm() < 1e-3));
    }

    #[test]
    fn base_is_exact() {
        let mut rng = RandomSource::new(1).stream(0);
        let k = random_psd(5, 3, &mut rng);
        let a = hybrid_inverse_base(&k, th(2.3)).unwrap();
        let b = hybrid_inverse_exhaustive(&k, th(2.3), 1).unwrap();
        assert!(rel(a.as_matrix(), b.as_matrix()) < 1e-12);
    }

    #[test]
    fn per_draw_block_identity() {
        let mut rng = RandomSource::new(17).stream(0);
        let k = random_psd(5, 5, &mut rng);
        let factor = gram_factor(&k).unwrap();
        for _ in 0..50 {
            let sigma = sample_ewens(5, th(1.5), &mut rng);
            let s = &sigma.images()[..3];
            let cols = gram_columns(&factor, s);
            let gram = cols.adjoint() * &cols;
            assert!(rel(&gram, &compress(k.as_matrix(), s)) < 1e-12);
            let head = cols.columns(0, 2).into_owned();
            let upd = block_pinv_update(&head, &cols.column(2).into_owned());
            let mut lhs = CMatrix::zeros(3, 3);
            lhs.view_mut((0, 0), (2, 2)).copy_from(&pinv(&(head.adjoint() * &head)));
            lhs += &upd.correction;
            let svd = pinv(&gram);
            assert!((lhs - &svd).iter().all(|z| z.norm() < 1e-8 * (1.0 + frobenius_norm(&svd))));
        }
    }

    #[test]
    fn inductive_routes_agree() {
        let src = RandomSource::new(77);
        let d = [2.0, 1.0, 0.5, 3.0];
        let step = hybrid_inverse_inductive_step(
            &HermitianMatrix::from_diagonal(&d),
            &hybrid_inverse_base(&HermitianMatrix::from_diagonal(&d), th(1.5)).unwrap(),
            th(1.5),
            2,
            20_000,
            &src,
        )
        .unwrap();
        let closed = hybrid_inverse_diagonal(&d, 4, th(1.5), 2).unwrap();
        assert!(step.max_z(closed.as_matrix(), 1e-12) < 5.0);

        // matched seeds: level p-1 MC plus the level-p correction reproduces
        // the direct level-p MC draw by draw
        let mut rng = src.stream(5);
        let sigma = HermitianMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let k = sample_gaussian_covariance(&sigma, 4, &mut rng).unwrap();
        let t = th(2.0);
        let prev = hybrid_inverse_mc(&k, t, 2, 5_000, &src).unwrap().hermitian_mean();
        let chained = hybrid_inverse_inductive_step(&k, &prev, t, 3, 5_000, &src).unwrap();
        let direct = hybrid_inverse_mc(&k, t, 3, 5_000, &src).unwrap();
        assert!(rel(&chained.mean, &direct.mean) < 1e-8);

        // the full chain from the exact base, with independent streams
        let chain = hybrid_inverse_inductive(&k, t, 3, 20_000, &src).unwrap();
        let brute = hybrid_inverse_exhaustive(&k, t, 3).unwrap();
        assert!(chain.max_z(brute.as_matrix(), 1e-12) < 5.0);
    }
}
