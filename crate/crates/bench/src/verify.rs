//! Oracle-equivalence suites. Each suite returns per-check residuals against
//! pinned tolerances; a suite passes when every gating check passes.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use singcov::combinatorics::{
    character, enumerate_partitions, hook_character, schur_bialternant, schur_hook_powersum, CycleType, HookShape,
    Partition, PowerSums,
};
use singcov::ewens::{
    enumerate_injections, ewens_estimator, ewens_estimator_bruteforce, hybrid_estimator, hybrid_estimator_exhaustive,
    hybrid_inverse_base, hybrid_inverse_diagonal, hybrid_inverse_exhaustive, hybrid_inverse_inductive,
    hybrid_inverse_inductive_step, hybrid_inverse_mc, injection_probability, sample_ewens, Injection, Theta,
};
use singcov::haar::{
    cov_p_closed, first_moment_closed, haar_power_mc, invcov_p_mc, moment_matrix_coeffs, second_moment_closed,
    trace_moment, trace_moment_mc,
};
use singcov::linalg::{
    block_pinv_update, eig_hermitian, eigenvalues, esd, frobenius_norm, numerical_rank, pinv, sample_gaussian_covariance,
    BlockPinvBranch,
};
use singcov::random::complex_gaussian;
use singcov::toeplitz::{
    ewens_transform_closedform, flat_vector, limiting_support, PowerToeplitz, ToeplitzFamily, TridiagonalToeplitz,
};
use singcov::{CMatrix, CVector, Complex64, HermitianMatrix, RandomSource};

use crate::config::{EstimatorKind, ExperimentConfig, TruthSpec};
use crate::error::{BenchError, BenchResult};
use crate::experiment::{run_experiment, Metric};

pub const SUITES: &[&str] = &[
    "ewens-closedform",
    "hybrid-closedform",
    "hybrid-diagonal",
    "hybrid-inverse",
    "covp",
    "haar-moments",
    "schur",
    "invcov-structure",
    "block-pinv",
    "toeplitz-decomp",
    "toeplitz-spectra",
    "figure5",
    "performance",
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Non-gating checks are reported but do not decide the suite outcome.
    pub gating: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Records `residual <= tolerance`; NaN fails.
    fn le(&mut self, name: &str, residual: f64, tolerance: f64, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            gating: true,
            detail: detail.into(),
        });
    }

    fn flag(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.le(name, if ok { 0.0 } else { 1.0 }, 0.0, detail);
    }

    fn informational(&mut self, name: &str, residual: f64, tolerance: f64, detail: impl Into<String>) {
        self.le(name, residual, tolerance, detail);
        self.0.last_mut().expect("just pushed").gating = false;
    }
}

/// Runs a suite by name.
pub fn run_suite(name: &str, seed: u64) -> BenchResult<SuiteReport> {
    let start = Instant::now();
    let src = RandomSource::new(seed);
    let mut c = Checks::default();
    match name {
        "ewens-closedform" => ewens_closedform(&src, &mut c)?,
        "hybrid-closedform" => hybrid_closedform(&src, &mut c)?,
        "hybrid-diagonal" => hybrid_diagonal(&src, &mut c)?,
        "hybrid-inverse" => hybrid_inverse(&src, &mut c)?,
        "covp" => covp(&src, &mut c)?,
        "haar-moments" => haar_moments(&src, &mut c)?,
        "schur" => schur(&src, &mut c)?,
        "invcov-structure" => invcov_structure(&src, &mut c)?,
        "block-pinv" => block_pinv(&src, &mut c)?,
        "toeplitz-decomp" => toeplitz_decomp(&mut c)?,
        "toeplitz-spectra" => toeplitz_spectra(&mut c)?,
        "figure5" => figure5(seed, &mut c)?,
        "performance" => performance(seed, &mut c)?,
        _ => {
            return Err(BenchError::UnknownSuite { name: name.to_string(), available: SUITES.join(", ") });
        }
    }
    let checks = c.0;
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|k| k.passed || !k.gating),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

fn th(t: f64) -> Theta {
    Theta::new(t).expect("positive θ")
}

const THETAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn random_hermitian<R: Rng>(m: usize, rng: &mut R) -> HermitianMatrix {
    let g = CMatrix::from_fn(m, m, |_, _| complex_gaussian(rng));
    HermitianMatrix::symmetrized(&g + g.adjoint())
}

fn random_psd<R: Rng>(m: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    let g = CMatrix::from_fn(m, rank, |_, _| complex_gaussian(rng));
    HermitianMatrix::symmetrized(&g * g.adjoint())
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |x, z| x.max(z.norm()))
}

/// `max |a_ij - b_ij| / max |b_ij|`.
fn rel_entrywise(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(f64::MIN_POSITIVE)
}

fn ewens_closedform(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(1).stream(0);
    let (mut worst, mut worst_trace, mut cases) = (0.0f64, 0.0f64, 0);
    for m in 2..=7 {
        for t in THETAS {
            for _ in 0..20 {
                let k = random_hermitian(m, &mut rng);
                let a = ewens_estimator(&k, th(t));
                let b = ewens_estimator_bruteforce(&k, th(t))?;
                worst = worst.max(rel_entrywise(a.as_matrix(), b.as_matrix()));
                worst_trace = worst_trace.max((a.trace() - k.trace()).abs() / (1.0 + k.trace().abs()));
                cases += 1;
            }
        }
    }
    c.le("closed form vs S_m enumeration", worst, 1e-12, format!("{cases} cases, m 2..7, θ in {THETAS:?}"));
    c.le("trace preserved", worst_trace, 1e-12, "");

    let mut low = 0.0f64;
    for t in THETAS {
        let k = random_psd(6, 2, &mut rng);
        let ev = eigenvalues(&ewens_estimator(&k, th(t)))?;
        low = low.max(-ev.iter().fold(f64::INFINITY, |a, &x| a.min(x)));
    }
    c.le("PSD preserved", low, 1e-10, "negated smallest eigenvalue");

    let k = random_hermitian(6, &mut rng);
    let far = ewens_estimator(&k, th(1e8));
    c.le(
        "theta to infinity",
        frobenius_norm(&(far.as_matrix() - k.as_matrix())) / frobenius_norm(k.as_matrix()),
        1e-6,
        "θ = 1e8",
    );

    let m = 5;
    let k = random_hermitian(m, &mut rng);
    let total: Complex64 = k.as_matrix().iter().sum();
    let alpha = total / m as f64;
    let beta = (Complex64::new(k.trace(), 0.0) - alpha) / (m as f64 - 1.0);
    let ones = CMatrix::from_element(m, m, Complex64::new(1.0 / m as f64, 0.0));
    let uniform = &ones * alpha + (CMatrix::identity(m, m) - &ones) * beta;
    c.le("uniform remark", rel_entrywise(ewens_estimator(&k, th(1.0)).as_matrix(), &uniform), 1e-12, "θ = 1");

    let d = [2.0, 0.5, 1.5, 3.0];
    let t = 2.5;
    let tr: f64 = d.iter().sum();
    let loaded: Vec<f64> = d.iter().map(|x| ((t - 1.0) * x + tr) / (t + 3.0)).collect();
    c.le(
        "diagonal remark",
        rel_entrywise(
            ewens_estimator(&HermitianMatrix::from_diagonal(&d), th(t)).as_matrix(),
            HermitianMatrix::from_diagonal(&loaded).as_matrix(),
        ),
        1e-12,
        "",
    );
    Ok(())
}

fn hybrid_closedform(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(2).stream(0);
    let (mut worst, mut cases) = (0.0f64, 0);
    for m in 2..=7 {
        for p in 1..=m {
            for t in THETAS {
                for _ in 0..3 {
                    let k = random_hermitian(m, &mut rng);
                    let a = hybrid_estimator(&k, th(t), p)?;
                    let b = hybrid_estimator_exhaustive(&k, th(t), p)?;
                    worst = worst.max(rel_entrywise(a.as_matrix(), b.as_matrix()));
                    cases += 1;
                }
            }
        }
    }
    c.le("closed form vs S_(p,m) enumeration", worst, 1e-12, format!("{cases} cases, m 2..7, all p"));

    // the two small remark matrices, both against the closed form and the oracle
    let (mut rem_closed, mut rem_oracle) = (0.0f64, 0.0f64);
    for t in THETAS {
        let k = random_hermitian(3, &mut rng);
        let a = |i: usize, j: usize| k[(i, j)];
        let w = [[t + 1.0, t, 1.0], [t, t + 1.0, 1.0], [1.0, 1.0, 2.0]];
        let remark = CMatrix::from_fn(3, 3, |i, j| a(i, j) * w[i][j] / (t + 2.0));
        rem_closed = rem_closed.max(rel_entrywise(hybrid_estimator(&k, th(t), 2)?.as_matrix(), &remark));
        rem_oracle = rem_oracle.max(rel_entrywise(hybrid_estimator_exhaustive(&k, th(t), 2)?.as_matrix(), &remark));

        let d = [1.0 + t, 0.7, 2.0];
        let remark = HermitianMatrix::from_diagonal(&[t * d[0] / (t + 2.0), d[1] / (t + 2.0), d[2] / (t + 2.0)]);
        let dm = HermitianMatrix::from_diagonal(&d);
        rem_closed = rem_closed.max(rel_entrywise(hybrid_estimator(&dm, th(t), 1)?.as_matrix(), remark.as_matrix()));
        rem_oracle =
            rem_oracle.max(rel_entrywise(hybrid_estimator_exhaustive(&dm, th(t), 1)?.as_matrix(), remark.as_matrix()));
    }
    c.le("remark matrices K(θ,3,2), K(θ,3,1): closed form", rem_closed, 1e-12, "");
    c.le("remark matrices K(θ,3,2), K(θ,3,1): enumeration", rem_oracle, 1e-12, "");

    let k = random_hermitian(6, &mut rng);
    c.le(
        "p = m gives K",
        rel_entrywise(hybrid_estimator(&k, th(1.7), 6)?.as_matrix(), k.as_matrix()),
        1e-14,
        "V_σ is a permutation matrix when p = m",
    );

    // entry ratios are constant within each (i<=p, j<=p, i=j) class
    let (m, p) = (7, 3);
    let k = random_hermitian(m, &mut rng);
    let out = hybrid_estimator(&k, th(2.2), p)?;
    let mut classes: std::collections::BTreeMap<(bool, bool, bool), Vec<f64>> = Default::default();
    for i in 0..m {
        for j in 0..m {
            let key = (i == j, i < p, j < p);
            let key = if i != j && key.1 != key.2 { (false, true, false) } else { key };
            classes.entry(key).or_default().push((out[(i, j)] / k[(i, j)]).re);
        }
    }
    let spread = classes
        .values()
        .map(|v| v.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x)) - v.iter().fold(f64::INFINITY, |a, &x| a.min(x)))
        .fold(0.0, f64::max);
    c.le("block coefficient structure", spread, 1e-12, format!("{} classes", classes.len()));
    Ok(())
}

fn hybrid_diagonal(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(3).stream(0);
    let (mut statement, mut proof, mut cases) = (0.0f64, 0.0f64, 0);
    for m in 2..=6 {
        for n in 1..=m {
            for p in 1..=n {
                for t in THETAS {
                    let d: Vec<f64> = (0..n).map(|_| 0.2 + 2.0 * rng.random::<f64>()).collect();
                    let mut full = d.clone();
                    full.resize(m, 0.0);
                    let oracle = hybrid_inverse_exhaustive(&HermitianMatrix::from_diagonal(&full), th(t), p)?;
                    let closed = hybrid_inverse_diagonal(&d, m, th(t), p)?;
                    statement = statement.max(rel_entrywise(closed.as_matrix(), oracle.as_matrix()));
                    if p < n {
                        // the proof's case labels: enhanced coefficient on p+1..n instead of 1..p
                        let (mf, pf) = (m as f64, p as f64);
                        let swapped: Vec<f64> = (0..m)
                            .map(|i| {
                                if i >= n {
                                    0.0
                                } else if i < p {
                                    pf / (t + mf - 1.0) / d[i]
                                } else {
                                    (t + pf - 1.0) / (t + mf - 1.0) / d[i]
                                }
                            })
                            .collect();
                        let r = rel_entrywise(HermitianMatrix::from_diagonal(&swapped).as_matrix(), oracle.as_matrix());
                        proof = proof.max(r);
                    }
                    cases += 1;
                }
            }
        }
    }
    c.le("diagonal closed form vs enumeration", statement, 1e-12, format!("{cases} cases, m <= 6, p <= n <= m"));
    c.flag(
        "coefficient placement adjudicated",
        statement <= 1e-12 && proof > 1e-3,
        format!(
            "oracle confirms the theorem statement (enhanced coefficient on entries 1..p); the proof-label reading is off by {proof:.3e}"
        ),
    );

    let t = 2.0;
    let d = [1.3, 0.4, 2.2];
    let oracle = hybrid_inverse_exhaustive(&HermitianMatrix::from_diagonal(&d), th(t), 3)?;
    c.le(
        "m = n = p = 3 example",
        rel_entrywise(hybrid_inverse_diagonal(&d, 3, th(t), 3)?.as_matrix(), oracle.as_matrix()),
        1e-12,
        "",
    );
    let single = hybrid_inverse_diagonal(&[1.7], 3, th(t), 1)?;
    c.le("p = 1 example", (single[(0, 0)].re - t / (t + 2.0) / 1.7).abs(), 1e-15, "θ/(θ+2)·d⁻¹");
    Ok(())
}

/// Max `|mean - reference| / se` helper with a small floor for exact zeros.
const SE_FLOOR: f64 = 1e-10;

fn hybrid_inverse(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(4).stream(0);
    let d = [2.0, 1.0, 0.5, 3.0];
    let mut full = d.to_vec();
    full.resize(6, 0.0);
    let mc = hybrid_inverse_mc(&HermitianMatrix::from_diagonal(&full), th(2.0), 3, 20_000, &src.derive(41))?;
    let closed = hybrid_inverse_diagonal(&d, 6, th(2.0), 3)?;
    c.le("MC vs diagonal closed form", mc.max_z(closed.as_matrix(), SE_FLOOR), 5.0, "m=6, p=3, θ=2, max |z|");

    let k = random_psd(4, 4, &mut rng);
    let mc = hybrid_inverse_mc(&k, th(1.0), 2, 20_000, &src.derive(42))?;
    let oracle = hybrid_inverse_exhaustive(&k, th(1.0), 2)?;
    c.le("MC vs enumeration", mc.max_z(oracle.as_matrix(), SE_FLOOR), 5.0, "4×4 PSD, p=2, θ=1, max |z|");

    let mc = hybrid_inverse_mc(&k, th(1e6), 4, 2_000, &src.derive(43))?;
    c.le("large θ gives K⁻¹", max_abs(&(&mc.mean - pinv(k.as_matrix()))), 1e-3, "θ = 1e6, p = m");

    let dm = HermitianMatrix::from_diagonal(&d);
    let step = hybrid_inverse_inductive_step(&dm, &hybrid_inverse_base(&dm, th(1.5))?, th(1.5), 2, 20_000, &src.derive(44))?;
    let closed = hybrid_inverse_diagonal(&d, 4, th(1.5), 2)?;
    c.le("inductive step vs diagonal closed form", step.max_z(closed.as_matrix(), SE_FLOOR), 5.0, "p=2, m=4");

    // per draw: pinv of the Gram matrix equals the padded block plus E_σ
    let factor = singcov::ewens::hybrid::gram_factor(&k)?;
    let (mut worst, mut schur_draws) = (0.0f64, 0);
    for _ in 0..200 {
        let sigma = sample_ewens(4, th(1.5), &mut rng);
        let s = &sigma.images()[..3];
        let cols = CMatrix::from_fn(4, 3, |r, j| factor[(s[j], r)].conj());
        let head = cols.columns(0, 2).into_owned();
        let tail: CVector = cols.column(2).into_owned();
        let upd = block_pinv_update(&head, &tail);
        if upd.branch == BlockPinvBranch::Schur {
            schur_draws += 1;
        }
        let mut lhs = CMatrix::zeros(3, 3);
        lhs.view_mut((0, 0), (2, 2)).copy_from(&pinv(&(head.adjoint() * &head)));
        lhs += &upd.correction;
        let svd = pinv(&(cols.adjoint() * &cols));
        worst = worst.max(max_abs(&(lhs - &svd)) / (1.0 + max_abs(&svd)));
    }
    c.le("per-draw block identity", worst, 1e-8, format!("{schur_draws}/200 draws on the s ≠ 0 branch"));

    let sigma = HermitianMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
    let k5 = sample_gaussian_covariance(&sigma, 4, &mut rng)?;
    let t = th(2.0);
    let shared = src.derive(45);
    let prev = hybrid_inverse_mc(&k5, t, 2, 5_000, &shared)?.hermitian_mean();
    let chained = hybrid_inverse_inductive_step(&k5, &prev, t, 3, 5_000, &shared)?;
    let direct = hybrid_inverse_mc(&k5, t, 3, 5_000, &shared)?;
    c.le(
        "matched-seed chain equals direct MC",
        frobenius_norm(&(&chained.mean - &direct.mean)) / frobenius_norm(&direct.mean),
        1e-8,
        "m=5, p=3",
    );
    let chain = hybrid_inverse_inductive(&k5, t, 3, 20_000, &src.derive(46))?;
    let oracle = hybrid_inverse_exhaustive(&k5, t, 3)?;
    c.le("full chain vs enumeration", chain.max_z(oracle.as_matrix(), SE_FLOOR), 5.0, "m=5, p=3, max |z|");

    let mut restriction = 0.0f64;
    for (m, p) in [(4, 2), (5, 3), (6, 4)] {
        for prev in enumerate_injections(p - 1, m)? {
            let total: f64 = (0..m)
                .filter(|x| !prev.images().contains(x))
                .map(|x| {
                    let mut im = prev.images().to_vec();
                    im.push(x);
                    injection_probability(&Injection::new(im, m).expect("injective"), t)
                })
                .sum();
            restriction = restriction.max((total - injection_probability(&prev, t)).abs());
        }
    }
    c.le("restriction of μ(θ,m,p) is μ(θ,m,p-1)", restriction, 1e-13, "");
    Ok(())
}

fn covp(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(5).stream(0);
    let k = random_psd(6, 6, &mut rng);
    for p in [2, 3, 4] {
        let closed = cov_p_closed(&k, p)?;
        let mc = haar_power_mc(&k, p, 1, 200_000, &src.derive(50 + p as u64))?;
        c.le(&format!("cov_p closed form vs Haar MC, p={p}"), mc.max_z(closed.as_matrix(), SE_FLOOR), 5.0, "m=6, 2e5 draws, max |z|");
        let expected = p as f64 / 6.0 * k.trace();
        c.le(&format!("trace identity, p={p}"), (closed.trace() - expected).abs() / expected.abs(), 1e-12, "Tr cov_p = (p/m) Tr K");
    }
    Ok(())
}

fn haar_moments(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(6).stream(0);
    let mut label = 60;
    for n in [4, 5] {
        for p in [2, 3] {
            let d: Vec<f64> = (0..n).map(|_| 0.3 + 2.0 * rng.random::<f64>()).collect();
            let dm = HermitianMatrix::from_diagonal(&d);
            let shown = [first_moment_closed(&d, p)?, second_moment_closed(&d, p)?];
            for (l, closed) in [1u32, 2].into_iter().zip(shown) {
                label += 1;
                let mc = haar_power_mc(&dm, p, l, 100_000, &src.derive(label))?;
                c.le(&format!("l={l} closed form vs MC, n={n}, p={p}"), mc.max_z(closed.as_matrix(), SE_FLOOR), 5.0, "max |z|");
                let general = moment_matrix_coeffs(&d, p, l as usize)?.apply(&d);
                c.le(
                    &format!("l={l} display vs hook-sum formula, n={n}, p={p}"),
                    rel_entrywise(closed.as_matrix(), general.as_matrix()),
                    1e-12,
                    "",
                );
            }
            for order in 1..=4u32 {
                label += 1;
                let exact = trace_moment(&d, p, order as usize)?;
                let (mean, se) = trace_moment_mc(&d, p, order, 100_000, &src.derive(label))?;
                c.le(&format!("trace moment N={order}, n={n}, p={p}"), (mean - exact).abs() / se.max(SE_FLOOR), 5.0, "|z|");
            }
        }
    }
    Ok(())
}

fn schur(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(7).stream(0);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for big_n in 1..=6 {
        for j in 0..big_n {
            let shape = HookShape::new(big_n, j)?;
            for n in (j + 1)..=5 {
                for _ in 0..5 {
                    let x: Vec<f64> = (0..n).map(|_| 0.1 + 2.0 * rng.random::<f64>()).collect();
                    let a = schur_hook_powersum(shape, &PowerSums::of(&x, big_n))?;
                    let b = schur_bialternant(&shape.partition(), &x)?;
                    worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
                    cases += 1;
                }
            }
        }
    }
    c.le("power-sum vs bialternant, hooks N <= 6, n <= 5", worst, 1e-10, format!("{cases} evaluations"));

    let rhos = [vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]];
    let expected = [[1, 1, 1], [2, 0, -1], [1, -1, 1]];
    let mut mismatches = 0;
    for (j, row) in expected.iter().enumerate() {
        for (rho, &want) in rhos.iter().zip(row) {
            let got = hook_character(HookShape::new(3, j)?, &CycleType::from_multiplicities(rho.clone()))?;
            mismatches += (got != want) as usize;
        }
    }
    c.le("weight-3 character table", mismatches as f64, 0.0, "nine integers");

    let mut orth = 0i128;
    for big_n in 1..=5 {
        let fact: u128 = (1..=big_n as u128).product();
        for j in 0..big_n {
            let lam = HookShape::new(big_n, j)?.partition();
            let mut sum: u128 = 0;
            for rho in enumerate_partitions(big_n) {
                let ct = CycleType::from_partition(&rho);
                let chi = character(&lam, &ct)?;
                sum += fact / ct.z() * (chi * chi) as u128;
            }
            orth = orth.max((sum as i128 - fact as i128).abs());
        }
    }
    c.le("character orthogonality, hooks N <= 5", orth as f64, 0.0, "exact integers");

    let (mut w211, mut w22) = (0.0f64, 0.0f64);
    let p211 = Partition::new(vec![2, 1, 1])?;
    let p22 = Partition::new(vec![2, 2, 0])?;
    for _ in 0..20 {
        let x: Vec<f64> = (0..3).map(|_| -1.0 + 3.0 * rng.random::<f64>()).collect();
        let (a, b, d) = (x[0], x[1], x[2]);
        let e211 = a * b * d * (a + b + d);
        let e22 = a * a * b * b + a * a * d * d + b * b * d * d + a * a * b * d + a * b * b * d + a * b * d * d;
        w211 = w211.max((schur_bialternant(&p211, &x)? - e211).abs() / (1.0 + e211.abs()));
        w22 = w22.max((schur_bialternant(&p22, &x)? - e22).abs() / (1.0 + e22.abs()));
    }
    c.le("s(2,1,1) closed form", w211, 1e-10, "20 random points");
    c.le("s(2,2,0) six-monomial expansion", w22, 1e-10, "20 random points");
    let ones = schur_bialternant(&p22, &[1.0, 1.0, 1.0])?;
    c.le("s(2,2,0)(1,1,1) = 6", (ones - 6.0).abs(), 1e-10, "coincident arguments");
    Ok(())
}

fn invcov_structure(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let samples = 200_000;
    let d = [2.5, 1.6, 0.9, 0.4, 0.0, 0.0];
    let mc = invcov_p_mc(&HermitianMatrix::from_diagonal(&d), 3, samples, &src.derive(80))?;
    let mut off = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                off = off.max(mc.mean[(i, j)].re.abs() / mc.se_re[(i, j)].max(SE_FLOOR));
                off = off.max(mc.mean[(i, j)].im.abs() / mc.se_im[(i, j)].max(SE_FLOOR));
            }
        }
    }
    c.le("off-diagonal entries vanish", off, 5.0, format!("m=6, n=4, p=3, {samples} draws, max |z|; rejected {}", mc.rejected));
    let pair = |mc: &singcov::mc::McEstimate, a: usize, b: usize| {
        (mc.mean[(a, a)].re - mc.mean[(b, b)].re).abs() / mc.se_re[(a, a)].hypot(mc.se_re[(b, b)]).max(SE_FLOOR)
    };
    c.le("zero-block diagonal is constant", pair(&mc, 4, 5), 5.0, "|z| of the difference");

    let d = [1.8, 1.8, 0.7, 0.3, 0.0, 0.0];
    let mc = invcov_p_mc(&HermitianMatrix::from_diagonal(&d), 3, samples, &src.derive(81))?;
    c.le("equal eigenvalues map to equal values", pair(&mc, 0, 1), 5.0, "d_1 = d_2, |z| of the difference");
    Ok(())
}

fn block_pinv(src: &RandomSource, c: &mut Checks) -> BenchResult<()> {
    let mut rng = src.derive(9).stream(0);
    let (mut worst, mut schur_n, mut range_n, mut total) = (0.0f64, 0, 0, 0);
    for rows in 2..=6 {
        for cols in 2..=6 {
            for inst in 0..100 {
                let mut head = CMatrix::from_fn(rows, cols - 1, |_, _| complex_gaussian(&mut rng));
                if inst % 4 == 1 && cols > 2 {
                    // repeated column: rank-deficient head
                    let first = head.column(0).into_owned();
                    head.set_column(cols - 2, &first);
                }
                let tail: CVector = if inst % 4 == 2 {
                    let x = CVector::from_fn(cols - 1, |_, _| complex_gaussian(&mut rng));
                    &head * x
                } else {
                    CVector::from_fn(rows, |_, _| complex_gaussian(&mut rng))
                };
                let upd = block_pinv_update(&head, &tail);
                let mut full = CMatrix::zeros(rows, cols);
                full.columns_mut(0, cols - 1).copy_from(&head);
                full.set_column(cols - 1, &tail);
                // (M*M)^+ = M^+ (M^+)*, avoiding the squared condition number of M*M
                let mp = pinv(&full);
                let svd = &mp * mp.adjoint();
                worst = worst.max(max_abs(&(upd.pinv.as_matrix() - &svd)) / max_abs(&svd).max(f64::MIN_POSITIVE));
                match upd.branch {
                    BlockPinvBranch::Schur => schur_n += 1,
                    BlockPinvBranch::InRange => range_n += 1,
                }
                total += 1;
            }
        }
    }
    c.le("block update vs SVD pseudoinverse", worst, 1e-8, format!("{total} instances, shapes (2..6)², relative max entry"));
    c.flag("both branches exercised", schur_n > 0 && range_n > 0, format!("s ≠ 0: {schur_n}, s = 0: {range_n}"));
    Ok(())
}

fn toeplitz_decomp(c: &mut Checks) -> BenchResult<()> {
    let mut worst = [0.0f64; 2];
    for m in 5..=50 {
        for t in [0.5, 1.0, 2.0, 5.0, m as f64, 3.0 * m as f64] {
            for (slot, fam) in [ToeplitzFamily::Tridiagonal { b: 0.3 }, ToeplitzFamily::Power { alpha: 0.5 }]
                .into_iter()
                .enumerate()
            {
                let a = ewens_transform_closedform(fam, m, th(t))?;
                let b = ewens_estimator(&fam.matrix(m)?, th(t));
                worst[slot] = worst[slot].max(max_abs(&(a.as_matrix() - b.as_matrix())));
            }
        }
    }
    c.le("B_θ decomposition vs closed form", worst[0], 1e-10, "m 5..50, b = 0.3");
    c.le("A_θ decomposition vs closed form", worst[1], 1e-10, "m 5..50, α = 0.5; corrected coefficients");
    let b = TridiagonalToeplitz::new(20, 0.3)?.matrix();
    let far = ewens_transform_closedform(ToeplitzFamily::Tridiagonal { b: 0.3 }, 20, th(1e8))?;
    c.le("B_θ tends to B", frobenius_norm(&(far.as_matrix() - b.as_matrix())), 1e-6, "θ = 1e8");
    Ok(())
}

fn toeplitz_spectra(c: &mut Checks) -> BenchResult<()> {
    let tri = TridiagonalToeplitz::new(200, 0.3)?;
    let numeric = eigenvalues(&tri.matrix())?;
    let worst = numeric.iter().zip(tri.eigensystem().eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.le("(a) tridiagonal eigenvalues, m=200", worst, 1e-10, "closed form vs numeric");

    let mut det_worst = 0.0f64;
    let mut inv_worst = 0.0f64;
    for m in 1..=50 {
        for alpha in [0.3, 0.5, 0.8] {
            let a = PowerToeplitz::new(m, alpha)?;
            let lu = a.matrix().as_matrix().clone().lu().determinant().re;
            det_worst = det_worst.max((lu - a.det()).abs() / a.det());
            let prod = a.matrix().as_matrix() * a.inverse().as_matrix();
            inv_worst = inv_worst.max(max_abs(&(prod - CMatrix::identity(m, m))));
        }
    }
    c.le("(b) det(A_α) = (1-α²)^(m-1) vs LU", det_worst, 1e-10, "m <= 50, relative");
    c.le("(b) A_α times tridiagonal inverse", inv_worst, 1e-10, "m <= 50");

    let m = 300;
    let fam = ToeplitzFamily::Tridiagonal { b: 0.3 };
    let bt = ewens_transform_closedform(fam, m, th(m as f64))?;
    let sd = eig_hermitian(&bt)?;
    let sup = limiting_support(fam, 1.0)?;
    let (top, second, low) = (sd.eigenvalues[0], sd.eigenvalues[1], sd.eigenvalues[m - 1]);
    let literal = (top - sup.hi).abs().max((low - sup.lo).abs());
    c.informational(
        "(d) literal: extreme eigenvalues within 0.05 of [0.85, 1.15]",
        literal,
        0.05,
        format!(
            "λ_max = {top:.4} is a rank-one outlier along e (e^T B_θ e / m = {:.4}); not attainable as stated",
            rayleigh_flat(&bt)
        ),
    );
    let outside = sd.eigenvalues.iter().filter(|&&x| !sup.contains(x, 0.05)).count();
    let align = sd.eigenvectors.column(0).dotc(&flat_vector(m)).norm();
    let bulk = (second - sup.hi).abs().max((low - sup.lo).abs());
    c.le(
        "(d) bulk edges within 0.05 of [0.85, 1.15]",
        bulk,
        0.05,
        format!("λ_min = {low:.4}, largest non-outlier = {second:.4}"),
    );
    c.flag(
        "(d) exactly one outlier, aligned with e",
        outside == 1 && align > 0.9,
        format!("{outside} eigenvalue(s) outside the widened support, |<v, e/√m>| = {align:.4}"),
    );

    let e = esd(&tri_300())?;
    let dist = e.kolmogorov_distance(|x| TridiagonalToeplitz { m: 300, b: 0.3 }.symbol().cdf(x));
    c.le("(e) ESD of B vs symbol push-forward", dist, 0.05, "m = 300, Kolmogorov distance");

    let fixed = esd(&ewens_transform_closedform(fam, m, th(2.0))?)?;
    c.le(
        "fixed θ concentrates at 1",
        fixed.mass_outside(0.95, 1.05),
        0.02 + 1.0 / m as f64,
        "θ = 2, mass outside [0.95, 1.05]",
    );
    Ok(())
}

fn tri_300() -> HermitianMatrix {
    TridiagonalToeplitz { m: 300, b: 0.3 }.matrix()
}

fn rayleigh_flat(a: &HermitianMatrix) -> f64 {
    let e = flat_vector(a.dim());
    e.dotc(&(a.as_matrix() * &e)).re
}

/// The Figure-5 realization: `m = 200`, `n = 150`, `α = 0.5`.
fn figure5(seed: u64, c: &mut Checks) -> BenchResult<()> {
    let (m, n, p, theta) = (200, 150, 45, 261.0);
    let truth = TruthSpec::Power { alpha: 0.5 }.matrix(m)?;
    let mut rng = RandomSource::new(seed).derive(10).stream(0);
    let k = sample_gaussian_covariance(&truth, n, &mut rng)?;
    let rank = numerical_rank(&k)?;
    c.le("sample covariance rank = 150", (rank as f64 - n as f64).abs(), 0.0, format!("rank {rank}, {} zero eigenvalues", m - rank));

    let ew_est = ewens_estimator(&k, th(theta));
    let sd = eig_hermitian(&ew_est)?;
    let ew = &sd.eigenvalues;
    let (ew_lo, ew_hi, ew_second) = (ew[m - 1], ew[0], ew[1]);
    c.flag("Ewens (θ=261) spectrum strictly positive", ew_lo > 0.0, format!("λ_min = {ew_lo:.4}"));
    c.informational(
        "Ewens (θ=261) spectrum within [0.2, 3.5]",
        (0.2 - ew_lo).max(ew_hi - 3.5).max(0.0),
        0.0,
        format!(
            "[{ew_lo:.4}, {ew_hi:.4}]; λ_max is the rank-one outlier along e (e^T K e / m = {:.4} is preserved by the transform)",
            rayleigh_flat(&k)
        ),
    );
    let align = sd.eigenvectors.column(0).dotc(&flat_vector(m)).norm();
    c.flag(
        "Ewens (θ=261) spectrum below the top eigenvalue within [0.2, 3.5]",
        ew_lo >= 0.2 && ew_second <= 3.5,
        format!("bulk [{ew_lo:.4}, {ew_second:.4}]; top eigenvector has |<v, e/√m>| = {align:.4}"),
    );

    let (x, spec) = singcov::haar::invcov_p_structured(&k, p, 4000, &RandomSource::new(seed).derive(11))?;
    let inv = eigenvalues(&x)?;
    let scaled: Vec<f64> = inv.iter().map(|&v| p as f64 / m as f64 / v).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    c.flag(
        "inverse invcov (p=45) spectrum strictly positive",
        inv.iter().all(|&v| v > 0.0),
        format!("λ_min = {lo:.4}, {} rejected draws", spec.rejected),
    );
    c.flag("inverse invcov (p=45) spectrum within [0.2, 3.5]", lo >= 0.2 && hi <= 3.5, format!("[{lo:.4}, {hi:.4}]"));
    Ok(())
}

/// Property behind the Ewens-vs-sample comparison: the mean `F(θ)` curve dips
/// strictly below the sample-covariance error at an interior grid point.
fn performance(seed: u64, c: &mut Checks) -> BenchResult<()> {
    let m = 100;
    let cfg = ExperimentConfig {
        m,
        n: 75,
        truth: TruthSpec::Power { alpha: 0.5 },
        estimators: vec![EstimatorKind::Sample, EstimatorKind::Ewens],
        theta_grid: performance_theta_grid(m),
        p_grid: vec![],
        mc_samples: 1,
        seed,
        trials: 10,
        output_dir: None,
        dl_grid: None,
    };
    let report = run_experiment(&cfg)?;
    let baseline = report.row(EstimatorKind::Sample, Metric::Cov).next().expect("sample row").mean;
    let curve: Vec<(f64, f64)> =
        report.row(EstimatorKind::Ewens, Metric::Cov).map(|r| (r.point.theta.expect("θ"), r.mean)).collect();
    let (argmin, best) = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, &(_, v))| (i, v))
        .expect("nonempty grid");
    c.le(
        "min mean F(θ) below mean |A - K|",
        best - baseline,
        -f64::MIN_POSITIVE,
        format!("min F = {best:.4} at θ = {}, |A - K| = {baseline:.4}", curve[argmin].0),
    );
    c.flag(
        "F(θ) minimizer is interior",
        argmin > 0 && argmin + 1 < curve.len(),
        format!("argmin index {argmin} of {}", curve.len()),
    );
    Ok(())
}

/// `θ` grid from 1 to `5m`.
pub fn performance_theta_grid(m: usize) -> Vec<f64> {
    let mf = m as f64;
    let mut g = vec![1.0, 2.0, 5.0, 10.0];
    g.extend([0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0].iter().map(|f| f * mf));
    g
}
