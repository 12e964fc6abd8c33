//! Repeated-trial error curves of every estimator against a known truth.
//!
//! Metrics (Frobenius norms, `A` the truth):
//! - `F = |A - X|` for estimators `X` of `A`,
//! - `f = |A - (p/m) invcov_p(K)^{-1}|` and `g = |A^{-1} - (m/p) invcov_p(K)|`
//!   for the Haar inverse estimator; the hybrid inverse `K̃` uses
//!   `f = |A - K̃^+|`, `g = |A^{-1} - K̃|`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use singcov::ewens::{ewens_estimator, hybrid_estimator, hybrid_inverse_mc, Theta};
use singcov::haar::{cov_p_closed, invcov_p_structured};
use singcov::linalg::io::fmt_f64;
use singcov::linalg::{
    eig_hermitian, frobenius_norm, numerical_rank, pseudoinverse_default, sample_gaussian_covariance,
};
use singcov::{CMatrix, HermitianMatrix, RandomSource};

use crate::config::{EstimatorKind, ExperimentConfig, LoadingGrid};
use crate::error::BenchResult;

/// Condition number above which `X^{-1}` in metric `f` is replaced by the
/// pseudoinverse.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    /// Error of an estimate of the truth.
    Cov,
    /// Error of the inverted precision estimate against the truth.
    InvInverted,
    /// Error of a precision estimate against the inverse truth.
    Precision,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cov => "F",
            Self::InvInverted => "f",
            Self::Precision => "g",
        }
    }
}

/// One grid point of one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub theta: Option<f64>,
    pub p: Option<usize>,
}

/// A single metric value from one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub trial: usize,
    pub estimator: EstimatorKind,
    pub point: GridPoint,
    pub metric: Metric,
    /// `None` when the estimator could not be evaluated at this point.
    pub value: Option<f64>,
    pub condition: Option<f64>,
    pub note: String,
}

/// Mean and standard deviation over trials of one metric at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub estimator: EstimatorKind,
    pub point: GridPoint,
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one trial.
    pub std: f64,
    pub valid_trials: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub rows: Vec<MetricRow>,
    pub raw: Vec<RawRecord>,
    /// `|A - K|_F` per trial, the baseline every curve is compared to.
    pub sample_error: Vec<f64>,
}

impl MetricReport {
    pub fn row(&self, estimator: EstimatorKind, metric: Metric) -> impl Iterator<Item = &MetricRow> {
        self.rows.iter().filter(move |r| r.estimator == estimator && r.metric == metric)
    }
}

/// The grid points an estimator is evaluated on.
pub fn grid_points(kind: EstimatorKind, cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let thetas: Vec<Option<f64>> = if kind.uses_theta() { cfg.theta_grid.iter().map(|&t| Some(t)).collect() } else { vec![None] };
    let ps: Vec<Option<usize>> = if kind.uses_p() { cfg.p_grid.iter().map(|&p| Some(p)).collect() } else { vec![None] };
    let mut out = Vec::new();
    for &theta in &thetas {
        for &p in &ps {
            out.push(GridPoint { theta, p });
        }
    }
    out
}

fn metrics_of(kind: EstimatorKind) -> &'static [Metric] {
    match kind {
        EstimatorKind::Invcovp | EstimatorKind::HybridInverse => &[Metric::InvInverted, Metric::Precision],
        EstimatorKind::Truth => &[Metric::Cov, Metric::InvInverted, Metric::Precision],
        _ => &[Metric::Cov],
    }
}

fn dist(a: &HermitianMatrix, b: &CMatrix) -> f64 {
    frobenius_norm(&(a.as_matrix() - b))
}

/// `X^{-1}` (or `X^+` when the condition number exceeds [`MAX_CONDITION`]),
/// with the condition number.
fn guarded_inverse(x: &HermitianMatrix) -> BenchResult<(HermitianMatrix, f64, bool)> {
    let sd = eig_hermitian(x)?;
    let top = sd.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let low = sd.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let cond = if low > 0.0 { top / low } else { f64::INFINITY };
    if cond > MAX_CONDITION {
        Ok((pseudoinverse_default(x)?, cond, true))
    } else {
        Ok((sd.map_spectrum(|v| 1.0 / v), cond, false))
    }
}

/// Smallest `|A - (aK + bI)|_F` over the grid, from the Gram quantities of
/// `A`, `K` and `I`.
fn loading_oracle(truth: &HermitianMatrix, k: &HermitianMatrix, grid: &LoadingGrid) -> (f64, f64, f64) {
    let inner = |x: &CMatrix, y: &CMatrix| x.iter().zip(y.iter()).map(|(u, v)| (u.conj() * v).re).sum::<f64>();
    let (a, km) = (truth.as_matrix(), k.as_matrix());
    let aa = inner(a, a);
    let kk = inner(km, km);
    let ak = inner(a, km);
    let (ta, tk, m) = (truth.trace(), k.trace(), truth.dim() as f64);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &x in &grid.alpha {
        for &y in &grid.beta {
            let sq = aa + x * x * kk + y * y * m - 2.0 * x * ak - 2.0 * y * ta + 2.0 * x * y * tk;
            let v = sq.max(0.0).sqrt();
            if v < best.0 {
                best = (v, x, y);
            }
        }
    }
    best
}

struct TrialContext<'a> {
    cfg: &'a ExperimentConfig,
    truth: &'a HermitianMatrix,
    truth_inv: &'a HermitianMatrix,
    k: HermitianMatrix,
    rank: usize,
    source: RandomSource,
}

impl TrialContext<'_> {
    fn evaluate(&self, est_index: usize, kind: EstimatorKind, grid_index: usize, point: GridPoint) -> Vec<(Metric, Option<f64>, Option<f64>, String)> {
        let m = self.cfg.m as f64;
        let mc_source = self.source.derive(1 + (est_index as u64) * 1_000_000 + grid_index as u64);
        let result: BenchResult<Vec<(Metric, Option<f64>, Option<f64>, String)>> = (|| {
            let theta = point.theta.map(Theta::new).transpose()?;
            Ok(match kind {
                EstimatorKind::Truth => metrics_of(kind).iter().map(|&mt| (mt, Some(0.0), None, String::new())).collect(),
                EstimatorKind::Sample => vec![(Metric::Cov, Some(dist(self.truth, self.k.as_matrix())), None, String::new())],
                EstimatorKind::DiagonalLoading => {
                    let (v, a, b) = loading_oracle(self.truth, &self.k, &self.cfg.loading_grid());
                    vec![(Metric::Cov, Some(v), None, format!("alpha={a} beta={b}"))]
                }
                EstimatorKind::Covp => {
                    let p = point.p.expect("p grid");
                    let est = cov_p_closed(&self.k, p)?.scale(m / p as f64);
                    vec![(Metric::Cov, Some(dist(self.truth, est.as_matrix())), None, String::new())]
                }
                EstimatorKind::Ewens => {
                    let est = ewens_estimator(&self.k, theta.expect("θ grid"));
                    vec![(Metric::Cov, Some(dist(self.truth, est.as_matrix())), None, String::new())]
                }
                EstimatorKind::Hybrid => {
                    let est = hybrid_estimator(&self.k, theta.expect("θ grid"), point.p.expect("p grid"))?;
                    vec![(Metric::Cov, Some(dist(self.truth, est.as_matrix())), None, String::new())]
                }
                EstimatorKind::Invcovp => {
                    let p = point.p.expect("p grid");
                    if p > self.rank {
                        return Ok(invalid_rows(kind, format!("p={p} exceeds rank(K)={}", self.rank)));
                    }
                    let (x, spec) = invcov_p_structured(&self.k, p, self.cfg.mc_samples, &mc_source)?;
                    let (inv, cond, pinv) = guarded_inverse(&x)?;
                    let mut note = if pinv { "pseudoinverse".to_string() } else { String::new() };
                    if spec.rejected > 0 {
                        note = format!("{note} rejected={}", spec.rejected).trim().to_string();
                    }
                    let f = dist(self.truth, inv.scale(p as f64 / m).as_matrix());
                    let g = dist(self.truth_inv, x.scale(m / p as f64).as_matrix());
                    vec![(Metric::InvInverted, Some(f), Some(cond), note.clone()), (Metric::Precision, Some(g), Some(cond), note)]
                }
                EstimatorKind::HybridInverse => {
                    let p = point.p.expect("p grid");
                    let x = hybrid_inverse_mc(&self.k, theta.expect("θ grid"), p, self.cfg.mc_samples, &mc_source)?.hermitian_mean();
                    let (inv, cond, pinv) = guarded_inverse(&x)?;
                    let note = if pinv { "pseudoinverse".to_string() } else { String::new() };
                    let f = dist(self.truth, inv.as_matrix());
                    let g = dist(self.truth_inv, x.as_matrix());
                    vec![(Metric::InvInverted, Some(f), Some(cond), note.clone()), (Metric::Precision, Some(g), Some(cond), note)]
                }
            })
        })();
        result.unwrap_or_else(|e| invalid_rows(kind, e.to_string()))
    }
}

fn invalid_rows(kind: EstimatorKind, reason: String) -> Vec<(Metric, Option<f64>, Option<f64>, String)> {
    metrics_of(kind).iter().map(|&mt| (mt, None, None, reason.clone())).collect()
}

/// Runs every trial of the experiment. Trial `t` draws its data from
/// `RandomSource::new(seed).derive(t)`, so results do not depend on the
/// number of threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> BenchResult<MetricReport> {
    cfg.validate()?;
    let truth = cfg.truth.matrix(cfg.m)?;
    let truth_inv = pseudoinverse_default(&truth)?;
    let root = RandomSource::new(cfg.seed);
    let plan: Vec<(usize, EstimatorKind, Vec<GridPoint>)> =
        cfg.estimators.iter().enumerate().map(|(i, &e)| (i, e, grid_points(e, cfg))).collect();

    let trials: Vec<BenchResult<(Vec<RawRecord>, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let source = root.derive(trial as u64);
            let mut rng = source.derive(0).stream(0);
            let k = sample_gaussian_covariance(&truth, cfg.n, &mut rng)?;
            let rank = numerical_rank(&k)?;
            let ctx = TrialContext { cfg, truth: &truth, truth_inv: &truth_inv, k, rank, source };
            let mut records = Vec::new();
            for (est_index, kind, points) in &plan {
                for (gi, &point) in points.iter().enumerate() {
                    for (metric, value, condition, note) in ctx.evaluate(*est_index, *kind, gi, point) {
                        records.push(RawRecord { trial, estimator: *kind, point, metric, value, condition, note });
                    }
                }
            }
            Ok((records, dist(&truth, ctx.k.as_matrix())))
        })
        .collect();

    let mut raw = Vec::new();
    let mut sample_error = Vec::new();
    for t in trials {
        let (records, base) = t?;
        raw.extend(records);
        sample_error.push(base);
    }
    let rows = aggregate(&plan, &raw);
    Ok(MetricReport { rows, raw, sample_error })
}

fn aggregate(plan: &[(usize, EstimatorKind, Vec<GridPoint>)], raw: &[RawRecord]) -> Vec<MetricRow> {
    let mut rows = Vec::new();
    for (_, kind, points) in plan {
        for &point in points {
            for &metric in metrics_of(*kind) {
                let cell: Vec<&RawRecord> =
                    raw.iter().filter(|r| r.estimator == *kind && r.point == point && r.metric == metric).collect();
                let values: Vec<f64> = cell.iter().filter_map(|r| r.value).collect();
                let n = values.len();
                let mean = if n == 0 { f64::NAN } else { values.iter().sum::<f64>() / n as f64 };
                let std = if n < 2 {
                    0.0
                } else {
                    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
                };
                let mut notes: Vec<&str> = cell.iter().map(|r| r.note.as_str()).filter(|s| !s.is_empty()).collect();
                notes.dedup();
                let note = if *kind == EstimatorKind::DiagonalLoading { String::new() } else { notes.join("; ") };
                rows.push(MetricRow { estimator: *kind, point, metric, mean, std, valid_trials: n, note });
            }
        }
    }
    rows
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `raw.csv` and `summary.csv` into `dir`.
///
/// `raw.csv`: `trial,estimator,theta,p,metric,value,condition,note`.
/// `summary.csv`: `estimator,theta,p,metric,mean,std,valid_trials,note`.
/// Empty cells mean "not applicable" (or, for `value`, not evaluable).
pub fn write_report(report: &MetricReport, dir: &Path) -> BenchResult<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("raw.csv"))?;
    w.write_record(["trial", "estimator", "theta", "p", "metric", "value", "condition", "note"])?;
    for r in &report.raw {
        w.write_record([
            r.trial.to_string(),
            r.estimator.name().to_string(),
            opt_f64(r.point.theta),
            opt_usize(r.point.p),
            r.metric.name().to_string(),
            opt_f64(r.value),
            opt_f64(r.condition),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["estimator", "theta", "p", "metric", "mean", "std", "valid_trials", "note"])?;
    for r in &report.rows {
        w.write_record([
            r.estimator.name().to_string(),
            opt_f64(r.point.theta),
            opt_usize(r.point.p),
            r.metric.name().to_string(),
            if r.valid_trials == 0 { String::new() } else { fmt_f64(r.mean) },
            if r.valid_trials == 0 { String::new() } else { fmt_f64(r.std) },
            r.valid_trials.to_string(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    let mut base = File::create(dir.join("baseline.csv"))?;
    writeln!(base, "trial,sample_error")?;
    for (t, v) in report.sample_error.iter().enumerate() {
        writeln!(base, "{t},{}", fmt_f64(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TruthSpec;

    fn cfg(estimators: Vec<EstimatorKind>) -> ExperimentConfig {
        ExperimentConfig {
            m: 12,
            n: 8,
            truth: TruthSpec::Power { alpha: 0.5 },
            estimators,
            theta_grid: vec![1.0, 12.0, 1e8],
            p_grid: vec![3, 9],
            mc_samples: 200,
            seed: 4,
            trials: 3,
            output_dir: None,
            dl_grid: None,
        }
    }

    #[test]
    fn truth_passthrough_is_zero() {
        let r = run_experiment(&cfg(vec![EstimatorKind::Truth])).unwrap();
        assert!(r.rows.iter().all(|row| row.mean == 0.0 && row.valid_trials == 3));
        assert_eq!(r.rows.len(), 3);
    }

    #[test]
    fn ewens_tends_to_sample_error() {
        let r = run_experiment(&cfg(vec![EstimatorKind::Sample, EstimatorKind::Ewens])).unwrap();
        let sample = r.row(EstimatorKind::Sample, Metric::Cov).next().unwrap().mean;
        let far = r.row(EstimatorKind::Ewens, Metric::Cov).find(|row| row.point.theta == Some(1e8)).unwrap().mean;
        assert!((far - sample).abs() <= 1e-4);
        let base: f64 = r.sample_error.iter().sum::<f64>() / 3.0;
        assert!((base - sample).abs() < 1e-12);
    }

    #[test]
    fn invalid_points_are_marked_and_run_continues() {
        let r = run_experiment(&cfg(vec![EstimatorKind::Invcovp, EstimatorKind::Covp])).unwrap();
        let bad: Vec<_> = r.row(EstimatorKind::Invcovp, Metric::Precision).filter(|row| row.point.p == Some(9)).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].valid_trials, 0);
        assert!(bad[0].note.contains("rank"));
        let good = r.row(EstimatorKind::Invcovp, Metric::Precision).find(|row| row.point.p == Some(3)).unwrap();
        assert_eq!(good.valid_trials, 3);
        assert!(r.row(EstimatorKind::Covp, Metric::Cov).all(|row| row.valid_trials == 3));
    }

    #[test]
    fn row_counts_and_loading_oracle() {
        let all = vec![
            EstimatorKind::Sample,
            EstimatorKind::DiagonalLoading,
            EstimatorKind::Covp,
            EstimatorKind::Invcovp,
            EstimatorKind::Ewens,
            EstimatorKind::Hybrid,
            EstimatorKind::HybridInverse,
        ];
        let c = cfg(all);
        let r = run_experiment(&c).unwrap();
        // sample 1, dl 1, covp 2, invcovp 2×2, ewens 3, hybrid 6, hybrid-inverse 6×2
        assert_eq!(r.rows.len(), 1 + 1 + 2 + 4 + 3 + 6 + 12);
        let dl = r.row(EstimatorKind::DiagonalLoading, Metric::Cov).next().unwrap().mean;
        let sample = r.row(EstimatorKind::Sample, Metric::Cov).next().unwrap().mean;
        assert!(dl <= sample + 1e-12);
    }

    #[test]
    fn loading_oracle_matches_direct_norm() {
        let truth = TruthSpec::Power { alpha: 0.3 }.matrix(5).unwrap();
        let mut rng = RandomSource::new(1).stream(0);
        let k = sample_gaussian_covariance(&truth, 3, &mut rng).unwrap();
        let (v, a, b) = loading_oracle(&truth, &k, &LoadingGrid::default());
        let direct = singcov::linalg::diagonal_loading(&k, a, b);
        assert!((v - dist(&truth, direct.as_matrix())).abs() < 1e-10);
    }
}
