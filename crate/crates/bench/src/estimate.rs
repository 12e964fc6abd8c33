//! Single-estimator application, as used by the `estimate` subcommand.

use singcov::ewens::{ewens_estimator, hybrid_estimator, hybrid_inverse_mc, Theta};
use singcov::haar::{cov_p_closed, invcov_p_structured};
use singcov::linalg::diagonal_loading;
use singcov::{HermitianMatrix, RandomSource};

use crate::config::EstimatorKind;
use crate::error::{BenchError, BenchResult};

#[derive(Debug, Clone)]
pub struct EstimateRequest {
    pub kind: EstimatorKind,
    pub theta: Option<f64>,
    pub p: Option<usize>,
    /// Diagonal-loading weights `αK + βI`.
    pub loading: Option<(f64, f64)>,
    pub samples: usize,
    pub seed: u64,
}

fn need<T>(v: Option<T>, what: &str, kind: EstimatorKind) -> BenchResult<T> {
    v.ok_or_else(|| BenchError::Config(format!("estimator {} needs {what}", kind.name())))
}

/// Applies one estimator to `k`. The Haar-average estimators return
/// `cov_p(K)` and `invcov_p(K)` unscaled.
pub fn estimate(k: &HermitianMatrix, req: &EstimateRequest) -> BenchResult<HermitianMatrix> {
    let kind = req.kind;
    let theta = || -> BenchResult<Theta> { Ok(Theta::new(need(req.theta, "--theta", kind)?)?) };
    let p = || -> BenchResult<usize> {
        let p = need(req.p, "--p", kind)?;
        if p == 0 || p > k.dim() {
            return Err(BenchError::Config(format!("p must lie in 1..={}, got {p}", k.dim())));
        }
        Ok(p)
    };
    let src = RandomSource::new(req.seed);
    Ok(match kind {
        EstimatorKind::Sample | EstimatorKind::Truth => k.clone(),
        EstimatorKind::DiagonalLoading => {
            let (a, b) = need(req.loading, "--alpha and --beta", kind)?;
            diagonal_loading(k, a, b)
        }
        EstimatorKind::Covp => cov_p_closed(k, p()?)?,
        EstimatorKind::Invcovp => invcov_p_structured(k, p()?, req.samples, &src)?.0,
        EstimatorKind::Ewens => ewens_estimator(k, theta()?),
        EstimatorKind::Hybrid => hybrid_estimator(k, theta()?, p()?)?,
        EstimatorKind::HybridInverse => hybrid_inverse_mc(k, theta()?, p()?, req.samples, &src)?.hermitian_mean(),
    })
}
