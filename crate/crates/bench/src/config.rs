//! JSON experiment descriptions. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use singcov::toeplitz::ToeplitzFamily;
use singcov::HermitianMatrix;

use crate::error::{BenchError, BenchResult};

/// The true covariance the data are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TruthSpec {
    Tridiagonal { b: f64 },
    Power { alpha: f64 },
    Identity,
}

impl TruthSpec {
    pub fn family(&self) -> ToeplitzFamily {
        match *self {
            Self::Tridiagonal { b } => ToeplitzFamily::Tridiagonal { b },
            Self::Power { alpha } => ToeplitzFamily::Power { alpha },
            // tridiag(0, 1, 0)
            Self::Identity => ToeplitzFamily::Tridiagonal { b: 0.0 },
        }
    }

    pub fn matrix(&self, m: usize) -> BenchResult<HermitianMatrix> {
        Ok(self.family().matrix(m)?)
    }

    fn validate(&self, m: usize) -> BenchResult<()> {
        match *self {
            Self::Power { alpha } if !(0.0..1.0).contains(&alpha) => {
                Err(BenchError::Config(format!("power truth needs 0 <= alpha < 1, got {alpha}")))
            }
            Self::Tridiagonal { b } if !(b.abs() <= singcov::toeplitz::TridiagonalToeplitz::psd_limit(m)) => {
                Err(BenchError::Config(format!("tridiagonal truth with b = {b} is not PSD at m = {m}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// `K` itself.
    Sample,
    /// Best point of an `(α, β)` grid for `αK + βI` against the truth
    /// (reported as DL-oracle).
    DiagonalLoading,
    Covp,
    Invcovp,
    Ewens,
    Hybrid,
    HybridInverse,
    /// The truth passed through; every metric is zero.
    Truth,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sample => "sample",
            Self::DiagonalLoading => "dl-oracle",
            Self::Covp => "covp",
            Self::Invcovp => "invcovp",
            Self::Ewens => "ewens",
            Self::Hybrid => "hybrid",
            Self::HybridInverse => "hybrid-inverse",
            Self::Truth => "truth",
        }
    }

    pub fn uses_theta(&self) -> bool {
        matches!(self, Self::Ewens | Self::Hybrid | Self::HybridInverse)
    }

    pub fn uses_p(&self) -> bool {
        matches!(self, Self::Covp | Self::Invcovp | Self::Hybrid | Self::HybridInverse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingGrid {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for LoadingGrid {
    fn default() -> Self {
        let g: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
        Self { alpha: g.clone(), beta: g }
    }
}

fn default_trials() -> usize {
    10
}

fn default_mc_samples() -> usize {
    2000
}

fn default_bins() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub truth: TruthSpec,
    pub estimators: Vec<EstimatorKind>,
    #[serde(default)]
    pub theta_grid: Vec<f64>,
    #[serde(default)]
    pub p_grid: Vec<usize>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub dl_grid: Option<LoadingGrid>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> BenchResult<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> BenchResult<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> BenchResult<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.estimators.is_empty() {
            return bad("no estimators requested".into());
        }
        self.truth.validate(self.m)?;
        let needs_theta = self.estimators.iter().any(|e| e.uses_theta());
        let needs_p = self.estimators.iter().any(|e| e.uses_p());
        if needs_theta && self.theta_grid.is_empty() {
            return bad("theta_grid is empty but a θ-dependent estimator is requested".into());
        }
        if needs_p && self.p_grid.is_empty() {
            return bad("p_grid is empty but a p-dependent estimator is requested".into());
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return bad(format!("θ values must be positive and finite, got {t}"));
        }
        if let Some(p) = self.p_grid.iter().find(|&&p| p == 0 || p > self.m) {
            return bad(format!("p values must lie in 1..=m, got {p}"));
        }
        let needs_mc = self.estimators.iter().any(|e| matches!(e, EstimatorKind::Invcovp | EstimatorKind::HybridInverse));
        if needs_mc && self.mc_samples == 0 {
            return bad("mc_samples must be positive".into());
        }
        if let Some(g) = &self.dl_grid {
            if g.alpha.is_empty() || g.beta.is_empty() {
                return bad("dl_grid axes must be nonempty".into());
            }
        }
        Ok(())
    }

    pub fn loading_grid(&self) -> LoadingGrid {
        self.dl_grid.clone().unwrap_or_default()
    }
}

/// Description of a spectrum export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub m: usize,
    pub truth: TruthSpec,
    /// When set, a sample covariance from `n` draws is exported too.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub theta_grid: Vec<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl SpectrumConfig {
    pub fn from_json(text: &str) -> BenchResult<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> BenchResult<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> BenchResult<()> {
        if self.m < 2 {
            return Err(BenchError::Config(format!("m must be at least 2, got {}", self.m)));
        }
        if self.n == Some(0) {
            return Err(BenchError::Config("n must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(BenchError::Config("bins must be positive".into()));
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(BenchError::Config(format!("θ values must be positive and finite, got {t}")));
        }
        self.truth.validate(self.m)
    }
}
