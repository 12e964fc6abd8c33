//! Spectral exports: ESDs of the truth, of a sample covariance and of the
//! Ewens transforms of the truth, with analytic limiting densities.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use singcov::ewens::Theta;
use singcov::linalg::io::{write_density, write_esd};
use singcov::linalg::{esd, sample_gaussian_covariance, EmpiricalSpectralDistribution};
use singcov::toeplitz::{ewens_transform_closedform, limiting_density, limiting_symbol, SymbolFunction};
use singcov::RandomSource;

use crate::config::SpectrumConfig;
use crate::error::BenchResult;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub files: Vec<PathBuf>,
    /// Label and ESD of every exported matrix, in file order.
    pub spectra: Vec<(String, EmpiricalSpectralDistribution)>,
}

/// `θ` rendered for file names: `261`, `0.5`.
fn theta_label(t: f64) -> String {
    format!("{t}")
}

/// Cell edges covering `[lo, hi]` padded by 5% (at least 0.05).
fn edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let pad = (0.05 * (hi - lo)).max(0.05);
    let (a, b) = (lo - pad, hi + pad);
    (0..=bins).map(|k| a + (b - a) * k as f64 / bins as f64).collect()
}

fn write_esd_file(dir: &Path, name: &str, e: &EmpiricalSpectralDistribution, files: &mut Vec<PathBuf>) -> BenchResult<()> {
    let path = dir.join(format!("esd_{name}.csv"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_esd(&mut w, e)?;
    w.flush()?;
    files.push(path);
    Ok(())
}

fn write_density_file(dir: &Path, name: &str, sym: &SymbolFunction, bins: usize, files: &mut Vec<PathBuf>) -> BenchResult<()> {
    let r = sym.range();
    let d = limiting_density(sym, &edges(r.lo, r.hi, bins))?;
    let path = dir.join(format!("density_{name}.csv"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_density(&mut w, &d)?;
    w.flush()?;
    files.push(path);
    Ok(())
}

/// Writes `esd_truth.csv`, `density_truth.csv`, optionally `esd_sample.csv`,
/// and for each `θ` in the grid `esd_ewens_theta_<θ>.csv` together with
/// `density_ewens_theta_<θ>.csv`, the limiting density for `θ = βm` with
/// `β = θ/m`.
pub fn spectrum_report(cfg: &SpectrumConfig, dir: &Path) -> BenchResult<SpectrumReport> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let family = cfg.truth.family();
    let truth = family.matrix(cfg.m)?;
    let mut files = Vec::new();
    let mut spectra = Vec::new();

    let e = esd(&truth)?;
    write_esd_file(dir, "truth", &e, &mut files)?;
    write_density_file(dir, "truth", &family.symbol(), cfg.bins, &mut files)?;
    spectra.push(("truth".to_string(), e));

    if let Some(n) = cfg.n {
        let mut rng = RandomSource::new(cfg.seed).stream(0);
        let k = sample_gaussian_covariance(&truth, n, &mut rng)?;
        let e = esd(&k)?;
        write_esd_file(dir, "sample", &e, &mut files)?;
        spectra.push(("sample".to_string(), e));
    }

    for &t in &cfg.theta_grid {
        let label = format!("ewens_theta_{}", theta_label(t));
        let bt = ewens_transform_closedform(family, cfg.m, Theta::new(t)?)?;
        let e = esd(&bt)?;
        write_esd_file(dir, &label, &e, &mut files)?;
        write_density_file(dir, &label, &limiting_symbol(family, t / cfg.m as f64), cfg.bins, &mut files)?;
        spectra.push((label, e));
    }
    Ok(SpectrumReport { files, spectra })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TruthSpec;

    #[test]
    fn identity_truth_is_a_point_mass() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SpectrumConfig {
            m: 20,
            truth: TruthSpec::Identity,
            n: None,
            theta_grid: vec![1.0, 20.0],
            bins: 50,
            seed: 0,
            output_dir: None,
        };
        let r = spectrum_report(&cfg, dir.path()).unwrap();
        assert_eq!(r.files.len(), 2 + 2 * 2);
        for (_, e) in &r.spectra {
            assert!(e.eigenvalues().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        }
        let dens = std::fs::read_to_string(dir.path().join("density_truth.csv")).unwrap();
        let total: f64 = dens
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .sum::<f64>()
            * (0.1 / 50.0);
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tridiagonal_family_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SpectrumConfig {
            m: 40,
            truth: TruthSpec::Tridiagonal { b: 0.3 },
            n: Some(30),
            theta_grid: vec![40.0],
            bins: 20,
            seed: 1,
            output_dir: None,
        };
        let r = spectrum_report(&cfg, dir.path()).unwrap();
        let names: Vec<String> = r.files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(
            names,
            [
                "esd_truth.csv",
                "density_truth.csv",
                "esd_sample.csv",
                "esd_ewens_theta_40.csv",
                "density_ewens_theta_40.csv"
            ]
        );
        let sample = &r.spectra[1].1;
        assert_eq!(sample.eigenvalues().iter().filter(|x| x.abs() < 1e-10).count(), 10);
    }
}
