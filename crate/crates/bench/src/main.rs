use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use singcov::linalg::io::{read_matrix, write_matrix};
use singcov_bench::config::{EstimatorKind, ExperimentConfig, SpectrumConfig};
use singcov_bench::error::{BenchError, BenchResult};
use singcov_bench::estimate::{estimate, EstimateRequest};
use singcov_bench::experiment::{run_experiment, write_report};
use singcov_bench::spectrum::spectrum_report;
use singcov_bench::verify::{run_suite, SUITES};

#[derive(Parser)]
#[command(name = "singcov", version, about = "Estimators for singular sample covariance matrices")]
struct Cli {
    /// Seed overriding the one in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (estimate, verify) or directory (experiment, spectrum).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one estimator to a matrix file.
    Estimate {
        /// Input matrix (header `m=<dim>`, then rows of re,im pairs).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        estimator: EstimatorKind,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        /// Monte Carlo draws for invcovp and hybrid-inverse.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Run a metric sweep from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Export spectral distributions from a JSON config.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        /// Suite name; `list` prints the available suites.
        suite: String,
    },
}

fn parse_kind(s: &str) -> Result<EstimatorKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
        "expected one of: sample, diagonal-loading, covp, invcovp, ewens, hybrid, hybrid-inverse, truth".to_string()
    })
}

fn output_dir(out: Option<PathBuf>, configured: Option<PathBuf>) -> BenchResult<PathBuf> {
    out.or(configured).ok_or_else(|| BenchError::Config("no output directory: pass --out or set output_dir".into()))
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> BenchResult<()>) -> BenchResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// `Ok(true)` on success, `Ok(false)` for a failed verify suite.
fn run(cli: Cli) -> BenchResult<bool> {
    match cli.command {
        Command::Estimate { input, estimator, theta, p, alpha, beta, samples } => {
            let k = read_matrix(BufReader::new(File::open(&input)?))?;
            let req = EstimateRequest {
                kind: estimator,
                theta,
                p,
                loading: alpha.zip(beta),
                samples,
                seed: cli.seed.unwrap_or(0),
            };
            let est = estimate(&k, &req)?;
            write_to(cli.out.as_deref(), |w| Ok(write_matrix(&mut &mut *w, &est)?))?;
        }
        Command::Experiment { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let dir = output_dir(cli.out, cfg.output_dir.clone())?;
            let report = run_experiment(&cfg)?;
            write_report(&report, &dir)?;
            eprintln!("wrote {} rows to {}", report.rows.len(), dir.display());
        }
        Command::Spectrum { config } => {
            let mut cfg = SpectrumConfig::load(&config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let dir = output_dir(cli.out, cfg.output_dir.clone())?;
            let report = spectrum_report(&cfg, &dir)?;
            eprintln!("wrote {} files to {}", report.files.len(), dir.display());
        }
        Command::Verify { suite } => {
            if suite == "list" {
                println!("{}", SUITES.join("\n"));
                return Ok(true);
            }
            let report = run_suite(&suite, cli.seed.unwrap_or(0))?;
            write_to(cli.out.as_deref(), |w| {
                serde_json::to_writer_pretty(&mut *w, &report)?;
                writeln!(w)?;
                Ok(())
            })?;
            for c in &report.checks {
                let tag = match (c.passed, c.gating) {
                    (true, _) => "ok",
                    (false, true) => "FAIL",
                    (false, false) => "fail (informational)",
                };
                eprintln!("{tag:>20}  {}  residual={:.3e} tol={:.1e}", c.name, c.residual, c.tolerance);
            }
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
