//! Seeded Monte Carlo accumulation.
//!
//! Draws are split into fixed-size chunks; chunk `c` always consumes stream
//! `c` of the caller's [`RandomSource`], and chunk statistics are merged in
//! chunk order. Results are therefore identical for any thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::random::RandomSource;

const CHUNK: usize = 2048;

/// Fraction of draws that may be rejected before a run is aborted.
pub const MAX_REJECT_FRACTION: f64 = 0.01;

/// Running mean and centered second moment of a real vector (Welford).
#[derive(Debug, Clone)]
pub struct Welford {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    pub fn new(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.mean.len());
        self.count += 1;
        let n = self.count as f64;
        for ((mu, m2), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *mu;
            *mu += d / n;
            *m2 += d * (v - *mu);
        }
    }

    /// Chan et al. pairwise merge.
    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Standard error of the mean per component.
    pub fn standard_error(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![f64::INFINITY; self.mean.len()];
        }
        let n = self.count as f64;
        self.m2.iter().map(|&m2| (m2 / (n - 1.0) / n).sqrt()).collect()
    }
}

/// Runs `samples` draws in parallel and merges their statistics.
///
/// `draw` returns `Ok(None)` for a rejected draw, which is replaced by a
/// fresh one. More than [`MAX_REJECT_FRACTION`] rejections abort the run.
pub fn run<F>(samples: usize, len: usize, source: &RandomSource, draw: F) -> Result<(Welford, usize)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<Vec<f64>>> + Sync,
{
    if samples == 0 {
        return Err(crate::error::invalid("Monte Carlo needs at least one sample"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<(Welford, usize)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let quota = CHUNK.min(samples - c * CHUNK);
            let mut rng = source.stream(c as u64);
            let mut acc = Welford::new(len);
            let mut rejected = 0usize;
            while acc.count() < quota {
                match draw(&mut rng)? {
                    Some(x) => acc.push(&x),
                    None => {
                        rejected += 1;
                        if rejected > quota {
                            return Err(Error::IllConditioned { rejected, requested: quota });
                        }
                    }
                }
            }
            Ok((acc, rejected))
        })
        .collect();
    let mut total = Welford::new(len);
    let mut rejected = 0;
    for part in parts {
        let (w, r) = part?;
        total.merge(&w);
        rejected += r;
    }
    if rejected as f64 > MAX_REJECT_FRACTION * samples as f64 {
        return Err(Error::IllConditioned { rejected, requested: samples });
    }
    Ok((total, rejected))
}

/// Monte Carlo estimate of a complex matrix expectation with per-entry
/// standard errors of the real and imaginary parts.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mean: CMatrix,
    pub se_re: DMatrix<f64>,
    pub se_im: DMatrix<f64>,
    pub samples: usize,
    pub rejected: usize,
}

impl McEstimate {
    pub fn from_welford(w: &Welford, rows: usize, cols: usize, rejected: usize) -> Self {
        let mean = w.mean();
        let se = w.standard_error();
        let idx = |i: usize, j: usize| 2 * (i * cols + j);
        Self {
            mean: CMatrix::from_fn(rows, cols, |i, j| Complex64::new(mean[idx(i, j)], mean[idx(i, j) + 1])),
            se_re: DMatrix::from_fn(rows, cols, |i, j| se[idx(i, j)]),
            se_im: DMatrix::from_fn(rows, cols, |i, j| se[idx(i, j) + 1]),
            samples: w.count(),
            rejected,
        }
    }

    pub fn hermitian_mean(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.mean.clone())
    }

    /// Largest `|estimate - reference| / se` over real and imaginary parts of
    /// all entries. Components with `se` below `floor` use `floor`.
    pub fn max_z(&self, reference: &CMatrix, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.mean.nrows() {
            for j in 0..self.mean.ncols() {
                let d = self.mean[(i, j)] - reference[(i, j)];
                worst = worst.max(d.re.abs() / self.se_re[(i, j)].max(floor));
                worst = worst.max(d.im.abs() / self.se_im[(i, j)].max(floor));
            }
        }
        worst
    }
}

/// Flattens a matrix to interleaved `(re, im)` in row-major order.
pub fn flatten(a: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * a.len());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out.push(a[(i, j)].re);
            out.push(a[(i, j)].im);
        }
    }
    out
}

/// Monte Carlo mean of a matrix-valued draw.
pub fn matrix_mean<F>(rows: usize, cols: usize, samples: usize, source: &RandomSource, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<CMatrix>> + Sync,
{
    let (w, rejected) = run(samples, 2 * rows * cols, source, |rng| Ok(draw(rng)?.map(|m| flatten(&m))))?;
    Ok(McEstimate::from_welford(&w, rows, cols, rejected))
}

/// Monte Carlo mean and standard error of a scalar draw.
pub fn scalar_mean<F>(samples: usize, source: &RandomSource, draw: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let (w, _) = run(samples, 1, source, |rng| Ok(Some(vec![draw(rng)?])))?;
    Ok((w.mean()[0], w.standard_error()[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut w = Welford::new(1);
        xs.iter().for_each(|&x| w.push(&[x]));
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((w.mean()[0] - mean).abs() < 1e-12);
        assert!((w.standard_error()[0] - (var / n).sqrt()).abs() < 1e-12);

        let mut a = Welford::new(1);
        let mut b = Welford::new(1);
        xs[..300].iter().for_each(|&x| a.push(&[x]));
        xs[300..].iter().for_each(|&x| b.push(&[x]));
        a.merge(&b);
        assert!((a.mean()[0] - mean).abs() < 1e-12);
        assert!((a.standard_error()[0] - w.standard_error()[0]).abs() < 1e-12);
    }

    #[test]
    fn runs_are_reproducible_across_thread_counts() {
        let src = RandomSource::new(99);
        let f = |rng: &mut ChaCha8Rng| Ok(rng.random::<f64>());
        let a = scalar_mean(10_000, &src, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| scalar_mean(10_000, &src, f).unwrap());
        assert_eq!(a, b);
        assert!((a.0 - 0.5).abs() < 5.0 * a.1);
    }

    #[test]
    fn too_many_rejections_abort() {
        let src = RandomSource::new(1);
        let res = run(1000, 1, &src, |rng| {
            Ok(if rng.random::<f64>() < 0.1 { None } else { Some(vec![1.0]) })
        });
        assert!(matches!(res, Err(Error::IllConditioned { .. })));
        let ok = run(1000, 1, &src, |rng| {
            Ok(if rng.random::<f64>() < 0.001 { None } else { Some(vec![1.0]) })
        });
        assert!(ok.is_ok());
    }
}
