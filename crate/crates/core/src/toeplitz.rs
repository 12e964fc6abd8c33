//! Tridiagonal and power Toeplitz covariances, their symbols and limiting
//! spectral measures, and explicit forms of their Ewens transforms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::ewens::Theta;
use crate::linalg::{CMatrix, CVector, HermitianMatrix, SpectralDecomposition};

/// `B = tridiag(b, 1, b)` of size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TridiagonalToeplitz {
    pub m: usize,
    pub b: f64,
}

impl TridiagonalToeplitz {
    pub fn new(m: usize, b: f64) -> Result<Self> {
        if m == 0 || !b.is_finite() {
            return Err(invalid(format!("tridiagonal Toeplitz needs m >= 1 and finite b, got m={m}, b={b}")));
        }
        Ok(Self { m, b })
    }

    /// Largest `b` keeping `B` PSD at this size.
    pub fn psd_limit(m: usize) -> f64 {
        1.0 / (2.0 * (PI / (m as f64 + 1.0)).cos())
    }

    pub fn matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_real(&real_tridiagonal(self.m, self.b)).expect("symmetric by construction")
    }

    pub fn symbol(&self) -> SymbolFunction {
        SymbolFunction::Tridiagonal { b: self.b }
    }

    /// `λ_j = 1 + 2b cos(πj/(m+1))` with eigenvectors `(sin(kπj/(m+1)))_k`,
    /// normalized, sorted descending.
    pub fn eigensystem(&self) -> SpectralDecomposition {
        let m = self.m;
        let h = PI / (m as f64 + 1.0);
        let norm = (2.0 / (m as f64 + 1.0)).sqrt();
        let mut js: Vec<usize> = (1..=m).collect();
        let lam = |j: usize| 1.0 + 2.0 * self.b * (h * j as f64).cos();
        js.sort_by(|&a, &c| lam(c).total_cmp(&lam(a)));
        let eigenvalues = js.iter().map(|&j| lam(j)).collect();
        let eigenvectors = CMatrix::from_fn(m, m, |k, c| {
            Complex64::new(norm * (h * ((k + 1) * js[c]) as f64).sin(), 0.0)
        });
        SpectralDecomposition { eigenvalues, eigenvectors }
    }

    /// `L_m = B - I`.
    pub fn l_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_real(&real_tridiagonal_offdiag(self.m, self.b)).expect("symmetric")
    }
}

fn real_tridiagonal_offdiag(m: usize, b: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| if i.abs_diff(j) == 1 { b } else { 0.0 })
}

fn real_tridiagonal(m: usize, b: f64) -> DMatrix<f64> {
    real_tridiagonal_offdiag(m, b) + DMatrix::identity(m, m)
}

/// `A_α = (α^{|i-j|})` of size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerToeplitz {
    pub m: usize,
    pub alpha: f64,
}

impl PowerToeplitz {
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        if m == 0 || !(0.0..1.0).contains(&alpha) {
            return Err(invalid(format!("power Toeplitz needs m >= 1 and 0 <= α < 1, got m={m}, α={alpha}")));
        }
        Ok(Self { m, alpha })
    }

    pub fn matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_real(&self.real_matrix()).expect("symmetric by construction")
    }

    fn real_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.alpha.powi(i.abs_diff(j) as i32))
    }

    pub fn symbol(&self) -> SymbolFunction {
        SymbolFunction::Power { alpha: self.alpha }
    }

    /// `det(A_α) = (1 - α²)^{m-1}`.
    pub fn det(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).powi(self.m as i32 - 1)
    }

    /// The tridiagonal inverse `(1/(1-α²)) tridiag(-α, (1, 1+α², .., 1+α², 1), -α)`.
    pub fn inverse(&self) -> HermitianMatrix {
        let (m, a) = (self.m, self.alpha);
        let c = 1.0 / (1.0 - a * a);
        let inv = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                if m == 1 {
                    1.0
                } else if i == 0 || i == m - 1 {
                    c
                } else {
                    c * (1.0 + a * a)
                }
            } else if i.abs_diff(j) == 1 {
                -a * c
            } else {
                0.0
            }
        });
        HermitianMatrix::from_real(&inv).expect("symmetric")
    }

    /// `J_m`: zero diagonal, `l_ij = α^i + α^j + α^{m+1-i} + α^{m+1-j}` with
    /// 1-based indices.
    pub fn j_matrix(&self) -> HermitianMatrix {
        let (m, a) = (self.m, self.alpha);
        let edge = |i: usize| a.powi(i as i32 + 1) + a.powi((m - i) as i32);
        let j = DMatrix::from_fn(m, m, |i, k| if i == k { 0.0 } else { edge(i) + edge(k) });
        HermitianMatrix::from_real(&j).expect("symmetric")
    }
}

/// `det(A_α)` for `|α| < 1`.
pub fn power_det(m: usize, alpha: f64) -> Result<f64> {
    check_power_alpha(alpha)?;
    Ok((1.0 - alpha * alpha).powi(m as i32 - 1))
}

/// `A_α^{-1}` for `|α| < 1`.
pub fn power_inverse(m: usize, alpha: f64) -> Result<HermitianMatrix> {
    check_power_alpha(alpha)?;
    // negative α only flips signs of the off-diagonals; reuse the same formula
    let t = PowerToeplitz { m, alpha };
    Ok(t.inverse())
}

fn check_power_alpha(alpha: f64) -> Result<()> {
    if !(alpha.abs() < 1.0) {
        return Err(invalid(format!("A_α is singular or undefined for α = {alpha}")));
    }
    Ok(())
}

/// `T_m` with `T_ij = |N(i) \ {j}| + |N(j) \ {i}|` for `i ≠ j`, where `N(i)`
/// is the set of band neighbours of `i`. This is the count of off-diagonal
/// band entries in row `i` and column `j` outside positions `i, j`.
pub fn t_matrix(m: usize) -> HermitianMatrix {
    let deg = |i: usize| (i > 0) as usize + (i + 1 < m) as usize;
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            0.0
        } else {
            let adj = (i.abs_diff(j) == 1) as usize;
            ((deg(i) - adj) + (deg(j) - adj)) as f64
        }
    });
    HermitianMatrix::from_real(&t).expect("symmetric")
}

/// One of the two structured truths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToeplitzFamily {
    Tridiagonal { b: f64 },
    Power { alpha: f64 },
}

impl ToeplitzFamily {
    pub fn matrix(&self, m: usize) -> Result<HermitianMatrix> {
        match *self {
            Self::Tridiagonal { b } => Ok(TridiagonalToeplitz::new(m, b)?.matrix()),
            Self::Power { alpha } => Ok(PowerToeplitz::new(m, alpha)?.matrix()),
        }
    }

    pub fn symbol(&self) -> SymbolFunction {
        match *self {
            Self::Tridiagonal { b } => SymbolFunction::Tridiagonal { b },
            Self::Power { alpha } => SymbolFunction::Power { alpha },
        }
    }
}

fn ones_minus_identity(m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |i, j| Complex64::new(if i == j { 0.0 } else { 1.0 }, 0.0))
}

/// Ewens transform of a structured truth assembled from its decomposition:
///
/// `B_θ = I + (θ²+θ-2)/D L_m + b(θ-1)/D T_m + 2b(m-1)/D (ee^T - I)`
///
/// `A_θ = I + (θ²-θ)/D (A_α - I) + C/D (ee^T - I) - (θ-1)/((1-α)D) J_m`
///
/// with `D = (θ+m-2)(θ+m-1)` and
/// `C = 2α(α^m - mα + m - 1 + 2(θ-1)(1-α))/(1-α)²`.
pub fn ewens_transform_closedform(family: ToeplitzFamily, m: usize, theta: Theta) -> Result<HermitianMatrix> {
    let t = theta.value();
    let mf = m as f64;
    if m < 2 {
        return family.matrix(m);
    }
    let den = (t + mf - 2.0) * (t + mf - 1.0);
    let id = CMatrix::identity(m, m);
    let off = ones_minus_identity(m);
    let c = |x: f64| Complex64::new(x, 0.0);
    let out = match family {
        ToeplitzFamily::Tridiagonal { b } => {
            let tri = TridiagonalToeplitz::new(m, b)?;
            id + tri.l_matrix().as_matrix() * c((t * t + t - 2.0) / den)
                + t_matrix(m).as_matrix() * c(b * (t - 1.0) / den)
                + off * c(2.0 * b * (mf - 1.0) / den)
        }
        ToeplitzFamily::Power { alpha } => {
            let pw = PowerToeplitz::new(m, alpha)?;
            let a = alpha;
            let constant =
                2.0 * a * (a.powi(m as i32) - mf * a + mf - 1.0 + 2.0 * (t - 1.0) * (1.0 - a)) / (1.0 - a).powi(2);
            let shifted = pw.matrix().as_matrix() - &id;
            &id + shifted * c((t * t - t) / den) + off * c(constant / den)
                - pw.j_matrix().as_matrix() * c((t - 1.0) / ((1.0 - a) * den))
        }
    };
    Ok(HermitianMatrix::symmetrized(out))
}

/// Real-valued symbol `a(e^{iφ})` of a self-adjoint Toeplitz family, or an
/// affine image `shift + scale·a` of one.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolFunction {
    Constant(f64),
    /// `1 + 2b cos φ`
    Tridiagonal { b: f64 },
    /// `1 + 2α(cos φ - α)/((cos φ - α)² + sin² φ) = (1-α²)/(1 - 2α cos φ + α²)`
    Power { alpha: f64 },
    Affine { inner: Box<SymbolFunction>, scale: f64, shift: f64 },
}

impl SymbolFunction {
    /// `1 + c (a - 1)`, the symbol of `cX + (1-c)I`.
    pub fn shrink_toward_one(self, c: f64) -> Self {
        Self::Affine { inner: Box::new(self), scale: c, shift: 1.0 - c }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Tridiagonal { b } => 1.0 + 2.0 * b * phi.cos(),
            Self::Power { alpha } => {
                let (cs, sn) = (phi.cos() - alpha, phi.sin());
                1.0 + 2.0 * alpha * cs / (cs * cs + sn * sn)
            }
            Self::Affine { inner, scale, shift } => shift + scale * inner.eval(phi),
        }
    }

    /// `[min a, max a]`, the support of the push-forward measure.
    pub fn range(&self) -> SupportInterval {
        match self {
            Self::Constant(v) => SupportInterval { lo: *v, hi: *v },
            Self::Tridiagonal { b } => SupportInterval { lo: 1.0 - 2.0 * b.abs(), hi: 1.0 + 2.0 * b.abs() },
            Self::Power { alpha } => {
                let a = alpha.abs();
                SupportInterval { lo: (1.0 - a) / (1.0 + a), hi: (1.0 + a) / (1.0 - a) }
            }
            Self::Affine { inner, scale, shift } => {
                let r = inner.range();
                let (x, y) = (shift + scale * r.lo, shift + scale * r.hi);
                SupportInterval { lo: x.min(y), hi: x.max(y) }
            }
        }
    }

    /// CDF of the push-forward of `dφ/2π` on `[0, 2π]` through the symbol.
    /// Both families are even in `φ` and monotone on `[0, π]`, so
    /// `F(x) = 1 - arccos(c(x))/π` where `c(x)` inverts the symbol in `cos φ`.
    pub fn cdf(&self, x: f64) -> f64 {
        let r = self.range();
        if x < r.lo {
            return 0.0;
        }
        if x >= r.hi {
            return 1.0;
        }
        match self {
            Self::Constant(_) => unreachable!("degenerate range handled above"),
            Self::Tridiagonal { b } => 1.0 - ((x - 1.0) / (2.0 * b.abs())).clamp(-1.0, 1.0).acos() / PI,
            Self::Power { alpha } => {
                let a = alpha.abs();
                let cos = (1.0 + a * a - (1.0 - a * a) / x) / (2.0 * a);
                1.0 - cos.clamp(-1.0, 1.0).acos() / PI
            }
            Self::Affine { inner, scale, shift } => {
                let y = (x - shift) / scale;
                if *scale > 0.0 {
                    inner.cdf(y)
                } else {
                    1.0 - inner.cdf(y)
                }
            }
        }
    }

    /// Density of the push-forward at an interior point of the support.
    pub fn density(&self, x: f64) -> f64 {
        let r = self.range();
        if !(x > r.lo && x < r.hi) {
            return 0.0;
        }
        match self {
            Self::Constant(_) => 0.0,
            Self::Tridiagonal { b } => {
                let s = 2.0 * b.abs();
                1.0 / (PI * (s * s - (x - 1.0).powi(2)).sqrt())
            }
            Self::Power { alpha } => {
                // d/dx of 1 - arccos(c(x))/π with c(x) as in `cdf`
                let a = alpha.abs();
                let cos = (1.0 + a * a - (1.0 - a * a) / x) / (2.0 * a);
                let dc = (1.0 - a * a) / (2.0 * a * x * x);
                dc / (PI * (1.0 - cos * cos).sqrt())
            }
            Self::Affine { inner, scale, shift } => inner.density((x - shift) / scale) / scale.abs(),
        }
    }
}

/// Endpoints of a limiting spectral support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SupportInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Bin-averaged density of the push-forward measure on the cells of `edges`:
/// `(F(e_{k+1}) - F(e_k)) / (e_{k+1} - e_k)` reported at the cell midpoint.
/// A point mass (constant symbol) lands entirely in its cell.
pub fn limiting_density(symbol: &SymbolFunction, edges: &[f64]) -> Result<Vec<(f64, f64)>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("density grid needs at least two strictly increasing edges"));
    }
    Ok(edges
        .windows(2)
        .map(|w| {
            let mass = symbol.cdf(w[1]) - symbol.cdf(w[0]);
            ((w[0] + w[1]) / 2.0, mass / (w[1] - w[0]))
        })
        .collect())
}

/// Histogram of the push-forward obtained by evaluating the symbol on a
/// uniform midpoint grid of `samples` angles. Used to cross-check the
/// analytic CDFs.
pub fn pushforward_histogram(symbol: &SymbolFunction, edges: &[f64], samples: usize) -> Result<Vec<(f64, f64)>> {
    if edges.len() < 2 || samples == 0 {
        return Err(invalid("histogram needs two edges and at least one sample"));
    }
    let mut counts = vec![0usize; edges.len() - 1];
    for k in 0..samples {
        let v = symbol.eval(2.0 * PI * (k as f64 + 0.5) / samples as f64);
        let idx = edges.partition_point(|&e| e < v); // right-closed cells, matching the CDF
        if idx >= 1 && idx < edges.len() {
            counts[idx - 1] += 1;
        }
    }
    Ok(edges
        .windows(2)
        .zip(counts)
        .map(|(w, c)| ((w[0] + w[1]) / 2.0, c as f64 / samples as f64 / (w[1] - w[0])))
        .collect())
}

/// Limiting spectral support of the Ewens transform at `θ = βm` as
/// `m → ∞`: the range of the symbol of `cX + (1-c)I`, `c = β²/(β+1)²`.
///
/// Tridiagonal: `[1 - 2bc, 1 + 2bc]`. Power: `[1 - 2cα/(1+α), 1 + 2cα/(1-α)]`.
pub fn limiting_support(family: ToeplitzFamily, beta: f64) -> Result<SupportInterval> {
    if !(beta > 0.0) {
        return Err(invalid(format!("β must be positive, got {beta}")));
    }
    Ok(limiting_symbol(family, beta).range())
}

/// Symbol of `cX + (1-c)I`, `c = β²/(β+1)²`; `β = ∞` gives the raw symbol.
pub fn limiting_symbol(family: ToeplitzFamily, beta: f64) -> SymbolFunction {
    let c = if beta.is_infinite() { 1.0 } else { (beta / (beta + 1.0)).powi(2) };
    family.symbol().shrink_toward_one(c)
}

/// `e / √m`, the direction of the rank-one outlier of an Ewens transform.
pub fn flat_vector(m: usize) -> CVector {
    CVector::from_element(m, Complex64::new(1.0 / (m as f64).sqrt(), 0.0))
}
