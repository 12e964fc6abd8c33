//! Estimators for singular sample covariance matrices.
//!
//! The crate collects several averaging estimators that turn a rank-deficient
//! sample covariance `K = (1/n) M M*` into a usable estimate of the true
//! covariance (or its inverse):
//!
//! - [`haar`]: averages of `Φ*(ΦKΦ*)^{±1}Φ` over Haar-distributed one-sided
//!   unitaries `Φ ∈ C^{p×m}`, including the closed form of `cov_p` and the
//!   Schur-polynomial moment formulas.
//! - [`ewens`]: averages of `M_σ K M_σ*` over permutations drawn from the Ewens
//!   measure, and the injection (hybrid) variants that compress to `p` rows.
//! - [`toeplitz`]: tridiagonal and power Toeplitz truths with closed-form
//!   spectra, symbols and limiting spectral densities.
//!
//! Supporting machinery lives in [`linalg`] (dense complex Hermitian algebra,
//! pseudoinverses, sampling), [`combinatorics`] (partitions, characters,
//! Schur polynomials) and [`mc`] (seeded, parallel Monte Carlo accumulation).

pub mod combinatorics;
pub mod error;
pub mod ewens;
pub mod haar;
pub mod linalg;
pub mod mc;
pub mod random;
pub mod toeplitz;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, HermitianMatrix, SpectralDecomposition};
pub use num_complex::Complex64;
pub use random::RandomSource;
