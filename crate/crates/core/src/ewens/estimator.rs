//! The permutation-average estimator `K_θ = E(M_σ K M_σ*)`.

use num_complex::Complex64;

use super::measure::{enumerate_permutations, ewens_probability, Theta};
use crate::error::Result;
use crate::linalg::{CMatrix, HermitianMatrix};

/// Entrywise closed form of `K_θ`, valid for any square complex `K`.
///
/// Costs `O(m^2)`: the sums over `k ≠ i, j` and `l ≠ k` are recovered from
/// row sums, column sums and the total.
pub fn ewens_transform(k: &CMatrix, theta: Theta) -> CMatrix {
    let m = k.nrows();
    assert_eq!(m, k.ncols(), "ewens_transform: square matrix required");
    if m < 2 {
        return k.clone();
    }
    let t = theta.value();
    let mf = m as f64;
    let trace: Complex64 = (0..m).map(|i| k[(i, i)]).sum();
    let row: Vec<Complex64> = (0..m).map(|i| k.row(i).iter().sum()).collect();
    let col: Vec<Complex64> = (0..m).map(|j| k.column(j).iter().sum()).collect();
    let total: Complex64 = row.iter().sum();
    let off_total = total - trace;

    let den_diag = t + mf - 1.0;
    let den_off = (t + mf - 2.0) * (t + mf - 1.0);
    CMatrix::from_fn(m, m, |i, j| {
        if i == j {
            return (k[(i, i)] * (t - 1.0) + trace) / den_diag;
        }
        let (aij, aji) = (k[(i, j)], k[(j, i)]);
        // Σ_{k≠i,j} a_ik and Σ_{k≠i,j} a_kj
        let row_rest = row[i] - k[(i, i)] - aij;
        let col_rest = col[j] - k[(j, j)] - aij;
        (aij * (t * t - 1.0) + aji * (t - 1.0) + (row_rest + col_rest) * (t - 1.0) + off_total) / den_off
    })
}

/// `K_θ` for Hermitian `K`.
pub fn ewens_estimator(k: &HermitianMatrix, theta: Theta) -> HermitianMatrix {
    HermitianMatrix::symmetrized(ewens_transform(k.as_matrix(), theta))
}

/// `Σ_σ p_θ(σ) M_σ K M_σ*` summed over all of `S_m`, `m <= 9`.
pub fn ewens_estimator_bruteforce(k: &HermitianMatrix, theta: Theta) -> Result<HermitianMatrix> {
    let m = k.dim();
    let a = k.as_matrix();
    let mut out = CMatrix::zeros(m, m);
    for sigma in enumerate_permutations(m)? {
        let w = ewens_probability(&sigma, theta);
        let s = sigma.images();
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] += a[(s[i], s[j])] * w;
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}
