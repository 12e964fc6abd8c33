//! Pseudoinverse of a Gram matrix `B = M*M` after appending one column to
//! `M = [A a]`, expressed through `A^+` (Kurmayya–Sivakumar block update).

use num_complex::Complex64;

use super::{pinv, CMatrix, CVector, HermitianMatrix};

/// Which closed form produced the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPinvBranch {
    /// `a` has a component outside the range of `A`.
    Schur,
    /// `a` lies in the range of `A`.
    InRange,
}

#[derive(Debug, Clone)]
pub struct BlockPinvUpdate {
    /// `(M*M)^+`, of dimension `cols(A) + 1`.
    pub pinv: HermitianMatrix,
    /// `(M*M)^+ - diag((A*A)^+, 0)`.
    pub correction: CMatrix,
    /// The Schur complement `s = |a|^2 - a* A A^+ a`, evaluated as
    /// `|a - A A^+ a|^2`.
    pub s: f64,
    pub branch: BlockPinvBranch,
}

/// `s` is treated as zero when `|s| <= 1e-10 * (1 + |a|^2)`.
pub fn s_is_zero(s: f64, a_norm_sq: f64) -> bool {
    s.abs() <= 1e-10 * (1.0 + a_norm_sq)
}

/// Computes `(M*M)^+` for `M = [A a]` from `A` and the new column `a`.
///
/// `A` is `m × (n-1)` (possibly with zero columns), `a` has length `m`.
pub fn block_pinv_update(a_mat: &CMatrix, a: &CVector) -> BlockPinvUpdate {
    assert_eq!(a_mat.nrows(), a.len(), "block_pinv_update: row mismatch");
    let k = a_mat.ncols();
    let n = k + 1;
    let a_pinv = pinv(a_mat);
    let x = &a_pinv * a; // A^+ a
    let a_norm_sq = a.norm_squared();
    let resid = a - a_mat * &x; // (I - A A^+) a
    let s = resid.norm_squared();

    let gram_pinv = &a_pinv * a_pinv.adjoint(); // (A*A)^+ = A^+ (A^+)*
    let mut full = CMatrix::zeros(n, n);
    let branch;
    if !s_is_zero(s, a_norm_sq) {
        branch = BlockPinvBranch::Schur;
        let inv_s = Complex64::new(1.0 / s, 0.0);
        full.view_mut((0, 0), (k, k)).copy_from(&(&gram_pinv + &x * x.adjoint() * inv_s));
        for i in 0..k {
            full[(i, k)] = -x[i] * inv_s;
            full[(k, i)] = -x[i].conj() * inv_s;
        }
        full[(k, k)] = inv_s;
    } else {
        branch = BlockPinvBranch::InRange;
        // b = (A*)^+ (I + x x*)^{-1} A^+ a = (A^+)* x / (1 + |x|^2). The
        // expanded blocks x x*|b|^2 - x y* - y x* cancel badly when |x| is
        // large, so the result is assembled from G = A^+ - x b* instead:
        // (M*M)^+ = [G; b*] [G; b*]*.
        let b = a_pinv.adjoint() * &x * Complex64::new(1.0 / (1.0 + x.norm_squared()), 0.0);
        let g = &a_pinv - &x * b.adjoint();
        full.view_mut((0, 0), (k, k)).copy_from(&(&g * g.adjoint()));
        let gb = &g * &b;
        for i in 0..k {
            full[(i, k)] = gb[i];
            full[(k, i)] = gb[i].conj();
        }
        full[(k, k)] = Complex64::new(b.norm_squared(), 0.0);
    }
    let mut corr = full.clone();
    let mut top_left = corr.view_mut((0, 0), (k, k));
    top_left -= &gram_pinv;
    BlockPinvUpdate {
        pinv: HermitianMatrix::symmetrized(full),
        correction: corr,
        s,
        branch,
    }
}
