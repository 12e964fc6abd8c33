//! Partitions, symmetric-group characters and Schur polynomials.
//!
//! Schur polynomials are available through three routes that share no code:
//! the bialternant ratio `a_{λ+δ}/a_δ`, the Jacobi–Trudi determinant in
//! complete homogeneous polynomials, and (for hook shapes) the power-sum
//! expansion weighted by Murnaghan–Nakayama characters.

mod character;
mod partition;
mod schur;

pub use character::{character, hook_character, CharacterTable};
pub use partition::{enumerate_partitions, CycleType, HookShape, Partition};
pub use schur::{
    schur_bialternant, schur_bialternant_complex, schur_hook_derivative_coeffs, schur_hook_powersum,
    schur_jacobi_trudi, PowerSums,
};

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `n!` as an exact integer; `None` on overflow.
pub fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}
