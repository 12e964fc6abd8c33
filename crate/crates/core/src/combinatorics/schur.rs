use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use super::character::CharacterTable;
use super::partition::{enumerate_partitions, CycleType, HookShape, Partition};
use crate::error::{invalid, Error, Result};

/// Power sums `p_l = Tr(D^l) = Σ_i d_i^l` for `l = 1..=degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    values: Vec<f64>,
}

impl PowerSums {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn of(d: &[f64], degree: usize) -> Self {
        let values = (1..=degree).map(|l| d.iter().map(|x| x.powi(l as i32)).sum()).collect();
        Self { values }
    }

    pub fn degree(&self) -> usize {
        self.values.len()
    }

    /// `p_l`, `l >= 1`.
    pub fn get(&self, l: usize) -> f64 {
        self.values[l - 1]
    }

    fn require(&self, n: usize) -> Result<()> {
        if self.values.len() < n {
            return Err(invalid(format!(
                "power sums known up to degree {}, need {n}",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// `Π_l p_l^{r_l} / (l^{r_l} r_l!)`, skipping the factor for `skip` whose
/// exponent is lowered by one instead (used for derivatives).
fn weighted_monomial(rho: &CycleType, p: &PowerSums, lowered: Option<usize>) -> f64 {
    let mut v = 1.0;
    for l in 1..=rho.max_length() {
        let r = rho.multiplicity(l);
        if r == 0 {
            continue;
        }
        let mut fact = 1.0;
        for k in 1..=r {
            fact *= k as f64;
        }
        if lowered == Some(l) {
            // ∂/∂p_l of p_l^r/(l^r r!) times ∂p_l/∂d = l d^{l-1}:
            // r p_l^{r-1} / (l^{r-1} r!)
            v *= r as f64 * p.get(l).powi(r as i32 - 1) / ((l as f64).powi(r as i32 - 1) * fact);
        } else {
            v *= p.get(l).powi(r as i32) / ((l as f64).powi(r as i32) * fact);
        }
    }
    v
}

/// `s_{(N-j,1^j)}` from power sums: `Σ_ρ χ(ρ) Π_l p_l^{r_l}/(l^{r_l} r_l!)`.
pub fn schur_hook_powersum(shape: HookShape, p: &PowerSums) -> Result<f64> {
    let n = shape.weight();
    p.require(n)?;
    let lambda = shape.partition();
    let mut table = CharacterTable::new();
    let mut total = 0.0;
    for rho_p in enumerate_partitions(n) {
        let rho = CycleType::from_partition(&rho_p);
        let chi = table.character(&lambda, &rho)?;
        if chi != 0 {
            total += chi as f64 * weighted_monomial(&rho, p, None);
        }
    }
    Ok(total)
}

/// Coefficients `c_0..c_{N-1}` with `∂s_{(N-j,1^j)}/∂d_i = Σ_k c_k d_i^k`.
/// They depend on the variables only through the power sums.
pub fn schur_hook_derivative_coeffs(shape: HookShape, p: &PowerSums) -> Result<Vec<f64>> {
    let n = shape.weight();
    p.require(n)?;
    let lambda = shape.partition();
    let mut table = CharacterTable::new();
    let mut coeffs = vec![0.0; n];
    for rho_p in enumerate_partitions(n) {
        let rho = CycleType::from_partition(&rho_p);
        let chi = table.character(&lambda, &rho)?;
        if chi == 0 {
            continue;
        }
        for k in 1..=n {
            if rho.multiplicity(k) > 0 {
                coeffs[k - 1] += chi as f64 * weighted_monomial(&rho, p, Some(k));
            }
        }
    }
    Ok(coeffs)
}

/// Relative gap below which the alternant ratio is abandoned. Its error
/// grows like `eps / gap^k`, so already at a gap of 1e-4 only ~10 digits
/// survive.
const COINCIDENCE_TOL: f64 = 1e-3;

fn check_shape(lambda: &Partition, n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("Schur polynomial needs at least one variable"));
    }
    if lambda.len() > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambda.len(),
        });
    }
    Ok(())
}

fn nearly_coincident<T: ComplexField<RealField = f64> + Copy>(x: &[T]) -> bool {
    let scale = x.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            if (x[i] - x[j]).modulus() < COINCIDENCE_TOL * scale.max(f64::MIN_POSITIVE) {
                return true;
            }
        }
    }
    false
}

fn bialternant_ratio<T: ComplexField<RealField = f64> + Copy>(lambda: &Partition, x: &[T]) -> T {
    let n = x.len();
    let exps: Vec<usize> = (0..n)
        .map(|i| lambda.parts().get(i).copied().unwrap_or(0) + n - 1 - i)
        .collect();
    let num = DMatrix::from_fn(n, n, |i, j| x[j].powi(exps[i] as i32)).determinant();
    // det(x_j^{n-1-i}) = Π_{i<j} (x_i - x_j)
    let mut den = T::one();
    for i in 0..n {
        for j in (i + 1)..n {
            den *= x[i] - x[j];
        }
    }
    num / den
}

fn jacobi_trudi<T: ComplexField<RealField = f64> + Copy>(lambda: &Partition, x: &[T]) -> T {
    let l = lambda.len();
    if l == 0 {
        return T::one();
    }
    let top = lambda.parts()[0] + l;
    // complete homogeneous h_k(x_1..x_n), k = 0..top
    let mut h = vec![T::zero(); top + 1];
    h[0] = T::one();
    for &xi in x {
        for k in 1..=top {
            let prev = h[k - 1];
            h[k] += xi * prev;
        }
    }
    let parts = lambda.parts();
    DMatrix::from_fn(l, l, |i, j| {
        let idx = parts[i] as isize - i as isize + j as isize;
        if idx < 0 {
            T::zero()
        } else {
            h[idx as usize]
        }
    })
    .determinant()
}

/// `s_λ(x_1..x_n)` as the ratio of alternants. Near-coincident variables
/// fall back to the Jacobi–Trudi determinant, never to the power-sum route.
pub fn schur_bialternant(lambda: &Partition, x: &[f64]) -> Result<f64> {
    check_shape(lambda, x.len())?;
    if nearly_coincident(x) {
        return Ok(jacobi_trudi(lambda, x));
    }
    Ok(bialternant_ratio(lambda, x))
}

/// Complex-argument bialternant; near-coincident variables use Jacobi–Trudi.
pub fn schur_bialternant_complex(lambda: &Partition, x: &[Complex64]) -> Result<Complex64> {
    check_shape(lambda, x.len())?;
    if nearly_coincident(x) {
        return Ok(jacobi_trudi(lambda, x));
    }
    Ok(bialternant_ratio(lambda, x))
}

/// `s_λ = det(h_{λ_i - i + j})`, valid for any variables including repeated
/// ones.
pub fn schur_jacobi_trudi(lambda: &Partition, x: &[f64]) -> Result<f64> {
    check_shape(lambda, x.len())?;
    Ok(jacobi_trudi(lambda, x))
}
