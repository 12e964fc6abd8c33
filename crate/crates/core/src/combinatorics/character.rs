//! Irreducible characters of the symmetric group by the Murnaghan–Nakayama
//! rule.
//!
//! A partition is held as a beta-set (first-column hook lengths of a padded
//! diagram). Removing a border strip of length `r` moves one bead from `b` to
//! `b - r`; the strip's height is the number of beads jumped over.

use std::collections::HashMap;

use super::partition::{CycleType, HookShape, Partition};
use crate::error::{invalid, Result};

/// Memo of `χ^λ(ρ)` keyed on the remaining shape and remaining cycle lengths.
/// Not shared between threads; create one per worker.
#[derive(Debug, Default)]
pub struct CharacterTable {
    memo: HashMap<(Vec<usize>, Vec<usize>), i64>,
}

impl CharacterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ^λ(ρ)`; the weights of `λ` and `ρ` must agree.
    pub fn character(&mut self, lambda: &Partition, rho: &CycleType) -> Result<i64> {
        if lambda.weight() != rho.weight() {
            return Err(invalid(format!(
                "character: shape has weight {} but cycle type has weight {}",
                lambda.weight(),
                rho.weight()
            )));
        }
        let cycles = rho.to_partition().parts().to_vec();
        Ok(self.strip(lambda.parts().to_vec(), &cycles))
    }

    fn strip(&mut self, shape: Vec<usize>, cycles: &[usize]) -> i64 {
        let Some((&r, rest)) = cycles.split_first() else {
            return if shape.is_empty() { 1 } else { 0 };
        };
        let key = (shape, cycles.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let shape = &key.0;
        let len = shape.len();
        // beta_i = λ_i + len - 1 - i, strictly decreasing
        let beta: Vec<usize> = shape.iter().enumerate().map(|(i, &l)| l + len - 1 - i).collect();
        let mut total = 0i64;
        for (idx, &b) in beta.iter().enumerate() {
            if b < r || beta.contains(&(b - r)) {
                continue;
            }
            let target = b - r;
            let height = beta.iter().filter(|&&x| x > target && x < b).count();
            let mut moved = beta.clone();
            moved[idx] = target;
            moved.sort_unstable_by(|a, b| b.cmp(a));
            let k = moved.len();
            let mut next: Vec<usize> = moved.iter().enumerate().map(|(i, &x)| x + i + 1 - k).collect();
            while next.last() == Some(&0) {
                next.pop();
            }
            let sign = if height % 2 == 0 { 1 } else { -1 };
            total += sign * self.strip(next, rest);
        }
        self.memo.insert(key, total);
        total
    }
}

/// `χ^λ(ρ)` with a throwaway memo.
pub fn character(lambda: &Partition, rho: &CycleType) -> Result<i64> {
    CharacterTable::new().character(lambda, rho)
}

/// `χ^{(N-j, 1^j)}(ρ)`.
pub fn hook_character(shape: HookShape, rho: &CycleType) -> Result<i64> {
    character(&shape.partition(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_partitions;

    fn ct(parts: &[usize]) -> CycleType {
        CycleType::from_partition(&Partition::new(parts.to_vec()).unwrap())
    }

    #[test]
    fn weight_three_table() {
        let rows = [(0, [1, 1, 1]), (1, [2, 0, -1]), (2, [1, -1, 1])];
        let cols = [ct(&[1, 1, 1]), ct(&[2, 1]), ct(&[3])];
        for (j, want) in rows {
            let shape = HookShape::new(3, j).unwrap();
            for (rho, w) in cols.iter().zip(want) {
                assert_eq!(hook_character(shape, rho).unwrap(), w);
            }
        }
    }

    #[test]
    fn trivial_and_sign_characters() {
        for n in 1..=6 {
            for p in enumerate_partitions(n) {
                let rho = CycleType::from_partition(&p);
                assert_eq!(hook_character(HookShape::new(n, 0).unwrap(), &rho).unwrap(), 1);
                assert_eq!(hook_character(HookShape::new(n, n - 1).unwrap(), &rho).unwrap(), rho.sign());
            }
        }
    }

    #[test]
    fn column_orthogonality_for_all_shapes() {
        // Σ_ρ (N!/z_ρ) χ^λ(ρ)^2 = N!, and distinct λ are orthogonal.
        for n in 1..=6 {
            let nf: i128 = (1..=n as i128).product();
            let shapes = enumerate_partitions(n);
            let mut table = CharacterTable::new();
            for a in &shapes {
                for b in &shapes {
                    let s: i128 = shapes
                        .iter()
                        .map(|p| {
                            let rho = CycleType::from_partition(p);
                            let ca = table.character(a, &rho).unwrap() as i128;
                            let cb = table.character(b, &rho).unwrap() as i128;
                            nf / rho.z() as i128 * ca * cb
                        })
                        .sum();
                    assert_eq!(s, if a == b { nf } else { 0 });
                }
            }
        }
    }

    #[test]
    fn dimension_matches_hook_length_formula() {
        for n in 1..=8 {
            let nf: u128 = (1..=n as u128).product();
            let id = CycleType::from_multiplicities(vec![n]);
            for p in enumerate_partitions(n) {
                assert_eq!(character(&p, &id).unwrap() as u128, nf / p.hook_product());
            }
        }
    }

    #[test]
    fn mismatched_weights_rejected() {
        assert!(hook_character(HookShape::new(3, 1).unwrap(), &ct(&[2, 2])).is_err());
    }
}
