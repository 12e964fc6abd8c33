use crate::error::{invalid, Result};

/// Integer partition with non-increasing, strictly positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Accepts non-increasing parts; trailing zeros are dropped.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("not a partition: {parts:?}")));
        }
        Ok(Self { parts })
    }

    pub(crate) fn from_sorted(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]) && !parts.contains(&0));
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Column lengths of the Young diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0);
        let parts = (0..cols).map(|c| self.parts.iter().filter(|&&r| r > c).count()).collect();
        Partition { parts }
    }

    /// Hook length of every box, row by row.
    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.weight());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = conj.parts[j] - i - 1;
                out.push(arm + leg + 1);
            }
        }
        out
    }

    /// Product of hook lengths; `N!/hook_product` is the number of standard
    /// Young tableaux.
    pub fn hook_product(&self) -> u128 {
        self.hook_lengths().iter().map(|&h| h as u128).product()
    }

    pub fn as_hook(&self) -> Option<HookShape> {
        if self.parts.is_empty() || self.parts[1..].iter().any(|&p| p != 1) {
            return None;
        }
        Some(HookShape {
            weight: self.weight(),
            legs: self.parts.len() - 1,
        })
    }
}

/// The hook `(N - j, 1^j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HookShape {
    weight: usize,
    legs: usize,
}

impl HookShape {
    /// Requires `0 <= j <= N - 1`.
    pub fn new(weight: usize, legs: usize) -> Result<Self> {
        if weight == 0 || legs >= weight {
            return Err(invalid(format!("no hook shape ({weight}-{legs}, 1^{legs})")));
        }
        Ok(Self { weight, legs })
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Number of trailing ones `j`.
    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn partition(&self) -> Partition {
        let mut parts = vec![self.weight - self.legs];
        parts.extend(std::iter::repeat_n(1, self.legs));
        Partition { parts }
    }
}

/// Cycle type `(1^{r_1} 2^{r_2} ... N^{r_N})`, stored as multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    /// `multiplicities[l - 1] = r_l`.
    multiplicities: Vec<usize>,
}

impl CycleType {
    pub fn from_multiplicities(mut multiplicities: Vec<usize>) -> Self {
        while multiplicities.last() == Some(&0) {
            multiplicities.pop();
        }
        Self { multiplicities }
    }

    pub fn from_partition(rho: &Partition) -> Self {
        let top = rho.parts().first().copied().unwrap_or(0);
        let mut multiplicities = vec![0; top];
        for &p in rho.parts() {
            multiplicities[p - 1] += 1;
        }
        Self { multiplicities }
    }

    /// `r_l` for `l >= 1`.
    pub fn multiplicity(&self, l: usize) -> usize {
        self.multiplicities.get(l - 1).copied().unwrap_or(0)
    }

    pub fn max_length(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn weight(&self) -> usize {
        self.multiplicities.iter().enumerate().map(|(i, r)| (i + 1) * r).sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Cycle lengths, non-increasing.
    pub fn to_partition(&self) -> Partition {
        let mut parts = Vec::new();
        for l in (1..=self.multiplicities.len()).rev() {
            parts.extend(std::iter::repeat_n(l, self.multiplicities[l - 1]));
        }
        Partition { parts }
    }

    /// Centralizer order `z_ρ = Π l^{r_l} r_l!`.
    pub fn z(&self) -> u128 {
        let mut z = 1u128;
        for (i, &r) in self.multiplicities.iter().enumerate() {
            let l = (i + 1) as u128;
            for k in 1..=r as u128 {
                z *= l * k;
            }
        }
        z
    }

    /// Sign of any permutation of this cycle type.
    pub fn sign(&self) -> i64 {
        if (self.weight() - self.num_cycles()) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// All partitions of `n` in descending lexicographic order. `n = 0` yields
/// the single empty partition.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_sorted(cur.clone()));
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            rec(rest - first, first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
