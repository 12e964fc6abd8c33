//! The Ewens measure on permutations and its push-forward to injections.

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Largest `m` for which `S_m` is enumerated.
pub const MAX_ENUMERATED_M: usize = 9;
/// Largest `|S_{p,m}| = m!/(m-p)!` that is enumerated.
pub const MAX_ENUMERATED_INJECTIONS: usize = 500_000;
/// Largest number of free points `m - p` for which completions are
/// enumerated when computing an injection's probability.
pub const MAX_ENUMERATED_COMPLETION: usize = 8;

/// Ewens parameter `θ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta(f64);

impl Theta {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(invalid(format!("Ewens parameter must be positive and finite, got {theta}")));
        }
        Ok(Self(theta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ln(θ(θ+1)...(θ+k-1))`.
pub fn ln_rising(theta: f64, k: usize) -> f64 {
    (0..k).map(|i| (theta + i as f64).ln()).sum()
}

/// A bijection of `{0, .., m-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m || seen[x] {
                return Err(invalid(format!("not a permutation: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(m: usize) -> Self {
        Self { images: (0..m).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// Number of cycles `K(σ)`, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let m = self.images.len();
        let mut visited = vec![false; m];
        let mut cycles = 0;
        for start in 0..m {
            if visited[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = self.images[i];
            }
        }
        cycles
    }

    /// Restriction to `{0, .., p-1}`.
    pub fn restrict(&self, p: usize) -> Injection {
        Injection {
            m: self.images.len(),
            images: self.images[..p].to_vec(),
        }
    }
}

/// `p_{θ,m}(σ) = θ^{K(σ)} / (θ(θ+1)...(θ+m-1))`.
pub fn ewens_probability(sigma: &Permutation, theta: Theta) -> f64 {
    let t = theta.value();
    (sigma.cycle_count() as f64 * t.ln() - ln_rising(t, sigma.len())).exp()
}

/// Exact draw from the Ewens measure by sequential cycle insertion: element
/// `i` opens a new cycle with probability `θ/(θ+i)` and is otherwise spliced
/// in after a uniformly chosen earlier element. Consumes exactly `m` uniforms.
pub fn sample_ewens<R: Rng + ?Sized>(m: usize, theta: Theta, rng: &mut R) -> Permutation {
    let t = theta.value();
    let mut images: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let u: f64 = rng.random::<f64>() * (t + i as f64);
        if u < t || i == 0 {
            images.push(i);
        } else {
            let j = (((u - t).floor()) as usize).min(i - 1);
            images.push(images[j]);
            images[j] = i;
        }
    }
    Permutation { images }
}

/// Every permutation of `{0, .., m-1}`, `m <= MAX_ENUMERATED_M`.
pub fn enumerate_permutations(m: usize) -> Result<Vec<Permutation>> {
    if m > MAX_ENUMERATED_M {
        return Err(Error::BudgetExceeded(format!(
            "enumerating S_{m} exceeds the budget of m <= {MAX_ENUMERATED_M}"
        )));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// A one-to-one map `{0, .., p-1} -> {0, .., m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Injection {
    m: usize,
    images: Vec<usize>,
}

impl Injection {
    pub fn new(images: Vec<usize>, m: usize) -> Result<Self> {
        if images.len() > m {
            return Err(invalid(format!("injection from {} points into {m}", images.len())));
        }
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m || seen[x] {
                return Err(invalid(format!("not an injection into [{m}]: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { m, images })
    }

    pub fn p(&self) -> usize {
        self.images.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Number of cycles lying entirely inside the domain.
    pub fn closed_cycles(&self) -> usize {
        let p = self.images.len();
        let mut state = vec![0u8; p]; // 0 unvisited, 1 on current walk, 2 done
        let mut cycles = 0;
        for start in 0..p {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut i = start;
            loop {
                if i >= p {
                    break;
                }
                if state[i] == 1 {
                    cycles += 1;
                    break;
                }
                if state[i] == 2 {
                    break;
                }
                state[i] = 1;
                walk.push(i);
                i = self.images[i];
            }
            for w in walk {
                state[w] = 2;
            }
        }
        cycles
    }

    /// Every permutation of `[m]` extending this injection.
    fn completions(&self) -> Vec<Permutation> {
        let p = self.images.len();
        let mut used = vec![false; self.m];
        self.images.iter().for_each(|&x| used[x] = true);
        let free: Vec<usize> = (0..self.m).filter(|&x| !used[x]).collect();
        let q = free.len();
        let mut out = Vec::new();
        let mut order: Vec<usize> = (0..q).collect();
        loop {
            let mut images = self.images.clone();
            images.extend(order.iter().map(|&k| free[k]));
            debug_assert_eq!(images.len(), p + q);
            out.push(Permutation { images });
            let Some(i) = (1..q).rev().find(|&i| order[i - 1] < order[i]) else {
                break;
            };
            let j = (i..q).rev().find(|&j| order[j] > order[i - 1]).expect("pivot exists");
            order.swap(i - 1, j);
            order[i..].reverse();
        }
        out
    }
}

/// `μ_{θ,m,p}(σ)`, the Ewens mass of all permutations whose restriction to
/// `[p]` is `σ`.
///
/// With `q = m - p` free points the completions are enumerated when
/// `q <= MAX_ENUMERATED_COMPLETION`. Otherwise each maximal chain of the
/// partial map is contracted to a point: completions correspond to
/// permutations of the `q` chains, and the cycles of a completion are the
/// closed cycles of `σ` plus the cycles of that permutation, so the mass is
/// `θ^{closed} (θ)_q / (θ)_m`.
pub fn injection_probability(sigma: &Injection, theta: Theta) -> f64 {
    let q = sigma.m() - sigma.p();
    if q <= MAX_ENUMERATED_COMPLETION {
        sigma.completions().iter().map(|c| ewens_probability(c, theta)).sum()
    } else {
        injection_probability_contracted(sigma, theta)
    }
}

/// The chain-contraction formula used by [`injection_probability`] for large
/// `m - p`.
pub fn injection_probability_contracted(sigma: &Injection, theta: Theta) -> f64 {
    let t = theta.value();
    let q = sigma.m() - sigma.p();
    (sigma.closed_cycles() as f64 * t.ln() + ln_rising(t, q) - ln_rising(t, sigma.m())).exp()
}

/// Every injection `[p] -> [m]`, within the enumeration budget.
pub fn enumerate_injections(p: usize, m: usize) -> Result<Vec<Injection>> {
    if p > m {
        return Err(invalid(format!("no injections from {p} points into {m}")));
    }
    let count = ((m - p + 1)..=m).try_fold(1usize, |acc, k| acc.checked_mul(k));
    match count {
        Some(c) if c <= MAX_ENUMERATED_INJECTIONS => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "|S_({p},{m})| exceeds {MAX_ENUMERATED_INJECTIONS} injections"
            )))
        }
    }
    fn rec(p: usize, m: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Injection>) {
        if cur.len() == p {
            out.push(Injection { m, images: cur.clone() });
            return;
        }
        for x in 0..m {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(p, m, used, cur, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(p, m, &mut vec![false; m], &mut Vec::new(), &mut out);
    Ok(out)
}
