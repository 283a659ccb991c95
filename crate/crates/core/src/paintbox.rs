//! Distinguished mass-partitions and the distinguished paint-box.
//!
//! A mass-partition `s = (s₀; s₁ ≥ s₂ ≥ …)` with `Σ sᵢ ≤ 1` leaves dust
//! `δ = 1 − Σ sᵢ`. The paint-box pins `X₀ = 0` and draws `X₁, …, Xₙ` i.i.d.
//! with `P[X = k] = s_k` and `P[X = ∂] = δ`; indices sharing a label other than
//! `∂` form a block, dust indices are singletons.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::DistinguishedPartition;

const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedMassPartition {
    s0: f64,
    tail: Vec<f64>,
}

impl DistinguishedMassPartition {
    /// Validates `s₀ ≥ 0`, a non-increasing nonnegative tail and total mass
    /// at most 1 (up to rounding). Trailing zeros are dropped.
    pub fn new(s0: f64, mut tail: Vec<f64>) -> Result<Self> {
        if !(s0.is_finite() && s0 >= 0.0) {
            return Err(Error::InvalidInput(format!("s0 = {s0} must be a nonnegative number")));
        }
        if tail.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidInput("tail masses must be nonnegative numbers".into()));
        }
        if tail.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("tail must be non-increasing".into()));
        }
        while tail.last() == Some(&0.0) {
            tail.pop();
        }
        let total = s0 + tail.iter().sum::<f64>();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidInput(format!("total mass {total} exceeds 1")));
        }
        Ok(Self { s0, tail })
    }

    /// Sorts the tail before validating.
    pub fn from_unsorted(s0: f64, mut tail: Vec<f64>) -> Result<Self> {
        tail.sort_unstable_by(|a, b| b.total_cmp(a));
        Self::new(s0, tail)
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    /// `δ = 1 − s₀ − Σ tail`, clamped at 0 against rounding.
    pub fn dust(&self) -> f64 {
        (1.0 - self.s0 - self.tail.iter().sum::<f64>()).max(0.0)
    }

    /// Label categories in order `(s₀, s₁, …, s_K, δ)`.
    fn categories(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.tail.len() + 2);
        c.push(self.s0);
        c.extend_from_slice(&self.tail);
        c.push(self.dust());
        c
    }
}

impl fmt::Display for DistinguishedMassPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.s0)?;
        for (i, x) in self.tail.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Text form `s0;s1,s2,...` with implicit dust. `0.3` alone means `s₀ = 0.3`
/// with empty tail.
impl FromStr for DistinguishedMassPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("bad mass-partition {s:?}: {what}"));
        let (head, rest) = s.split_once(';').unwrap_or((s, ""));
        let s0 = head.trim().parse::<f64>().map_err(|_| bad("s0 is not a number"))?;
        let tail = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| bad("tail entry is not a number")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s0, tail).map_err(|e| bad(&e.to_string()))
    }
}

fn partition_from_categories(labels: impl Iterator<Item = Option<usize>>, n: usize)
    -> DistinguishedPartition {
    // `None` is dust; give each dust index a private label.
    let mut out = Vec::with_capacity(n + 1);
    out.push(0usize);
    let mut fresh = usize::MAX;
    for l in labels {
        match l {
            Some(k) => out.push(k),
            None => {
                out.push(fresh);
                fresh -= 1;
            }
        }
    }
    DistinguishedPartition::from_labels(&out).expect("paint-box labels are valid")
}

/// Samples `π|{0,…,n}` from the `s`-distinguished paint-box via the
/// categorical law of the labels.
pub fn sample_paintbox<R: Rng + ?Sized>(
    s: &DistinguishedMassPartition,
    n: usize,
    rng: &mut R,
) -> DistinguishedPartition {
    let cats = s.categories();
    let dust_index = cats.len() - 1;
    let cumulative: Vec<f64> = cats
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let total = cumulative[dust_index];
    let labels = (0..n).map(|_| {
        let u: f64 = rng.random::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= u).min(dust_index);
        (k != dust_index).then_some(k)
    });
    partition_from_categories(labels, n)
}

/// The same law through the interval representation: `U` uniform on
/// `[0,1)`, label `k` iff `U ∈ [s₀+…+s_{k−1}, s₀+…+s_k)`, dust beyond the
/// last interval.
pub fn sample_paintbox_intervals<R: Rng + ?Sized>(
    s: &DistinguishedMassPartition,
    n: usize,
    rng: &mut R,
) -> DistinguishedPartition {
    let mut ends = Vec::with_capacity(s.tail.len() + 1);
    let mut acc = s.s0;
    ends.push(acc);
    for &x in &s.tail {
        acc += x;
        ends.push(acc);
    }
    let labels = (0..n).map(|_| {
        let u: f64 = rng.random();
        ends.iter().position(|&e| u < e)
    });
    partition_from_categories(labels, n)
}

/// `P[1,…,q are singletons] = δ^q`.
pub fn singleton_probability(s: &DistinguishedMassPartition, q: u32) -> f64 {
    s.dust().powi(q as i32)
}

/// `P[0 is a singleton]`: 0 when `s₀ > 0`, 1 otherwise.
pub fn zero_singleton_probability(s: &DistinguishedMassPartition) -> f64 {
    if s.s0 > 0.0 {
        0.0
    } else {
        1.0
    }
}

/// Exact law of the paint-box restricted to `{0,…,n}`, by enumerating label
/// assignments. Exponential in `n`; meant for `n ≤ 6`.
pub fn exact_law(
    s: &DistinguishedMassPartition,
    n: usize,
) -> std::collections::BTreeMap<DistinguishedPartition, f64> {
    let cats = s.categories();
    let m = cats.len();
    let mut law = std::collections::BTreeMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let prob: f64 = idx.iter().map(|&k| cats[k]).product();
        if prob > 0.0 {
            let part = partition_from_categories(
                idx.iter().map(|&k| (k != m - 1).then_some(k)),
                n,
            );
            *law.entry(part).or_insert(0.0) += prob;
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == n {
                return law;
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
