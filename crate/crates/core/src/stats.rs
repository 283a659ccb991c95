//! Small Monte-Carlo statistics helpers: mean ± standard error, empirical
//! laws on finite state spaces, total variation and chi-square tests.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self { mean, se: (var / n as f64).sqrt(), samples: n }
    }

    /// `|mean − target| / se`; zero when both the deviation and the error
    /// vanish.
    pub fn z_against(&self, target: f64) -> f64 {
        z_score(self.mean - target, self.se)
    }

    /// Two-sample z-score of the difference of means.
    pub fn z_between(&self, other: &Estimate) -> f64 {
        z_score(self.mean - other.mean, self.se.hypot(other.se))
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff.abs() / se
    }
}

/// Counts over an ordered finite state space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw<K: Ord> {
    counts: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord> Default for EmpiricalLaw<K> {
    fn default() -> Self {
        Self { counts: BTreeMap::new(), total: 0 }
    }
}

impl<K: Ord + Clone> EmpiricalLaw<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, k: K) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, k: &K) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<K, u64> {
        &self.counts
    }

    pub fn probabilities(&self) -> BTreeMap<K, f64> {
        let t = self.total as f64;
        self.counts.iter().map(|(k, c)| (k.clone(), *c as f64 / t)).collect()
    }
}

impl<K: Ord + Clone> FromIterator<K> for EmpiricalLaw<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut law = Self::new();
        for k in iter {
            law.add(k);
        }
        law
    }
}

/// `½ Σ |p(k) − q(k)|`.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, a) in p {
        sum += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, b) in q {
        if !p.contains_key(k) {
            sum += b.abs();
        }
    }
    0.5 * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

/// Pearson goodness of fit of observed counts against an exact law.
/// Cells with expected count below `min_expected` are pooled into one cell.
pub fn chi_square_gof<K: Ord + Clone>(
    observed: &EmpiricalLaw<K>,
    expected: &BTreeMap<K, f64>,
    min_expected: f64,
) -> ChiSquareTest {
    let n = observed.total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
    for (k, p) in expected {
        let e = p * n;
        let o = observed.count(k) as f64;
        if e < min_expected {
            pooled_o += o;
            pooled_e += e;
        } else {
            cells.push((o, e));
        }
    }
    // Observations outside the declared support land in the pool.
    let declared: u64 = expected.keys().map(|k| observed.count(k)).sum();
    pooled_o += (observed.total - declared) as f64;
    if pooled_e > 0.0 || pooled_o > 0.0 {
        cells.push((pooled_o, pooled_e));
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = cells.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_p(statistic, dof) }
}

/// Pearson chi-square test of homogeneity between two samples.
pub fn chi_square_homogeneity<K: Ord + Clone>(a: &EmpiricalLaw<K>, b: &EmpiricalLaw<K>) -> ChiSquareTest {
    let (na, nb) = (a.total as f64, b.total as f64);
    let n = na + nb;
    let mut keys: Vec<&K> = a.counts.keys().chain(b.counts.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut statistic = 0.0;
    for k in &keys {
        let (oa, ob) = (a.count(k) as f64, b.count(k) as f64);
        let row = oa + ob;
        let (ea, eb) = (row * na / n, row * nb / n);
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let dof = keys.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_p(statistic, dof) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_of_constant() {
        let e = Estimate::from_samples(&[2.0; 10]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.se, 0.0);
        assert_eq!(e.z_against(2.0), 0.0);
    }

    #[test]
    fn tv_distance() {
        let p: BTreeMap<u8, f64> = [(0, 0.5), (1, 0.5)].into();
        let q: BTreeMap<u8, f64> = [(1, 0.25), (2, 0.75)].into();
        assert!((total_variation(&p, &q) - 0.75).abs() < 1e-15);
        assert_eq!(total_variation(&p, &p), 0.0);
    }

    #[test]
    fn identical_samples_are_homogeneous() {
        let a: EmpiricalLaw<u8> = [0, 1, 1, 2, 2, 2].into_iter().collect();
        let t = chi_square_homogeneity(&a, &a.clone());
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gof_detects_a_wrong_law() {
        let obs: EmpiricalLaw<u8> = std::iter::repeat_n(0, 900).chain(std::iter::repeat_n(1, 100)).collect();
        let fair: BTreeMap<u8, f64> = [(0, 0.5), (1, 0.5)].into();
        assert!(chi_square_gof(&obs, &fair, 5.0).p_value < 1e-10);
        let right: BTreeMap<u8, f64> = [(0, 0.9), (1, 0.1)].into();
        assert!(chi_square_gof(&obs, &right, 5.0).p_value > 0.5);
    }
}
