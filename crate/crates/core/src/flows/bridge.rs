//! Distinguished bridges `b_{y,x}(r) = y + x·1{v ≤ r} + r(1−x−y)` and their
//! compositions.
//!
//! Partitions are read off a bridge by sampling `U₁, …, Uₙ` uniform and
//! grouping indices whose inverse images agree. Agreement is decided by
//! tracking which plateau of the inverse each point falls on, factor by
//! factor, never by comparing floats.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::measures::BoundedMeasure;
use crate::paintbox::{exact_law, DistinguishedMassPartition};
use crate::partitions::DistinguishedPartition;
use crate::rng::{exponential, family_stream};
use crate::stats::{total_variation, EmpiricalLaw};

const PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistinguishedBridge {
    y: f64,
    x: f64,
    v: f64,
}

/// Where `b⁻¹` sends a point.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Preimage {
    /// The plateau `[0, b(0))` of the inverse, mapped to 0.
    Zero,
    /// The plateau `[b(v−), b(v))` created by the interior jump, mapped to `v`.
    Jump(f64),
    /// A point where `b⁻¹` is strictly increasing.
    Regular(f64),
}

impl DistinguishedBridge {
    pub fn new(y: f64, x: f64, v: f64) -> Result<Self> {
        let unit = |z: f64| (0.0..=1.0).contains(&z);
        if !(unit(y) && unit(x) && unit(v)) {
            return Err(invalid(format!("bridge parameters y = {y}, x = {x}, v = {v} must lie in [0,1]")));
        }
        if x + y > 1.0 + PARAM_SLACK {
            return Err(invalid(format!("bridge needs x + y <= 1, got {}", x + y)));
        }
        let x = x.min(1.0 - y);
        Ok(Self { y, x, v })
    }

    pub fn identity() -> Self {
        Self { y: 0.0, x: 0.0, v: 0.0 }
    }

    /// `b_{y,x}` with the jump location `V` drawn uniformly.
    pub fn random<R: Rng + ?Sized>(y: f64, x: f64, rng: &mut R) -> Result<Self> {
        Self::new(y, x, rng.random())
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    fn slope(&self) -> f64 {
        (1.0 - self.x - self.y).max(0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 1.0;
        }
        let jump = if self.v <= r { self.x } else { 0.0 };
        (self.y + jump + r * self.slope()).min(1.0)
    }

    fn preimage(&self, u: f64) -> Preimage {
        let s = self.slope();
        let jump_lo = self.y + self.v * s;
        let jump_hi = jump_lo + self.x;
        if u < self.y || (self.v == 0.0 && u < jump_hi) {
            Preimage::Zero
        } else if self.x > 0.0 && u >= jump_lo && u < jump_hi {
            Preimage::Jump(self.v)
        } else if u >= 1.0 || s == 0.0 {
            Preimage::Regular(1.0)
        } else if u < jump_lo {
            Preimage::Regular((u - self.y) / s)
        } else {
            Preimage::Regular(((u - self.y - self.x) / s).min(1.0))
        }
    }

    /// `b⁻¹(u) = inf{r : b(r) > u}`, with `inf ∅ = 1`.
    pub fn inverse(&self, u: f64) -> f64 {
        match self.preimage(u) {
            Preimage::Zero => 0.0,
            Preimage::Jump(v) | Preimage::Regular(v) => v,
        }
    }
}

/// `B = f₁ ∘ f₂ ∘ … ∘ f_K`, factors listed in time order (`f₁` earliest).
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CompositeBridge {
    factors: Vec<DistinguishedBridge>,
}

/// Equivalence class of a point under `B⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Class {
    Zero,
    Own(usize),
    Jump(usize),
}

impl CompositeBridge {
    pub fn new(factors: Vec<DistinguishedBridge>) -> Self {
        Self { factors }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> &[DistinguishedBridge] {
        &self.factors
    }

    pub fn push(&mut self, b: DistinguishedBridge) {
        self.factors.push(b);
    }

    /// `B(r)`: the last factor acts first.
    pub fn eval(&self, r: f64) -> f64 {
        self.factors.iter().rev().fold(r, |acc, b| b.eval(acc))
    }

    /// `B⁻¹(u) = f_K⁻¹ ∘ … ∘ f₁⁻¹ (u)`.
    pub fn inverse(&self, u: f64) -> f64 {
        self.factors.iter().fold(u, |acc, b| b.inverse(acc))
    }

    fn class_of(&self, own: Class, u: f64) -> Class {
        let mut class = own;
        let mut value = u;
        for (k, b) in self.factors.iter().enumerate() {
            if class == Class::Zero {
                break;
            }
            match b.preimage(value) {
                Preimage::Zero => class = Class::Zero,
                Preimage::Jump(v) => {
                    class = Class::Jump(k);
                    value = v;
                }
                Preimage::Regular(r) => value = r,
            }
        }
        class
    }

    /// Partition of `{0,…,n}` induced by `U₀ = 0` and i.i.d. uniforms
    /// `U₁, …, Uₙ`.
    pub fn partition_from_uniforms(&self, us: &[f64]) -> DistinguishedPartition {
        let mut labels = Vec::with_capacity(us.len() + 1);
        labels.push(Class::Zero);
        for (i, &u) in us.iter().enumerate() {
            labels.push(self.class_of(Class::Own(i + 1), u));
        }
        DistinguishedPartition::from_labels(&labels).expect("labels cover the ground set")
    }
}

impl From<DistinguishedBridge> for CompositeBridge {
    fn from(b: DistinguishedBridge) -> Self {
        Self::new(vec![b])
    }
}

pub fn partition_from_bridge<R: Rng + ?Sized>(
    bridge: &CompositeBridge,
    n: usize,
    rng: &mut R,
) -> DistinguishedPartition {
    let us: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    bridge.partition_from_uniforms(&us)
}

/// Bridge flow `B_{0,t}` driven by finite intensities: atoms arrive at rate
/// `(ν₀ + ν₁)([0,1])`; a `ν₀` atom of size `y` contributes `b_{y,0}`, a `ν₁`
/// atom of size `x` contributes `b_{0,x}` with a fresh uniform jump location.
pub fn simulate_flow<R: Rng + ?Sized>(
    nu0: &BoundedMeasure,
    nu1: &BoundedMeasure,
    t: f64,
    rng: &mut R,
) -> Result<CompositeBridge> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t = {t} must be finite and >= 0")));
    }
    let (m0, m1) = (nu0.total_mass(), nu1.total_mass());
    let total = m0 + m1;
    let mut bridge = CompositeBridge::identity();
    if total == 0.0 {
        return Ok(bridge);
    }
    let mut time = exponential(rng, total);
    while time <= t {
        let b = if rng.random::<f64>() * total < m0 {
            DistinguishedBridge::new(nu0.sample(rng)?, 0.0, 0.0)?
        } else {
            let x = nu1.sample(rng)?;
            DistinguishedBridge::random(0.0, x, rng)?
        };
        bridge.push(b);
        time += exponential(rng, total);
    }
    Ok(bridge)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposeReport {
    pub n: usize,
    pub replicas: usize,
    /// Law of the partition read off `b₁ ∘ b₂`.
    pub composite: BTreeMap<DistinguishedPartition, f64>,
    /// Law of `Coag(π, π′)`, `π` from `b₁`, `π′` from `b₂` fed with the
    /// reused uniforms `b₁⁻¹(Uᵢ)`.
    pub coagulated: BTreeMap<DistinguishedPartition, f64>,
    /// `Coag` of the `(y₁; x₁)` and `(y₂; x₂)` paint-box laws, by
    /// enumeration.
    pub exact: BTreeMap<DistinguishedPartition, f64>,
    pub tv_composite_coagulated: f64,
    pub tv_composite_exact: f64,
    pub tv_coagulated_exact: f64,
}

impl ComposeReport {
    pub fn max_distance(&self) -> f64 {
        self.tv_composite_coagulated.max(self.tv_composite_exact).max(self.tv_coagulated_exact)
    }
}

/// Largest ground set for which [`compose_check`] enumerates the exact law.
pub const COMPOSE_MAX_N: usize = 5;

fn mass_partition(y: f64, x: f64) -> Result<DistinguishedMassPartition> {
    let tail = if x > 0.0 { vec![x] } else { vec![] };
    DistinguishedMassPartition::new(y, tail)
}

/// Exact law of `Coag(π, π′)` with `π ~ (y₁; x₁)`-paint-box on `{0,…,n}` and
/// independent `π′ ~ (y₂; x₂)`-paint-box on the block indices of `π`.
pub fn exact_composed_law(b1: (f64, f64), b2: (f64, f64), n: usize) -> Result<BTreeMap<DistinguishedPartition, f64>> {
    let (s1, s2) = (mass_partition(b1.0, b1.1)?, mass_partition(b2.0, b2.1)?);
    let mut law = BTreeMap::new();
    let mut inner_cache: BTreeMap<usize, BTreeMap<DistinguishedPartition, f64>> = BTreeMap::new();
    for (pi, p) in exact_law(&s1, n) {
        let b = pi.non_distinguished_count();
        let inner = inner_cache.entry(b).or_insert_with(|| exact_law(&s2, b));
        for (pi2, q) in inner.iter() {
            *law.entry(pi.coag(pi2)?).or_insert(0.0) += p * q;
        }
    }
    Ok(law)
}

/// Monte-Carlo check that reading a partition off `b₁ ∘ b₂` coincides in law
/// with coagulating the partitions read off `b₁` and `b₂`. Bridges are
/// `b_{y,x}` with a fresh uniform jump location per replica.
pub fn compose_check(
    b1: (f64, f64),
    b2: (f64, f64),
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<ComposeReport> {
    if n > COMPOSE_MAX_N {
        return Err(invalid(format!("compose_check enumerates laws; n = {n} exceeds {COMPOSE_MAX_N}")));
    }
    if replicas == 0 {
        return Err(invalid("compose_check needs at least one replica"));
    }
    let exact = exact_composed_law(b1, b2, n)?;
    let pairs = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = family_stream(seed, 0, i as u64);
            let f1 = DistinguishedBridge::random(b1.0, b1.1, &mut rng)?;
            let f2 = DistinguishedBridge::random(b2.0, b2.1, &mut rng)?;
            let composite = partition_from_bridge(&CompositeBridge::new(vec![f1, f2]), n, &mut rng);

            let mut rng = family_stream(seed, 1, i as u64);
            let g1 = DistinguishedBridge::random(b1.0, b1.1, &mut rng)?;
            let g2 = DistinguishedBridge::random(b2.0, b2.1, &mut rng)?;
            let us: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let first = CompositeBridge::from(g1);
            let pi = first.partition_from_uniforms(&us);
            // One reused uniform per non-distinguished block of π: the
            // common value of g₁⁻¹ on that block.
            let reused: Vec<f64> = pi.blocks()[1..].iter().map(|blk| g1.inverse(us[blk[0] - 1])).collect();
            let pi2 = CompositeBridge::from(g2).partition_from_uniforms(&reused);
            Ok((composite, pi.coag(&pi2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (a, b): (EmpiricalLaw<_>, EmpiricalLaw<_>) = {
        let mut a = EmpiricalLaw::new();
        let mut b = EmpiricalLaw::new();
        for (x, y) in pairs {
            a.add(x);
            b.add(y);
        }
        (a, b)
    };
    let (composite, coagulated) = (a.probabilities(), b.probabilities());
    Ok(ComposeReport {
        n,
        replicas,
        tv_composite_coagulated: total_variation(&composite, &coagulated),
        tv_composite_exact: total_variation(&composite, &exact),
        tv_coagulated_exact: total_variation(&coagulated, &exact),
        composite,
        coagulated,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn b(y: f64, x: f64, v: f64) -> DistinguishedBridge {
        DistinguishedBridge::new(y, x, v).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let id = DistinguishedBridge::identity();
        for u in [0.0, 0.25, 0.9, 1.0] {
            assert_eq!(id.inverse(u), u);
            assert_eq!(id.eval(u), u);
        }
        let lin = b(0.5, 0.0, 0.3);
        assert_eq!(lin.eval(0.0), 0.5);
        assert!((lin.inverse(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(lin.inverse(0.3), 0.0);
        let jump = b(0.0, 0.5, 0.4);
        for u in [0.2, 0.3, 0.5, 0.6999] {
            assert_eq!(jump.inverse(u), 0.4);
        }
        assert!(jump.inverse(0.19) < 0.4);
        assert!(jump.inverse(0.71) > 0.4);
        assert_eq!(jump.inverse(1.0), 1.0);
        assert!(DistinguishedBridge::new(0.6, 0.5, 0.1).is_err());
    }

    #[test]
    fn monotone_and_fixes_endpoints() {
        let mut rng = stream(5, 0);
        for _ in 0..200 {
            let y: f64 = rng.random::<f64>() * 0.6;
            let x: f64 = rng.random::<f64>() * (1.0 - y);
            let f = DistinguishedBridge::random(y, x, &mut rng).unwrap();
            let g = DistinguishedBridge::random(0.1, 0.3, &mut rng).unwrap();
            let c = CompositeBridge::new(vec![f, g]);
            assert_eq!(c.eval(1.0), 1.0);
            let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
            for w in grid.windows(2) {
                assert!(c.eval(w[0]) <= c.eval(w[1]));
                assert!(c.inverse(w[0]) <= c.inverse(w[1]));
            }
        }
    }

    #[test]
    fn degenerate_partitions() {
        let mut rng = stream(6, 0);
        assert_eq!(
            partition_from_bridge(&CompositeBridge::identity(), 6, &mut rng),
            DistinguishedPartition::singletons(6)
        );
        let all = CompositeBridge::from(b(1.0, 0.0, 0.5));
        assert!(partition_from_bridge(&all, 6, &mut rng).is_whole());
        let merge = CompositeBridge::from(b(0.0, 1.0, 0.5));
        assert_eq!(partition_from_bridge(&merge, 3, &mut rng).to_string(), "0|1,2,3");
    }

    #[test]
    fn composite_inverse_order() {
        let (f, g) = (b(0.2, 0.0, 0.0), b(0.0, 0.5, 0.4));
        let c = CompositeBridge::new(vec![f, g]);
        for u in [0.1, 0.3, 0.55, 0.9] {
            assert_eq!(c.inverse(u), g.inverse(f.inverse(u)));
        }
    }

    #[test]
    fn exact_composition_is_a_law() {
        let law = exact_composed_law((0.0, 0.5), (0.5, 0.0), 3).unwrap();
        assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let law = exact_composed_law((1.0, 0.0), (0.2, 0.3), 3).unwrap();
        assert_eq!(law.len(), 1);
        assert!(law.keys().next().unwrap().is_whole());
    }

    #[test]
    fn compose_check_degenerate() {
        let r = compose_check((0.0, 0.0), (0.0, 0.0), 3, 100, 1).unwrap();
        assert_eq!(r.max_distance(), 0.0);
        let r = compose_check((1.0, 0.0), (0.3, 0.4), 3, 100, 1).unwrap();
        assert_eq!(r.max_distance(), 0.0);
        assert!(compose_check((0.0, 0.0), (0.0, 0.0), 6, 10, 1).is_err());
    }

    #[test]
    fn flow_without_time_is_identity() {
        let mut rng = stream(1, 0);
        let nu: BoundedMeasure = "dirac:0.5:4".parse().unwrap();
        assert!(simulate_flow(&nu, &nu, 0.0, &mut rng).unwrap().factors().is_empty());
        let nu0: BoundedMeasure = "dirac:1:1".parse().unwrap();
        let flow = simulate_flow(&nu0, &BoundedMeasure::zero(), 50.0, &mut rng).unwrap();
        assert!(partition_from_bridge(&flow, 5, &mut rng).is_whole());
    }
}
