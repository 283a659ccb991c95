//! Exact simulation of restrictions `Π⁰|[n]` of distinguished coalescents.
//!
//! Three constructions are provided:
//!
//! * [`simulate_m_coalescent`]: a Gillespie chain on the aggregated rates of
//!   an M-coalescent. From a state with `b` non-distinguished blocks a
//!   given `k`-subset merges into one block at rate `λ_{b,k}` and merges into
//!   the distinguished block at rate `r_{b,k}`. Since these depend on the
//!   subset only through `k`, the chain first picks `(kind, k)` with weight
//!   `C(b,k)·rate` and then a uniform `k`-subset.
//! * [`simulate_poissonian`]: a Poisson stream of paint-box coagulations for
//!   a finite mixture `ν⁰ = Σ wᵢ δ_{sᵢ}`, plus optional Kingman parts `c₀`,
//!   `c₁`.
//! * [`simulate_simple_poissonian`]: coin flipping driven by the finite jump
//!   intensities `ν₀`, `ν₁` of an M-coalescent without atoms at zero.
//!
//! The last two must agree in law with the first; the test suite checks it.

use std::collections::HashMap;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::measures::MParams;
use crate::paintbox::{sample_paintbox, DistinguishedMassPartition};
use crate::partitions::{enumerate, DistinguishedPartition};
use crate::rng::{self, exponential};
use crate::stats::Estimate;

/// Largest number of non-distinguished blocks [`generator_apply`] will
/// enumerate subsets for.
pub const GENERATOR_MAX_BLOCKS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Time(f64),
    /// Run until the partition is one block, or until no jump is possible.
    Absorption,
}

impl Horizon {
    fn limit(self) -> f64 {
        match self {
            Horizon::Time(t) => t,
            Horizon::Absorption => f64::INFINITY,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Horizon::Time(t) if !(t >= 0.0) => Err(invalid(format!("horizon {t} must be >= 0"))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// The path reached the one-block partition.
    Absorbed,
    /// The horizon was reached, or the remaining total jump rate is zero.
    HorizonReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub partition: DistinguishedPartition,
}

/// Piecewise-constant path `t ↦ Π⁰|[n](t)`, one entry per effective jump.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalescentTrajectory {
    pub initial: DistinguishedPartition,
    pub events: Vec<Event>,
    pub terminal: Terminal,
}

impl CoalescentTrajectory {
    fn start(initial: DistinguishedPartition) -> Self {
        Self {
            initial,
            events: Vec::new(),
            terminal: Terminal::HorizonReached,
        }
    }

    fn finish(mut self) -> Self {
        if self.current().is_whole() {
            self.terminal = Terminal::Absorbed;
        }
        self
    }

    fn push(&mut self, time: f64, partition: DistinguishedPartition) {
        self.events.push(Event { time, partition });
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    /// The last state of the path.
    pub fn current(&self) -> &DistinguishedPartition {
        self.events.last().map(|e| &e.partition).unwrap_or(&self.initial)
    }

    /// State at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> &DistinguishedPartition {
        let i = self.events.partition_point(|e| e.time <= t);
        if i == 0 {
            &self.initial
        } else {
            &self.events[i - 1].partition
        }
    }

    /// `(time, number of blocks not containing 0)`, starting at time 0.
    pub fn block_count_path(&self) -> Vec<(f64, usize)> {
        std::iter::once((0.0, self.initial.non_distinguished_count()))
            .chain(self.events.iter().map(|e| (e.time, e.partition.non_distinguished_count())))
            .collect()
    }

    /// First time the partition is the whole set.
    pub fn fixation_time(&self) -> Option<f64> {
        if self.initial.is_whole() {
            return Some(0.0);
        }
        self.events.iter().find(|e| e.partition.is_whole()).map(|e| e.time)
    }

    /// `∫₀ᵗ g(Π(s)) ds` along the path.
    pub fn integrate_path<G: FnMut(&DistinguishedPartition) -> f64>(&self, t: f64, mut g: G) -> f64 {
        let mut total = 0.0;
        let mut from = 0.0;
        let mut state = &self.initial;
        for e in &self.events {
            if e.time >= t {
                break;
            }
            total += g(state) * (e.time - from);
            from = e.time;
            state = &e.partition;
        }
        total + g(state) * (t - from)
    }

    pub fn to_record(&self, seed: u64) -> TrajectoryRecord {
        TrajectoryRecord {
            n: self.n(),
            seed,
            initial: self.initial.to_string(),
            events: self
                .events
                .iter()
                .map(|e| EventRecord {
                    t: e.time,
                    partition: e.partition.to_string(),
                })
                .collect(),
            absorbed: self.terminal == Terminal::Absorbed,
        }
    }

    /// Block-count path as CSV with header `t,count`.
    pub fn block_count_csv(&self) -> String {
        let mut out = String::from("t,count\n");
        for (t, c) in self.block_count_path() {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub t: f64,
    pub partition: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub seed: u64,
    pub initial: String,
    pub events: Vec<EventRecord>,
    pub absorbed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    /// `k` non-distinguished blocks merge into one.
    Merge,
    /// `k` non-distinguished blocks merge into the distinguished block.
    JoinDistinguished,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpTerm {
    pub kind: JumpKind,
    pub k: usize,
    /// `C(b,k)` times the per-subset rate.
    pub weight: f64,
}

/// Aggregated jump terms from a state with `b` non-distinguished blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTerms {
    pub terms: Vec<JumpTerm>,
    pub total: f64,
}

/// `C(b,k)`, exact while it fits in the mantissa.
pub(crate) fn binomial(b: usize, k: usize) -> f64 {
    let ln = ln_binomial(b as u64, k as u64);
    if ln > 36.0 {
        return ln.exp();
    }
    let k = k.min(b - k);
    (0..k).fold(1.0, |c, i| c * (b - i) as f64 / (i + 1) as f64).round()
}

impl JumpTerms {
    pub fn new(params: &MParams, b: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for k in 2..=b {
            let rate = params.lambda_rate(b, k)?;
            if rate > 0.0 {
                terms.push(JumpTerm { kind: JumpKind::Merge, k, weight: binomial(b, k) * rate });
            }
        }
        for k in 1..=b {
            let rate = params.r_rate(b, k)?;
            if rate > 0.0 {
                terms.push(JumpTerm {
                    kind: JumpKind::JoinDistinguished,
                    k,
                    weight: binomial(b, k) * rate,
                });
            }
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if !total.is_finite() {
            return Err(Error::NonFiniteRate(format!("total jump rate T({b}) = {total}")));
        }
        Ok(Self { terms, total })
    }
}

/// Jump terms for every `b ≤ max_b`, shared across replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    by_blocks: Vec<JumpTerms>,
}

impl RateTable {
    pub fn new(params: &MParams, max_b: usize) -> Result<Self> {
        let by_blocks = (0..=max_b).map(|b| JumpTerms::new(params, b)).collect::<Result<_>>()?;
        Ok(Self { by_blocks })
    }

    pub fn max_blocks(&self) -> usize {
        self.by_blocks.len() - 1
    }

    pub fn terms(&self, b: usize) -> &JumpTerms {
        &self.by_blocks[b]
    }

    /// `T(b)`.
    pub fn total_rate(&self, b: usize) -> f64 {
        self.by_blocks[b].total
    }
}

/// Uniform `k`-subset of the block indices `1..=b`.
fn random_subset<R: Rng + ?Sized>(rng: &mut R, b: usize, k: usize) -> Vec<usize> {
    sample_indices(rng, b, k).into_iter().map(|i| i + 1).collect()
}

pub fn simulate_m_coalescent<R: Rng + ?Sized>(
    params: &MParams,
    start: &DistinguishedPartition,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CoalescentTrajectory> {
    let table = RateTable::new(params, start.non_distinguished_count())?;
    simulate_with_table(&table, start, horizon, rng)
}

/// [`simulate_m_coalescent`] with precomputed rates.
pub fn simulate_with_table<R: Rng + ?Sized>(
    table: &RateTable,
    start: &DistinguishedPartition,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CoalescentTrajectory> {
    horizon.validate()?;
    if start.non_distinguished_count() > table.max_blocks() {
        return Err(invalid("rate table is smaller than the start partition"));
    }
    let limit = horizon.limit();
    let mut traj = CoalescentTrajectory::start(start.clone());
    let mut state = start.clone();
    let mut t = 0.0;
    loop {
        let b = state.non_distinguished_count();
        let jumps = table.terms(b);
        if b == 0 || jumps.total == 0.0 {
            break;
        }
        t += exponential(rng, jumps.total);
        if t > limit {
            break;
        }
        let mut u = rng.random::<f64>() * jumps.total;
        let mut chosen = *jumps.terms.last().expect("positive total rate");
        for term in &jumps.terms {
            if u < term.weight {
                chosen = *term;
                break;
            }
            u -= term.weight;
        }
        let subset = random_subset(rng, b, chosen.k);
        state = match chosen.kind {
            JumpKind::Merge => state.merge_blocks(&subset),
            JumpKind::JoinDistinguished => state.join_distinguished(&subset),
        };
        traj.push(t, state.clone());
    }
    Ok(traj.finish())
}

/// `μ⁰ = c₀μ₀ᴷ + c₁μ₁ᴷ + Σ wᵢ ρ⁰_{sᵢ}` with finitely many paint-box atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralCoagulationSpec {
    pub c0: f64,
    pub c1: f64,
    pub mixture: Vec<(DistinguishedMassPartition, f64)>,
}

impl GeneralCoagulationSpec {
    pub fn new(c0: f64, c1: f64, mixture: Vec<(DistinguishedMassPartition, f64)>) -> Result<Self> {
        for (name, c) in [("c0", c0), ("c1", c1)] {
            if !(c.is_finite() && c >= 0.0) {
                return Err(invalid(format!("{name} = {c} must be finite and nonnegative")));
            }
        }
        if mixture.iter().any(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("mixture weights must be finite and positive"));
        }
        Ok(Self { c0, c1, mixture })
    }

    pub fn mixture_mass(&self) -> f64 {
        self.mixture.iter().map(|(_, w)| w).sum()
    }

    /// Whether some coagulation can still change a state with `b`
    /// non-distinguished blocks.
    fn can_change(&self, b: usize) -> bool {
        if b == 0 {
            return false;
        }
        self.c0 > 0.0
            || (b >= 2 && self.c1 > 0.0)
            || self
                .mixture
                .iter()
                .any(|(s, _)| s.s0() > 0.0 || (b >= 2 && !s.tail().is_empty()))
    }
}

pub fn simulate_poissonian<R: Rng + ?Sized>(
    spec: &GeneralCoagulationSpec,
    start: &DistinguishedPartition,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CoalescentTrajectory> {
    horizon.validate()?;
    let limit = horizon.limit();
    let w = spec.mixture_mass();
    let mut traj = CoalescentTrajectory::start(start.clone());
    let mut state = start.clone();
    let mut t = 0.0;
    loop {
        let b = state.non_distinguished_count();
        if !spec.can_change(b) {
            break;
        }
        let pair_rate = spec.c1 * (b * b.saturating_sub(1)) as f64 / 2.0;
        let join_rate = spec.c0 * b as f64;
        let total = pair_rate + join_rate + w;
        t += exponential(rng, total);
        if t > limit {
            break;
        }
        let u = rng.random::<f64>() * total;
        let next = if u < pair_rate {
            state.merge_blocks(&random_subset(rng, b, 2))
        } else if u < pair_rate + join_rate {
            state.join_distinguished(&random_subset(rng, b, 1))
        } else {
            let mut v = u - pair_rate - join_rate;
            let mut s = &spec.mixture.last().expect("mixture carries the remaining rate").0;
            for (si, wi) in &spec.mixture {
                if v < *wi {
                    s = si;
                    break;
                }
                v -= wi;
            }
            state.coag(&sample_paintbox(s, b, rng))?
        };
        if next != state {
            state = next;
            traj.push(t, state.clone());
        }
    }
    Ok(traj.finish())
}

fn heads<R: Rng + ?Sized>(rng: &mut R, b: usize, p: f64) -> Vec<usize> {
    (1..=b).filter(|_| rng.random::<f64>() < p).collect()
}

pub fn simulate_simple_poissonian<R: Rng + ?Sized>(
    params: &MParams,
    start: &DistinguishedPartition,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CoalescentTrajectory> {
    horizon.validate()?;
    if params.c0() > 0.0 || params.c1() > 0.0 {
        return Err(invalid(
            "the coin-flip construction needs Λ₀({0}) = Λ₁({0}) = 0",
        ));
    }
    let nu0 = params.nu0()?.finite("ν₀ = x⁻¹Λ₀(dx)")?;
    let nu1 = params.nu1()?.finite("ν₁ = x⁻²Λ₁(dx)")?;
    let (m0, m1) = (nu0.total_mass(), nu1.total_mass());
    let limit = horizon.limit();
    let mut traj = CoalescentTrajectory::start(start.clone());
    let mut state = start.clone();
    let mut t = 0.0;
    loop {
        let b = state.non_distinguished_count();
        let active1 = if b >= 2 { m1 } else { 0.0 };
        if b == 0 || m0 + active1 == 0.0 {
            break;
        }
        // ν₁ atoms keep arriving at rate m1 even when b < 2; they are silent
        // then, so only the effective rate is simulated.
        let total = m0 + active1;
        t += exponential(rng, total);
        if t > limit {
            break;
        }
        if rng.random::<f64>() * total < m0 {
            let x = nu0.sample(rng)?;
            let h = heads(rng, b, x);
            if !h.is_empty() {
                state = state.join_distinguished(&h);
                traj.push(t, state.clone());
            }
        } else {
            let x = nu1.sample(rng)?;
            let h = heads(rng, b, x);
            if h.len() >= 2 {
                state = state.merge_blocks(&h);
                traj.push(t, state.clone());
            }
        }
    }
    Ok(traj.finish())
}

/// `ℒ*F(π)`, summing over all subsets of the non-distinguished blocks.
pub fn generator_apply<F: Fn(&DistinguishedPartition) -> f64>(
    f: F,
    pi: &DistinguishedPartition,
    params: &MParams,
) -> Result<f64> {
    let b = pi.non_distinguished_count();
    if b > GENERATOR_MAX_BLOCKS {
        return Err(invalid(format!(
            "generator enumerates 2^b subsets; b = {b} exceeds the cap {GENERATOR_MAX_BLOCKS}"
        )));
    }
    let lambda: Vec<f64> = (0..=b)
        .map(|k| if k >= 2 { params.lambda_rate(b, k) } else { Ok(0.0) })
        .collect::<Result<_>>()?;
    let r: Vec<f64> = (0..=b)
        .map(|k| if k >= 1 { params.r_rate(b, k) } else { Ok(0.0) })
        .collect::<Result<_>>()?;
    let base = f(pi);
    let mut total = 0.0;
    for mask in 1u32..(1 << b) {
        let subset: Vec<usize> = (0..b).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
        let k = subset.len();
        if k >= 2 && lambda[k] != 0.0 {
            total += lambda[k] * (f(&pi.merge_blocks(&subset)) - base);
        }
        if r[k] != 0.0 {
            total += r[k] * (f(&pi.join_distinguished(&subset)) - base);
        }
    }
    Ok(total)
}

/// Monte-Carlo estimate of `E[F(Π(t))] − F(π) − E[∫₀ᵗ ℒ*F(Π(s)) ds]`, which
/// vanishes for the Markov chain `Π⁰|[n]`. Needs `n` within the enumeration
/// cap.
pub fn martingale_residual<F>(
    params: &MParams,
    start: &DistinguishedPartition,
    f: F,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<Estimate>
where
    F: Fn(&DistinguishedPartition) -> f64 + Sync,
{
    let generator: HashMap<DistinguishedPartition, f64> = enumerate(start.n())?
        .into_iter()
        .map(|p| generator_apply(&f, &p, params).map(|v| (p, v)))
        .collect::<Result<_>>()?;
    let table = RateTable::new(params, start.non_distinguished_count())?;
    let f0 = f(start);
    let samples = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            let traj = simulate_with_table(&table, start, Horizon::Time(t), &mut rng)?;
            let compensator = traj.integrate_path(t, |p| generator[p]);
            Ok(f(traj.current()) - f0 - compensator)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&samples))
}

/// Fixation times `ζ` of independent replicas from `start`, in replica
/// order.
pub fn fixation_times(
    params: &MParams,
    start: &DistinguishedPartition,
    replicas: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if params.lambda0.is_zero() {
        return Err(invalid("with Λ₀ = 0 the distinguished block never grows; ζ = ∞"));
    }
    let table = RateTable::new(params, start.non_distinguished_count())?;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            let traj = simulate_with_table(&table, start, Horizon::Absorption, &mut rng)?;
            traj.fixation_time()
                .ok_or_else(|| Error::NonFiniteRate("a replica froze before fixation".into()))
        })
        .collect()
}

/// Monte-Carlo fixation time `ζ` from `start`, run to absorption.
pub fn fixation_statistics(
    params: &MParams,
    start: &DistinguishedPartition,
    replicas: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(Estimate::from_samples(&fixation_times(params, start, replicas, seed)?))
}
