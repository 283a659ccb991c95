//! The generalized Fleming–Viot process with immigration for finite jump
//! intensities, its moment functionals `G_f(ρ) = ⟨f, ρ^{⊗p}⟩` and
//! generator.
//!
//! States are probability measures on `[0,1]` of the form
//! `w₀δ₀ + Σ wᵢδ_{aᵢ} + ℓ·Lebesgue`. Integrals against `ρ` and `ρ^{⊗p}` use
//! a point cloud: the atoms with their weights plus a Gauss–Legendre rule
//! scaled by `ℓ` for the Lebesgue part. This is exact when `f` is a
//! polynomial of degree below twice the node count in each coordinate.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::BoundedMeasure;
use crate::quadrature::gauss_legendre_unit;
use crate::rng::{exponential, stream};
use crate::stats::Estimate;

/// Atoms lighter than this are folded back into the Lebesgue part.
pub const COMPACTION_THRESHOLD: f64 = 1e-15;
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Gauss–Legendre nodes standing in for the Lebesgue part.
pub const LEBESGUE_NODES: usize = 12;
/// Largest `p` for `G_f` and its generator.
pub const MAX_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicProbabilityMeasure {
    pub w0: f64,
    /// `(location, weight)` with locations in `(0,1)`.
    pub atoms: Vec<(f64, f64)>,
    pub lebesgue: f64,
}

impl AtomicProbabilityMeasure {
    pub fn new(w0: f64, atoms: Vec<(f64, f64)>, lebesgue: f64) -> Result<Self> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !ok(w0) || !ok(lebesgue) || atoms.iter().any(|&(a, w)| !ok(w) || !(a > 0.0 && a < 1.0)) {
            return Err(invalid("weights must be nonnegative and atom locations inside (0,1)"));
        }
        let mut locs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        locs.sort_by(f64::total_cmp);
        if locs.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("atom locations must be distinct"));
        }
        let z = Self { w0, atoms, lebesgue };
        if (z.total_mass() - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("total mass {} is not 1", z.total_mass())));
        }
        Ok(z)
    }

    pub fn lebesgue() -> Self {
        Self { w0: 0.0, atoms: Vec::new(), lebesgue: 1.0 }
    }

    pub fn dirac_at_zero() -> Self {
        Self { w0: 1.0, atoms: Vec::new(), lebesgue: 0.0 }
    }

    pub fn total_mass(&self) -> f64 {
        self.w0 + self.atoms.iter().map(|a| a.1).sum::<f64>() + self.lebesgue
    }

    /// `∫ x ρ(dx)`.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(a, w)| a * w).sum::<f64>() + 0.5 * self.lebesgue
    }

    /// Draws a location from `ρ`. A draw from the Lebesgue part is a fresh
    /// uniform, almost surely distinct from every atom.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u = rng.random::<f64>() * self.total_mass();
        if u < self.w0 {
            return 0.0;
        }
        u -= self.w0;
        for &(a, w) in &self.atoms {
            if u < w {
                return a;
            }
            u -= w;
        }
        // Locations must stay inside (0,1).
        loop {
            let a: f64 = rng.random();
            if a > 0.0 {
                return a;
            }
        }
    }

    fn scale(&mut self, factor: f64) {
        self.w0 *= factor;
        self.lebesgue *= factor;
        for a in &mut self.atoms {
            a.1 *= factor;
        }
    }

    fn compact(&mut self) {
        let mut dropped = 0.0;
        self.atoms.retain(|&(_, w)| {
            let keep = w >= COMPACTION_THRESHOLD;
            if !keep {
                dropped += w;
            }
            keep
        });
        self.lebesgue += dropped;
    }

    /// `(1−x)ρ + xδ_a`.
    pub fn reproduce(&self, x: f64, parent: f64) -> Self {
        let mut z = self.clone();
        z.scale(1.0 - x);
        if parent == 0.0 {
            z.w0 += x;
        } else if let Some(atom) = z.atoms.iter_mut().find(|a| a.0 == parent) {
            atom.1 += x;
        } else {
            z.atoms.push((parent, x));
        }
        z.compact();
        z
    }

    /// `(1−y)ρ + yδ₀`.
    pub fn immigrate(&self, y: f64) -> Self {
        let mut z = self.clone();
        z.scale(1.0 - y);
        z.w0 += y;
        z.compact();
        z
    }

    /// Weighted points representing `ρ`: `(0, w₀)`, the atoms, and
    /// `nodes` Gauss–Legendre points carrying the Lebesgue part.
    pub fn point_cloud(&self, nodes: usize) -> Vec<(f64, f64)> {
        let mut cloud = Vec::with_capacity(self.atoms.len() + nodes + 1);
        if self.w0 > 0.0 {
            cloud.push((0.0, self.w0));
        }
        cloud.extend(self.atoms.iter().copied().filter(|a| a.1 > 0.0));
        if self.lebesgue > 0.0 {
            let (x, w) = gauss_legendre_unit(nodes);
            cloud.extend(x.into_iter().zip(w).map(|(x, w)| (x, w * self.lebesgue)));
        }
        cloud
    }
}

impl fmt::Display for AtomicProbabilityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·δ0 + {}·Leb", self.w0, self.lebesgue)?;
        for (a, w) in &self.atoms {
            write!(f, " + {w}·δ{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GfviEvent {
    /// A `ν₁` atom: a fraction `size` of the population is replaced by
    /// offspring of one parent at `parent`.
    Repro {
        size: f64,
        #[serde(rename = "parent_loc")]
        parent: f64,
    },
    /// A `ν₀` atom: a fraction `size` is replaced by immigrants at 0.
    Immig { size: f64 },
}

pub fn gfvi_step(z: &AtomicProbabilityMeasure, event: &GfviEvent) -> AtomicProbabilityMeasure {
    match *event {
        GfviEvent::Repro { size, parent } => z.reproduce(size, parent),
        GfviEvent::Immig { size } => z.immigrate(size),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("t = {t} must be finite and >= 0")))
    }
}

/// Runs the process on `[0, t]`, calling `on_event(time, event, state)` with
/// the state right after each event, and returns `Z_t`.
pub fn run_gfvi<R, F>(
    nu0: &BoundedMeasure,
    nu1: &BoundedMeasure,
    z0: &AtomicProbabilityMeasure,
    t: f64,
    rng: &mut R,
    mut on_event: F,
) -> Result<AtomicProbabilityMeasure>
where
    R: Rng + ?Sized,
    F: FnMut(f64, &GfviEvent, &AtomicProbabilityMeasure),
{
    check_time(t)?;
    let (m0, m1) = (nu0.total_mass(), nu1.total_mass());
    let total = m0 + m1;
    let mut z = z0.clone();
    if total == 0.0 {
        return Ok(z);
    }
    let mut time = exponential(rng, total);
    while time <= t {
        let event = if rng.random::<f64>() * total < m0 {
            GfviEvent::Immig { size: nu0.sample(rng)? }
        } else {
            let size = nu1.sample(rng)?;
            GfviEvent::Repro { size, parent: z.sample_location(rng) }
        };
        z = gfvi_step(&z, &event);
        on_event(time, &event, &z);
        time += exponential(rng, total);
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfviEventRecord {
    pub t: f64,
    #[serde(flatten)]
    pub event: GfviEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfviSample {
    pub t: f64,
    #[serde(flatten)]
    pub state: AtomicProbabilityMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfviTrajectory {
    pub events: Vec<GfviEventRecord>,
    pub states: Vec<GfviSample>,
}

/// Simulates `Z` on `[0, t]` and records every event plus the state at each
/// requested sample time (sorted, within `[0, t]`).
pub fn simulate_gfvi<R: Rng + ?Sized>(
    nu0: &BoundedMeasure,
    nu1: &BoundedMeasure,
    z0: &AtomicProbabilityMeasure,
    t: f64,
    sample_times: &[f64],
    rng: &mut R,
) -> Result<GfviTrajectory> {
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times.iter().any(|&s| !(0.0..=t).contains(&s)) {
        return Err(invalid("sample times must be sorted and lie in [0, t]"));
    }
    let mut events = Vec::new();
    let mut states = Vec::with_capacity(sample_times.len());
    let mut pending = sample_times.iter().copied().peekable();
    let mut current = z0.clone();
    let end = run_gfvi(nu0, nu1, z0, t, rng, |time, event, z| {
        while let Some(&s) = pending.peek() {
            if s >= time {
                break;
            }
            states.push(GfviSample { t: s, state: current.clone() });
            pending.next();
        }
        events.push(GfviEventRecord { t: time, event: *event });
        current = z.clone();
    })?;
    for s in pending {
        states.push(GfviSample { t: s, state: end.clone() });
    }
    Ok(GfviTrajectory { events, states })
}

type Kernel = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A continuous test function `f : [0,1]^p → ℝ`.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    arity: usize,
    f: Arc<Kernel>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({}, p = {})", self.name, self.arity)
    }
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, arity: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if arity == 0 || arity > MAX_ARITY {
            return Err(invalid(format!("test functions take 1..={MAX_ARITY} arguments, got {arity}")));
        }
        Ok(Self { name: name.into(), arity, f: Arc::new(f) })
    }

    /// `f ≡ 1`.
    pub fn one(p: usize) -> Result<Self> {
        Self::new("one", p, |_| 1.0)
    }

    /// `f(x) = x₁`.
    pub fn first(p: usize) -> Result<Self> {
        Self::new("x1", p, |x| x[0])
    }

    /// `f(x) = x₁ ⋯ x_p`.
    pub fn product(p: usize) -> Result<Self> {
        Self::new("product", p, |x| x.iter().product())
    }

    /// `f(x) = x₁ + … + x_p`.
    pub fn sum(p: usize) -> Result<Self> {
        Self::new("sum", p, |x| x.iter().sum())
    }

    /// One of `one`, `x1`, `product`, `sum`, with arity `p`.
    pub fn by_name(name: &str, p: usize) -> Result<Self> {
        match name {
            "one" => Self::one(p),
            "x1" => Self::first(p),
            "product" => Self::product(p),
            "sum" => Self::sum(p),
            _ => Err(Error::Parse(format!("unknown test function {name:?}; expected one, x1, product or sum"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `name` or `name:p`, arity defaulting to 1.
    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = match s.split_once(':') {
            Some((n, p)) => (n, p.parse().map_err(|_| Error::Parse(format!("bad arity in {s:?}")))?),
            None => (s, 1),
        };
        Self::by_name(name, p)
    }
}

/// `Σ_{i₁…i_p} w_{i₁}⋯w_{i_p} f(a_{i₁},…,a_{i_p})` over a point cloud.
fn tensor_sum(f: &TestFunction, cloud: &[(f64, f64)]) -> f64 {
    let p = f.arity();
    let s = cloud.len();
    if s == 0 {
        return 0.0;
    }
    let mut idx = vec![0usize; p];
    let mut x = vec![0.0; p];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            x[j] = cloud[i].0;
            w *= cloud[i].1;
        }
        total += w * f.eval(&x);
        let mut pos = 0;
        loop {
            if pos == p {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < s {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `G_f(ρ) = ⟨f, ρ^{⊗p}⟩`.
pub fn moment_functional(f: &TestFunction, rho: &AtomicProbabilityMeasure) -> f64 {
    tensor_sum(f, &rho.point_cloud(LEBESGUE_NODES))
}

/// `∫ρ(da) ⟨f, ρ^{⊗Sᶜ} ⊗ δ_a^{⊗S}⟩` over a point cloud, where `S` is the
/// coordinate set `mask`. With `tie = Some(v)` the coordinates in `S` are
/// pinned to `v` instead.
fn tied_sum(f: &TestFunction, cloud: &[(f64, f64)], mask: u32, tie: Option<f64>) -> f64 {
    let p = f.arity();
    let free: Vec<usize> = (0..p).filter(|j| mask & (1 << j) == 0).collect();
    let shared = mask != 0 && tie.is_none();
    let vars = free.len() + usize::from(shared);
    let s = cloud.len();
    if s == 0 && vars > 0 {
        return 0.0;
    }
    let mut idx = vec![0usize; vars];
    let mut x = vec![tie.unwrap_or(0.0); p];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (&j, &i) in free.iter().zip(&idx) {
            x[j] = cloud[i].0;
            w *= cloud[i].1;
        }
        if shared {
            let (a, wa) = cloud[idx[vars - 1]];
            w *= wa;
            for j in (0..p).filter(|j| mask & (1 << j) != 0) {
                x[j] = a;
            }
        }
        total += w * f.eval(&x);
        let mut pos = 0;
        loop {
            if pos == vars {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < s {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `ℒG_f(ρ) = ∫ν₁(dx)∫ρ(da)[G_f((1−x)ρ + xδ_a) − G_f(ρ)]
///          + ∫ν₀(dy)[G_f((1−y)ρ + yδ₀) − G_f(ρ)]`.
///
/// `G_f((1−x)ρ + xδ_a)` expands over the coordinate sets `S` sent to `δ_a`
/// with coefficient `x^{|S|}(1−x)^{p−|S|}`, so only the moments
/// `∫x^j(1−x)^{p−j}ν(dx)` are needed.
pub fn gfvi_generator_apply(
    f: &TestFunction,
    rho: &AtomicProbabilityMeasure,
    nu0: &BoundedMeasure,
    nu1: &BoundedMeasure,
) -> Result<f64> {
    if nu0.mass_at_zero() > 0.0 || nu1.mass_at_zero() > 0.0 {
        return Err(invalid("jump intensities must not charge 0"));
    }
    let p = f.arity() as u32;
    let coefficients = |nu: &BoundedMeasure| -> Result<Vec<f64>> {
        (0..=p).map(|j| nu.moment(j, p - j)).collect()
    };
    let (c0, c1) = (coefficients(nu0)?, coefficients(nu1)?);
    let cloud = rho.point_cloud(LEBESGUE_NODES);
    let base = tensor_sum(f, &cloud);
    let mut total = -(nu0.total_mass() + nu1.total_mass()) * base;
    for mask in 0u32..(1 << p) {
        let j = mask.count_ones() as usize;
        if c1[j] != 0.0 {
            total += c1[j] * if mask == 0 { base } else { tied_sum(f, &cloud, mask, None) };
        }
        if c0[j] != 0.0 {
            total += c0[j] * if mask == 0 { base } else { tied_sum(f, &cloud, mask, Some(0.0)) };
        }
    }
    Ok(total)
}

/// Monte-Carlo estimate of `E[G_f(Z_t)] − G_f(Z₀) − E[∫₀ᵗ ℒG_f(Z_s) ds]`.
pub fn gfvi_martingale_residual(
    nu0: &BoundedMeasure,
    nu1: &BoundedMeasure,
    f: &TestFunction,
    z0: &AtomicProbabilityMeasure,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<Estimate> {
    check_time(t)?;
    let g0 = moment_functional(f, z0);
    let l0 = gfvi_generator_apply(f, z0, nu0, nu1)?;
    let samples = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let mut last_time = 0.0;
            let mut last_gen = l0;
            let mut compensator = 0.0;
            let mut failure = None;
            let end = run_gfvi(nu0, nu1, z0, t, &mut rng, |time, _, z| {
                compensator += last_gen * (time - last_time);
                last_time = time;
                match gfvi_generator_apply(f, z, nu0, nu1) {
                    Ok(v) => last_gen = v,
                    Err(e) => failure = Some(e),
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            compensator += last_gen * (t - last_time);
            Ok(moment_functional(f, &end) - g0 - compensator)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&samples))
}
