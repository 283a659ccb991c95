//! Finite measures on `[0,1]` and the M-coalescent rate integrals.
//!
//! A [`BoundedMeasure`] is a sum of tagged components. Rate integrals
//! `∫ x^p (1−x)^q Λ(dx)` are exact (Beta-function closed forms) for atoms,
//! Beta and uniform densities, and go through adaptive quadrature for
//! piecewise-constant densities. Inside rate integrands `0⁰ = 1`, so an atom
//! at zero contributes to `λ_{b,2}` and `r_{b,1}` only.
//!
//! Text grammar, components joined with `+`:
//!
//! ```text
//! dirac0:w            w·δ₀
//! dirac:x:w           w·δ_x, x ∈ (0,1]
//! beta:a:b:w          w·Beta(a,b) (normalized density times w)
//! uniform:w           w·Lebesgue on [0,1]
//! pwc:x0,h0,x1,...,xn density h_i on [x_i, x_{i+1})
//! ```
//!
//! `0` (or `zero`) is the zero measure.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Distribution;
use serde::Serialize;
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Tolerance for rate integrals that need quadrature.
pub const RATE_TOLERANCE: Tolerance = Tolerance::absolute(1e-10);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    DiracAtZero { weight: f64 },
    Dirac { location: f64, weight: f64 },
    Beta { a: f64, b: f64, weight: f64 },
    Uniform { weight: f64 },
    /// Density `heights[i] · x^x_power` on `[breaks[i], breaks[i+1])`. Only
    /// `x_power = 0` is reachable from the text grammar; other powers appear
    /// when converting between `Λ` and `ν`.
    Piecewise {
        breaks: Vec<f64>,
        heights: Vec<f64>,
        x_power: i32,
    },
}

fn ln_beta_ratio(a1: f64, b1: f64, a0: f64, b0: f64) -> f64 {
    (ln_beta(a1, b1) - ln_beta(a0, b0)).exp()
}

/// `∫_lo^hi x^power dx`, infinite when the integral diverges at 0.
fn power_integral(lo: f64, hi: f64, power: i32) -> f64 {
    if power == -1 {
        if lo == 0.0 {
            f64::INFINITY
        } else {
            (hi / lo).ln()
        }
    } else if power < -1 && lo == 0.0 {
        f64::INFINITY
    } else {
        let e = power + 1;
        (hi.powi(e) - lo.powi(e)) / e as f64
    }
}

impl Component {
    fn validate(&self) -> Result<()> {
        let weight_ok = |w: f64| w.is_finite() && w >= 0.0;
        let bad = |m: String| Err(Error::InvalidMeasure(m));
        match self {
            Component::DiracAtZero { weight } | Component::Uniform { weight } => {
                if !weight_ok(*weight) {
                    return bad(format!("weight {weight} must be finite and nonnegative"));
                }
            }
            Component::Dirac { location, weight } => {
                if !weight_ok(*weight) {
                    return bad(format!("weight {weight} must be finite and nonnegative"));
                }
                if !(*location > 0.0 && *location <= 1.0) {
                    return bad(format!("dirac location {location} must lie in (0,1]"));
                }
            }
            Component::Beta { a, b, weight } => {
                if !weight_ok(*weight) {
                    return bad(format!("weight {weight} must be finite and nonnegative"));
                }
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return bad(format!("beta parameters ({a}, {b}) must be positive"));
                }
            }
            Component::Piecewise { breaks, heights, x_power } => {
                if breaks.len() < 2 || heights.len() + 1 != breaks.len() {
                    return bad("piecewise density needs n+1 breakpoints and n heights".into());
                }
                if breaks[0] < 0.0 || breaks[breaks.len() - 1] > 1.0 {
                    return bad("piecewise breakpoints must lie in [0,1]".into());
                }
                if breaks.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("piecewise breakpoints must be strictly increasing".into());
                }
                if heights.iter().any(|h| !weight_ok(*h)) {
                    return bad("piecewise heights must be finite and nonnegative".into());
                }
                let _ = x_power;
            }
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        match self {
            Component::DiracAtZero { weight }
            | Component::Dirac { weight, .. }
            | Component::Beta { weight, .. }
            | Component::Uniform { weight } => *weight,
            Component::Piecewise { breaks, heights, x_power } => heights
                .iter()
                .enumerate()
                .filter(|(_, h)| **h > 0.0)
                .map(|(i, h)| h * power_integral(breaks[i], breaks[i + 1], *x_power))
                .sum(),
        }
    }

    fn is_null(&self) -> bool {
        self.mass() == 0.0
    }

    /// Density at `x ∈ (0,1)` for absolutely continuous components, `None`
    /// for atoms.
    fn density(&self, x: f64) -> Option<f64> {
        match self {
            Component::DiracAtZero { .. } | Component::Dirac { .. } => None,
            Component::Uniform { weight } => Some(*weight),
            // The endpoints carry no mass; skipping them keeps singular
            // densities finite.
            Component::Beta { .. } if x <= 0.0 || x >= 1.0 => Some(0.0),
            Component::Beta { a, b, weight } => Some(
                weight * ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(*a, *b)).exp(),
            ),
            Component::Piecewise { breaks, heights, x_power } => {
                let i = breaks.partition_point(|&t| t <= x);
                if i == 0 || i == breaks.len() {
                    Some(0.0)
                } else {
                    Some(heights[i - 1] * x.powi(*x_power))
                }
            }
        }
    }

    /// Integration ranges of the density (pieces of a piecewise component).
    fn support(&self) -> Vec<(f64, f64)> {
        match self {
            Component::Piecewise { breaks, heights, .. } => (0..heights.len())
                .filter(|&i| heights[i] > 0.0)
                .map(|i| (breaks[i], breaks[i + 1]))
                .collect(),
            _ => vec![(0.0, 1.0)],
        }
    }

    fn integrate_density<G: Fn(f64) -> f64>(&self, g: &G, tol: Tolerance) -> Result<f64> {
        if let Component::Beta { a, b, weight } = *self {
            return integrate_beta(g, a, b, weight, tol);
        }
        let pieces = self.support();
        let per_piece = Tolerance {
            abs: tol.abs / pieces.len().max(1) as f64,
            ..tol
        };
        let mut total = 0.0;
        for (lo, hi) in pieces {
            let r = integrate(|x| g(x) * self.density(x).unwrap_or(0.0), lo, hi, per_piece)?;
            total += r.value;
        }
        Ok(total)
    }

    /// `∫ g dμ` for this component alone; atoms are evaluated pointwise
    /// (`g(0)` for the atom at zero).
    fn integrate<G: Fn(f64) -> f64>(&self, g: &G, tol: Tolerance) -> Result<f64> {
        match self {
            Component::DiracAtZero { weight } => Ok(weight * g(0.0)),
            Component::Dirac { location, weight } => Ok(weight * g(*location)),
            _ => self.integrate_density(g, tol),
        }
    }

    /// Closed-form `∫ x^p (1−x)^q`, or `None` when the component needs
    /// quadrature.
    fn moment_closed_form(&self, p: u32, q: u32) -> Option<f64> {
        let (pf, qf) = (p as f64, q as f64);
        match self {
            Component::DiracAtZero { weight } => Some(if p == 0 { *weight } else { 0.0 }),
            Component::Dirac { location, weight } => {
                Some(weight * location.powi(p as i32) * (1.0 - location).powi(q as i32))
            }
            Component::Beta { a, b, weight } => Some(weight * ln_beta_ratio(a + pf, b + qf, *a, *b)),
            Component::Uniform { weight } => Some(weight * ln_beta(1.0 + pf, 1.0 + qf).exp()),
            Component::Piecewise { breaks, heights, x_power } => {
                let e = p as i32 + x_power;
                if e < 0 {
                    return None;
                }
                let total = (0..heights.len())
                    .filter(|&i| heights[i] > 0.0)
                    .map(|i| heights[i] * beta_piece(breaks[i], breaks[i + 1], e as f64 + 1.0, qf + 1.0))
                    .sum();
                Some(total)
            }
        }
    }
}

/// `∫_lo^hi x^{a−1} (1−x)^{b−1} dx` through the regularized incomplete Beta
/// function, differencing whichever tail keeps both terms small.
fn beta_piece(lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    let full = ln_beta(a, b).exp();
    let (i_lo, i_hi) = (beta_reg(a, b, lo), beta_reg(a, b, hi));
    let diff = if i_hi <= 0.5 {
        i_hi - i_lo
    } else {
        beta_reg(b, a, 1.0 - lo) - beta_reg(b, a, 1.0 - hi)
    };
    full * diff.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BoundedMeasure {
    components: Vec<Component>,
}

impl BoundedMeasure {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        let m = Self {
            components: components.into_iter().filter(|c| !c.is_null()).collect(),
        };
        if !m.total_mass().is_finite() {
            return Err(Error::InvalidMeasure("total mass is infinite".into()));
        }
        Ok(m)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac_at_zero(weight: f64) -> Result<Self> {
        Self::new(vec![Component::DiracAtZero { weight }])
    }

    pub fn dirac(location: f64, weight: f64) -> Result<Self> {
        Self::new(vec![Component::Dirac { location, weight }])
    }

    pub fn beta(a: f64, b: f64, weight: f64) -> Result<Self> {
        Self::new(vec![Component::Beta { a, b, weight }])
    }

    pub fn uniform(weight: f64) -> Result<Self> {
        Self::new(vec![Component::Uniform { weight }])
    }

    pub fn piecewise(breaks: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        Self::new(vec![Component::Piecewise {
            breaks,
            heights,
            x_power: 0,
        }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn plus(mut self, other: &BoundedMeasure) -> Self {
        self.components.extend(other.components.iter().cloned());
        self
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(Component::mass).sum()
    }

    /// `μ({0})`.
    pub fn mass_at_zero(&self) -> f64 {
        self.components
            .iter()
            .map(|c| match c {
                Component::DiracAtZero { weight } => *weight,
                _ => 0.0,
            })
            .sum()
    }

    /// `μ({1})`.
    pub fn mass_at_one(&self) -> f64 {
        self.components
            .iter()
            .map(|c| match c {
                Component::Dirac { location, weight } if *location == 1.0 => *weight,
                _ => 0.0,
            })
            .sum()
    }

    /// `∫ g dμ`. Atoms are evaluated pointwise, so `g(0)` must be the
    /// intended value at zero; densities use adaptive quadrature on the open
    /// interval.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, tol: Tolerance) -> Result<f64> {
        self.components.iter().map(|c| c.integrate(&g, tol)).sum()
    }

    /// `∫ x^p (1−x)^q μ(dx)` with `0⁰ = 1`; exact where a closed form
    /// exists.
    pub fn moment(&self, p: u32, q: u32) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.components {
            total += match c.moment_closed_form(p, q) {
                Some(v) => v,
                None => c.integrate(&|x| monomial(x, p, q), RATE_TOLERANCE)?,
            };
        }
        Ok(total)
    }

    /// Same integral with every density component sent through quadrature.
    pub fn moment_by_quadrature(&self, p: u32, q: u32) -> Result<f64> {
        self.integrate(|x| monomial(x, p, q), RATE_TOLERANCE)
    }

    /// The density transform `x^{-power} μ(dx)` (`ν₀` from `Λ₀` with power
    /// 1, `ν₁` from `Λ₁` with power 2).
    pub fn nu_measure(&self, power: u32) -> Result<JumpIntensity> {
        if self.mass_at_zero() > 0.0 {
            return Err(Error::InvalidMeasure(
                "the density transform is singular for a measure charging 0".into(),
            ));
        }
        let p = power as f64;
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let t = match c {
                Component::DiracAtZero { .. } => unreachable!("checked above"),
                Component::Dirac { location, weight } => Component::Dirac {
                    location: *location,
                    weight: weight * location.powi(-(power as i32)),
                },
                Component::Beta { a, b, weight } => {
                    if a - p <= 0.0 {
                        return Ok(JumpIntensity::InfiniteMass);
                    }
                    Component::Beta {
                        a: a - p,
                        b: *b,
                        weight: weight * ln_beta_ratio(a - p, *b, *a, *b),
                    }
                }
                Component::Uniform { weight } => {
                    if power == 0 {
                        Component::Uniform { weight: *weight }
                    } else {
                        return Ok(JumpIntensity::InfiniteMass);
                    }
                }
                Component::Piecewise { breaks, heights, x_power } => Component::Piecewise {
                    breaks: breaks.clone(),
                    heights: heights.clone(),
                    x_power: x_power - power as i32,
                },
            };
            if !t.mass().is_finite() {
                return Ok(JumpIntensity::InfiniteMass);
            }
            out.push(t);
        }
        Ok(JumpIntensity::Finite(Self::new(out)?))
    }

    /// Inverse of [`nu_measure`](Self::nu_measure): `x^power ν(dx)`.
    pub fn lambda_from_nu(&self, power: u32) -> Result<Self> {
        let p = power as f64;
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            out.push(match c {
                Component::DiracAtZero { .. } => {
                    return Err(Error::InvalidMeasure(
                        "a jump intensity must not charge 0".into(),
                    ))
                }
                Component::Dirac { location, weight } => Component::Dirac {
                    location: *location,
                    weight: weight * location.powi(power as i32),
                },
                Component::Beta { a, b, weight } => Component::Beta {
                    a: a + p,
                    b: *b,
                    weight: weight * ln_beta_ratio(a + p, *b, *a, *b),
                },
                Component::Uniform { weight } => Component::Beta {
                    a: 1.0 + p,
                    b: 1.0,
                    weight: weight / (1.0 + p),
                },
                Component::Piecewise { breaks, heights, x_power } => Component::Piecewise {
                    breaks: breaks.clone(),
                    heights: heights.clone(),
                    x_power: x_power + power as i32,
                },
            });
        }
        Self::new(out)
    }

    /// Draws from `μ / μ([0,1])`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let total = self.total_mass();
        if !(total > 0.0) {
            return Err(invalid("cannot sample from the zero measure"));
        }
        let mut u = rng.random::<f64>() * total;
        let mut chosen = self.components.last().expect("nonzero measure");
        for c in &self.components {
            let m = c.mass();
            if u < m {
                chosen = c;
                break;
            }
            u -= m;
        }
        Ok(match chosen {
            Component::DiracAtZero { .. } => 0.0,
            Component::Dirac { location, .. } => *location,
            Component::Uniform { .. } => rng.random(),
            Component::Beta { a, b, .. } => rand_distr::Beta::new(*a, *b)
                .map_err(|e| Error::InvalidMeasure(e.to_string()))?
                .sample(rng),
            Component::Piecewise { breaks, heights, x_power } => {
                let masses: Vec<f64> = (0..heights.len())
                    .map(|i| heights[i] * power_integral(breaks[i], breaks[i + 1], *x_power))
                    .collect();
                let mut v = rng.random::<f64>() * masses.iter().sum::<f64>();
                let mut piece = masses.len() - 1;
                for (i, m) in masses.iter().enumerate() {
                    if v < *m {
                        piece = i;
                        break;
                    }
                    v -= m;
                }
                let (lo, hi) = (breaks[piece], breaks[piece + 1]);
                let w: f64 = rng.random();
                if *x_power == -1 {
                    lo * (hi / lo).powf(w)
                } else {
                    let e = (*x_power + 1) as f64;
                    (lo.powf(e) + w * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
                }
            }
        })
    }
}

/// `w ∫ g(x) x^{a−1}(1−x)^{b−1} dx / B(a,b)`. The halves `[0,½]` and `[½,1]`
/// are mapped by `x = s^{1/a}` and `1−x = s^{1/b}`, which absorb the
/// power singularities at the endpoints.
fn integrate_beta<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, weight: f64, tol: Tolerance) -> Result<f64> {
    let scale = weight * (-ln_beta(a, b)).exp();
    let half = Tolerance { abs: 0.5 * tol.abs / scale.max(f64::MIN_POSITIVE), ..tol };
    let left = integrate(
        |s: f64| {
            let x = s.powf(1.0 / a);
            g(x) * ((-x).ln_1p() * (b - 1.0)).exp() / a
        },
        0.0,
        0.5f64.powf(a),
        half,
    )?;
    let right = integrate(
        |s: f64| {
            let y = s.powf(1.0 / b);
            g(1.0 - y) * ((-y).ln_1p() * (a - 1.0)).exp() / b
        },
        0.0,
        0.5f64.powf(b),
        half,
    )?;
    Ok(scale * (left.value + right.value))
}

fn monomial(x: f64, p: u32, q: u32) -> f64 {
    x.powi(p as i32) * (1.0 - x).powi(q as i32)
}

impl fmt::Display for BoundedMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match c {
                Component::DiracAtZero { weight } => write!(f, "dirac0:{weight}")?,
                Component::Dirac { location, weight } => write!(f, "dirac:{location}:{weight}")?,
                Component::Beta { a, b, weight } => write!(f, "beta:{a}:{b}:{weight}")?,
                Component::Uniform { weight } => write!(f, "uniform:{weight}")?,
                Component::Piecewise { breaks, heights, x_power } => {
                    if *x_power == 0 {
                        f.write_str("pwc:")?;
                    } else {
                        write!(f, "pwc[x^{x_power}]:")?;
                    }
                    for (j, h) in heights.iter().enumerate() {
                        write!(f, "{},{h},", breaks[j])?;
                    }
                    write!(f, "{}", breaks[breaks.len() - 1])?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for BoundedMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s == "zero" {
            return Ok(Self::zero());
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in measure {s:?}")))
        };
        let mut components = Vec::new();
        for term in s.split('+') {
            let fields: Vec<&str> = term.trim().split(':').collect();
            let arity = |n: usize| {
                if fields.len() == n + 1 {
                    Ok(())
                } else {
                    Err(Error::Parse(format!(
                        "component {term:?} expects {n} parameter(s)"
                    )))
                }
            };
            let c = match fields[0] {
                "dirac0" => {
                    arity(1)?;
                    Component::DiracAtZero { weight: num(fields[1])? }
                }
                "dirac" => {
                    arity(2)?;
                    Component::Dirac {
                        location: num(fields[1])?,
                        weight: num(fields[2])?,
                    }
                }
                "beta" => {
                    arity(3)?;
                    Component::Beta {
                        a: num(fields[1])?,
                        b: num(fields[2])?,
                        weight: num(fields[3])?,
                    }
                }
                "uniform" => {
                    arity(1)?;
                    Component::Uniform { weight: num(fields[1])? }
                }
                "pwc" => {
                    arity(1)?;
                    let values = fields[1].split(',').map(num).collect::<Result<Vec<_>>>()?;
                    if values.len() < 3 || values.len() % 2 == 0 {
                        return Err(Error::Parse(format!(
                            "pwc expects x0,h0,x1,...,xn in {term:?}"
                        )));
                    }
                    Component::Piecewise {
                        breaks: values.iter().step_by(2).copied().collect(),
                        heights: values.iter().skip(1).step_by(2).copied().collect(),
                        x_power: 0,
                    }
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown measure component {other:?} in {s:?}"
                    )))
                }
            };
            components.push(c);
        }
        Self::new(components).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }
}

/// A jump intensity `ν` on `(0,1]` derived from a rate measure. Consumers
/// that simulate one event per atom must reject [`JumpIntensity::InfiniteMass`].
#[derive(Debug, Clone, PartialEq)]
pub enum JumpIntensity {
    Finite(BoundedMeasure),
    InfiniteMass,
}

impl JumpIntensity {
    pub fn is_finite(&self) -> bool {
        matches!(self, JumpIntensity::Finite(_))
    }

    pub fn finite(self, what: &str) -> Result<BoundedMeasure> {
        match self {
            JumpIntensity::Finite(m) => Ok(m),
            JumpIntensity::InfiniteMass => Err(Error::InfiniteIntensity(what.to_string())),
        }
    }
}

/// `λ_{b,k} = ∫ x^{k−2} (1−x)^{b−k} Λ₁(dx)`, for `2 ≤ k ≤ b`.
pub fn lambda_rate(b: usize, k: usize, lambda1: &BoundedMeasure) -> Result<f64> {
    if !(2 <= k && k <= b) {
        return Err(invalid(format!("lambda_rate needs 2 <= k <= b, got b = {b}, k = {k}")));
    }
    lambda1.moment((k - 2) as u32, (b - k) as u32)
}

/// `r_{b,k} = ∫ y^{k−1} (1−y)^{b−k} Λ₀(dy)`, for `1 ≤ k ≤ b`.
pub fn r_rate(b: usize, k: usize, lambda0: &BoundedMeasure) -> Result<f64> {
    if !(1 <= k && k <= b) {
        return Err(invalid(format!("r_rate needs 1 <= k <= b, got b = {b}, k = {k}")));
    }
    lambda0.moment((k - 1) as u32, (b - k) as u32)
}

/// The pair `M = (Λ₀, Λ₁)` characterising an M-coalescent.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MParams {
    pub lambda0: BoundedMeasure,
    pub lambda1: BoundedMeasure,
}

impl MParams {
    pub fn new(lambda0: BoundedMeasure, lambda1: BoundedMeasure) -> Self {
        Self { lambda0, lambda1 }
    }

    /// Kingman's distinguished coalescent: `Λ₀ = c₀δ₀`, `Λ₁ = c₁δ₀`.
    pub fn kingman(c0: f64, c1: f64) -> Result<Self> {
        Ok(Self::new(
            BoundedMeasure::dirac_at_zero(c0)?,
            BoundedMeasure::dirac_at_zero(c1)?,
        ))
    }

    /// `M = (x ν₀(dx), x² ν₁(dx))`.
    pub fn from_nu(nu0: &BoundedMeasure, nu1: &BoundedMeasure) -> Result<Self> {
        Ok(Self::new(nu0.lambda_from_nu(1)?, nu1.lambda_from_nu(2)?))
    }

    /// `c₀ = Λ₀({0})`.
    pub fn c0(&self) -> f64 {
        self.lambda0.mass_at_zero()
    }

    /// `c₁ = Λ₁({0})`.
    pub fn c1(&self) -> f64 {
        self.lambda1.mass_at_zero()
    }

    pub fn lambda_rate(&self, b: usize, k: usize) -> Result<f64> {
        lambda_rate(b, k, &self.lambda1)
    }

    pub fn r_rate(&self, b: usize, k: usize) -> Result<f64> {
        r_rate(b, k, &self.lambda0)
    }

    pub fn nu0(&self) -> Result<JumpIntensity> {
        self.lambda0.nu_measure(1)
    }

    pub fn nu1(&self) -> Result<JumpIntensity> {
        self.lambda1.nu_measure(2)
    }
}
