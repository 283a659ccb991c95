//! Coming down from infinity: the drift functionals `φ₁`, `φ`, the exponent
//! `ψ_Λ`, a heuristic classifier, the fixation-time bound and the Laplace
//! exponent of the dust subordinator.
//!
//! `φ₁(n) = Σ_{k=2}^{n} (k−1) C(n,k) λ_{n,k}` is also
//! `∫ (nx − 1 + (1−x)^n) x⁻² Λ₁(dx)` (the integrand is `E[(K−1)⁺]/x²` for
//! `K ~ Bin(n, x)`, equal to `C(n,2)` at `x = 0`). [`phi1`] is the exact
//! sum; the series in [`classify_cdi`] and [`fixation_bound`] use the
//! integral form, which costs one quadrature per `n` instead of `n`.
//!
//! Convergence of `Σ 1/φ₁(n)` is decided through the equivalent integral
//! `∫^∞ dq/ψ(q)`, split into windows `[2^j, 2^{j+1}]`. With `I_j` the window
//! integrals, `ρ_j = I_{j+1}/I_j` and the Raabe statistic
//! `R_j = (j+1)(1 − ρ_j)`, over the last [`RATIO_WINDOWS`] ratios:
//!
//! * `ComesDown` if every `ρ_j < 0.99` and every `R_j ≥ 2`;
//! * `DoesNotComeDown` if every `ρ_j ≥ 0.99` (increments do not decay) or
//!   every `R_j ≤ 1.25` (increments decay like `1/j`);
//! * `Undecided` otherwise.
//!
//! The ratio test alone misreads Bolthausen–Sznitman, whose windows decay
//! like `1/j` with `ρ_j ≈ 0.95` at `j ≈ 19`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{BoundedMeasure, MParams};
use crate::paintbox::DistinguishedMassPartition;
use crate::quadrature::{integrate, Tolerance};

/// Relative tolerance for `ψ` and the integral form of `φ₁`.
pub const CDI_TOLERANCE: Tolerance = Tolerance::relative(1e-10).with_abs(1e-300);
pub const DEFAULT_DEPTH: usize = 10_000;
pub const DEFAULT_QMAX: f64 = 1e6;
pub const DEFAULT_WINDOWS: usize = 20;
/// Number of trailing window ratios the verdict looks at.
pub const RATIO_WINDOWS: usize = 5;
pub const RATIO_THRESHOLD: f64 = 0.99;
pub const RAABE_CONVERGENT: f64 = 2.0;
pub const RAABE_DIVERGENT: f64 = 1.25;

/// `φ₁(n)`, exact sum over `k`.
pub fn phi1(n: usize, lambda1: &BoundedMeasure) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("phi1 needs n >= 2, got {n}")));
    }
    let mut total = 0.0;
    for k in 2..=n {
        let rate = crate::measures::lambda_rate(n, k, lambda1)?;
        if rate > 0.0 {
            total += (k - 1) as f64 * crate::coalescent::binomial(n, k) * rate;
        }
    }
    Ok(total)
}

/// `(nx − 1 + (1−x)^n) / x²`, evaluated without cancellation.
fn phi1_kernel(n: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5 * n * (n - 1.0);
    }
    if n * x < 0.1 {
        // Σ_{k≥2} C(n,k)(−x)^k / x², an alternating series with ratio
        // below nx.
        let mut term = 0.5 * n * (n - 1.0);
        let mut sum = term;
        let mut k = 2.0;
        while k < n {
            term *= -(n - k) / (k + 1.0) * x;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        (n * x + (n * (-x).ln_1p()).exp_m1()) / (x * x)
    }
}

/// `φ₁(n)` through its integral form. Agrees with [`phi1`] to quadrature
/// accuracy; accepts any real `n ≥ 1`.
pub fn phi1_integral(n: usize, lambda1: &BoundedMeasure) -> Result<f64> {
    let nf = n as f64;
    lambda1.integrate(|x| phi1_kernel(nf, x), CDI_TOLERANCE)
}

/// `φ(n) = φ₁(n) + Λ₀([0,1])·n`, with `φ₁(1) = 0`.
pub fn phi(n: usize, params: &MParams) -> Result<f64> {
    if n == 0 {
        return Err(invalid("phi needs n >= 1"));
    }
    let drift = if n >= 2 { phi1(n, &params.lambda1)? } else { 0.0 };
    Ok(drift + params.lambda0.total_mass() * n as f64)
}

fn phi_fast(n: usize, params: &MParams) -> Result<f64> {
    let drift = if n >= 2 { phi1_integral(n, &params.lambda1)? } else { 0.0 };
    Ok(drift + params.lambda0.total_mass() * n as f64)
}

/// `(e^{−z} − 1 + z) / z²`.
fn psi_kernel(z: f64) -> f64 {
    if z < 1e-4 {
        0.5 - z / 6.0 + z * z / 24.0
    } else {
        ((-z).exp_m1() + z) / (z * z)
    }
}

/// `ψ_Λ(q) = ∫ (e^{−qx} − 1 + qx) x⁻² Λ(dx)`; an atom at zero contributes
/// `w q²/2`.
pub fn psi(q: f64, lambda: &BoundedMeasure) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("psi needs finite q > 0, got {q}")));
    }
    let qq = q * q;
    lambda.integrate(|x| qq * psi_kernel(q * x), CDI_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdiConfig {
    /// Series depth `N`.
    pub depth: usize,
    /// Integral cap `Q`.
    pub qmax: f64,
    /// Maximal number of windows `[2^j, 2^{j+1}] ⊂ [1, Q]`.
    pub windows: usize,
}

impl Default for CdiConfig {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            qmax: DEFAULT_QMAX,
            windows: DEFAULT_WINDOWS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ComesDown,
    DoesNotComeDown,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdiEvidence {
    /// `(Λ₀ + Λ₁)({1}) > 0`.
    pub mass_at_one: bool,
    /// `S_N = Σ_{n=2}^{N} 1/φ₁(n)`; infinite when `Λ₁ = 0`.
    pub partial_sum: f64,
    /// `S_{⌊N/2⌋}`, to show the growth trend of the series.
    pub partial_sum_half: f64,
    /// `∫_1^Q dq/ψ(q)`.
    pub psi_integral: f64,
    pub window_increments: Vec<f64>,
    pub window_ratios: Vec<f64>,
    pub raabe: Vec<f64>,
    pub n: usize,
    pub q: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdiVerdict {
    pub verdict: Verdict,
    pub evidence: CdiEvidence,
}

fn reciprocal_sums(lambda1: &BoundedMeasure, depth: usize) -> Result<(f64, f64)> {
    let (mut full, mut half) = (0.0, 0.0);
    for n in 2..=depth {
        let v = phi1_integral(n, lambda1)?;
        if !(v > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "phi1({n}) = {v} although Lambda1 is nonzero"
            )));
        }
        full += 1.0 / v;
        if n <= depth / 2 {
            half = full;
        }
    }
    Ok((full, half))
}

fn reciprocal_psi_integral(lambda1: &BoundedMeasure, a: f64, b: f64) -> Result<f64> {
    // 1/ψ is smooth and decreasing, so a relative tolerance on each window
    // is cheap.
    let r = integrate(
        |q| match psi(q, lambda1) {
            Ok(v) => 1.0 / v,
            Err(_) => f64::NAN,
        },
        a,
        b,
        Tolerance::relative(1e-9),
    )?;
    Ok(r.value)
}

pub fn classify_cdi(params: &MParams, config: &CdiConfig) -> Result<CdiVerdict> {
    if !(config.qmax.is_finite() && config.qmax > 1.0) {
        return Err(invalid(format!("Q = {} must be finite and > 1", config.qmax)));
    }
    let lambda1 = &params.lambda1;
    let mass_at_one = params.lambda0.mass_at_one() + lambda1.mass_at_one() > 0.0;
    let mut evidence = CdiEvidence {
        mass_at_one,
        partial_sum: f64::INFINITY,
        partial_sum_half: f64::INFINITY,
        psi_integral: f64::INFINITY,
        window_increments: Vec::new(),
        window_ratios: Vec::new(),
        raabe: Vec::new(),
        n: config.depth,
        q: config.qmax,
        note: None,
    };
    if lambda1.is_zero() {
        evidence.note = Some(if mass_at_one {
            "Lambda1 = 0; the atom of Lambda0 at 1 absorbs every block at once".into()
        } else if params.lambda0.is_zero() {
            "Lambda1 = Lambda0 = 0; no block ever merges".into()
        } else {
            "Lambda1 = 0: sum 1/phi1 diverges trivially; blocks only leave by joining 0, \
             each at rate at most Lambda0([0,1]), and sum 1/phi also diverges"
                .into()
        });
        let verdict = if mass_at_one { Verdict::ComesDown } else { Verdict::DoesNotComeDown };
        return Ok(CdiVerdict { verdict, evidence });
    }
    let (full, half) = reciprocal_sums(lambda1, config.depth)?;
    evidence.partial_sum = full;
    evidence.partial_sum_half = half;

    let max_windows = (config.qmax.log2().floor() as usize).min(config.windows);
    let mut increments = Vec::with_capacity(max_windows);
    for j in 0..max_windows {
        let lo = (j as f64).exp2();
        increments.push(reciprocal_psi_integral(lambda1, lo, 2.0 * lo)?);
    }
    let covered = (max_windows as f64).exp2();
    let remainder = if covered < config.qmax {
        reciprocal_psi_integral(lambda1, covered, config.qmax)?
    } else {
        0.0
    };
    evidence.psi_integral = increments.iter().sum::<f64>() + remainder;
    let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    let raabe: Vec<f64> = ratios.iter().enumerate().map(|(j, r)| (j + 1) as f64 * (1.0 - r)).collect();
    evidence.window_increments = increments;

    let verdict = if mass_at_one {
        Verdict::ComesDown
    } else if ratios.len() < RATIO_WINDOWS {
        evidence.note = Some(format!("Q too small for {RATIO_WINDOWS} window ratios"));
        Verdict::Undecided
    } else {
        let tail = ratios.len() - RATIO_WINDOWS;
        let (rho, rb) = (&ratios[tail..], &raabe[tail..]);
        if rho.iter().all(|&r| r < RATIO_THRESHOLD) && rb.iter().all(|&r| r >= RAABE_CONVERGENT) {
            Verdict::ComesDown
        } else if rho.iter().all(|&r| r >= RATIO_THRESHOLD) || rb.iter().all(|&r| r <= RAABE_DIVERGENT) {
            Verdict::DoesNotComeDown
        } else {
            Verdict::Undecided
        }
    };
    evidence.window_ratios = ratios;
    evidence.raabe = raabe;
    Ok(CdiVerdict { verdict, evidence })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixationBound {
    /// `Σ_{n=1}^{N} 1/φ(n)`.
    pub partial_sum: f64,
    /// Upper bound on `Σ_{n>N} 1/φ(n)` when available.
    pub tail: Option<f64>,
    /// `partial_sum + tail`, a bound on `E[ζ]` for the coalescent started
    /// from singletons of any size.
    pub bound: Option<f64>,
    pub depth: usize,
    pub tail_controlled: bool,
}

/// `Σ_{n>N} 1/(a n (n+d))`, bounded by the integral from `N + ½` (the
/// summand is convex in `n`).
fn kingman_tail(a: f64, d: f64, from: f64) -> f64 {
    if d.abs() < 1e-12 {
        1.0 / (a * from)
    } else {
        ((from + d) / from).ln() / (a * d)
    }
}

/// Bound on the mean fixation time `E[ζ] ≤ Σ_{n≥1} 1/φ(n)`. The tail is
/// controlled through `φ(n) ≥ c₁ n(n−1)/2 + Λ₀([0,1]) n`, so it is reported
/// only when `Λ₁` has an atom at zero.
pub fn fixation_bound(params: &MParams, depth: usize) -> Result<FixationBound> {
    let m = params.lambda0.total_mass();
    if !(m > 0.0) {
        return Err(invalid("fixation needs Lambda0 != 0; with Lambda0 = 0, phi(1) = 0 and ζ = ∞"));
    }
    let mut partial_sum = 0.0;
    for n in 1..=depth {
        partial_sum += 1.0 / phi_fast(n, params)?;
    }
    let c1 = params.c1();
    let tail = (c1 > 0.0).then(|| {
        let a = 0.5 * c1;
        let d = m / a - 1.0;
        if depth == 0 {
            // n = 1 contributes 1/φ(1) = 1/Λ₀([0,1]) exactly.
            1.0 / m + kingman_tail(a, d, 1.5)
        } else {
            kingman_tail(a, d, depth as f64 + 0.5)
        }
    });
    Ok(FixationBound {
        partial_sum,
        tail,
        bound: tail.map(|t| partial_sum + t),
        depth,
        tail_controlled: tail.is_some(),
    })
}

/// `φ⁰(q) = c₀q + Σ wᵢ (1 − δ(sᵢ)^q)`.
pub fn dust_laplace_exponent(
    q: f64,
    c0: f64,
    mixture: &[(DistinguishedMassPartition, f64)],
) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("q = {q} must be finite and positive")));
    }
    if !(c0 >= 0.0 && c0.is_finite()) || mixture.iter().any(|(_, w)| !(*w >= 0.0 && w.is_finite())) {
        return Err(invalid("c0 and mixture weights must be finite and nonnegative"));
    }
    Ok(c0 * q + mixture.iter().map(|(s, w)| w * (1.0 - s.dust().powf(q))).sum::<f64>())
}
