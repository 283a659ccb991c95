//! Monte-Carlo check of the moment duality between the M-coalescent and
//! the GFVI process started from Lebesgue measure,
//! `E[Φ_f(λ, Π⁰|[p](t))] = E[G_f(Z_t)]`.
//!
//! `Φ_f(m, π)` integrates `f` with one variable per block of `π`: the
//! coordinates in block 0 get 0, those in block `i ≥ 1` share a variable
//! drawn from `m`. For `π = 0_[p]` (all singletons) this is `G_f(m)`; for the
//! one-block partition it is `f(0, …, 0)`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::gfvi::{moment_functional, run_gfvi, AtomicProbabilityMeasure, TestFunction, LEBESGUE_NODES};
use crate::coalescent::{simulate_with_table, Horizon, RateTable};
use crate::error::{invalid, Result};
use crate::measures::MParams;
use crate::partitions::{enumerate, DistinguishedPartition};
use crate::quadrature::gauss_legendre_unit;
use crate::rng::family_stream;
use crate::stats::Estimate;

/// `Φ_f(λ, π)` for `π` a partition of `{0,…,p}`, by a tensor
/// Gauss–Legendre rule over the non-distinguished blocks.
pub fn phi_lebesgue(f: &TestFunction, pi: &DistinguishedPartition) -> Result<f64> {
    let p = f.arity();
    if pi.n() != p {
        return Err(invalid(format!("partition of [{}] for a test function of arity {p}", pi.n())));
    }
    let labels = pi.labels();
    let b = pi.non_distinguished_count();
    let (nodes, weights) = gauss_legendre_unit(LEBESGUE_NODES);
    let mut idx = vec![0usize; b];
    let mut x = vec![0.0; p];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for &i in &idx {
            w *= weights[i];
        }
        for j in 1..=p {
            x[j - 1] = match labels[j] {
                0 => 0.0,
                blk => nodes[idx[blk - 1]],
            };
        }
        total += w * f.eval(&x);
        let mut pos = 0;
        loop {
            if pos == b {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < nodes.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub p: usize,
    pub test_function: String,
    pub t: f64,
    pub replicas: usize,
    pub seed: u64,
    /// `E[Φ_f(λ, Π⁰|[p](t))]`, coalescent side.
    pub lhs: Estimate,
    /// `E[G_f(Z_t)]`, GFVI side.
    pub rhs: Estimate,
    pub z_score: f64,
}

/// Both sides of the duality with independent replica streams. The
/// intensities `ν₀ = x⁻¹Λ₀`, `ν₁ = x⁻²Λ₁` must be finite.
pub fn duality_check(
    params: &MParams,
    f: &TestFunction,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<DualityReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("t = {t} must be finite and >= 0")));
    }
    if replicas < 2 {
        return Err(invalid("duality_check needs at least two replicas"));
    }
    let nu0 = params.nu0()?.finite("ν₀ = x⁻¹Λ₀(dx)")?;
    let nu1 = params.nu1()?.finite("ν₁ = x⁻²Λ₁(dx)")?;
    let p = f.arity();

    let phi: HashMap<DistinguishedPartition, f64> = enumerate(p)?
        .into_iter()
        .map(|pi| phi_lebesgue(f, &pi).map(|v| (pi, v)))
        .collect::<Result<_>>()?;
    let table = RateTable::new(params, p)?;
    let start = DistinguishedPartition::singletons(p);
    let lhs = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = family_stream(seed, 0, i as u64);
            let traj = simulate_with_table(&table, &start, Horizon::Time(t), &mut rng)?;
            Ok(phi[traj.current()])
        })
        .collect::<Result<Vec<f64>>>()?;

    let z0 = AtomicProbabilityMeasure::lebesgue();
    let rhs = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = family_stream(seed, 1, i as u64);
            let zt = run_gfvi(&nu0, &nu1, &z0, t, &mut rng, |_, _, _| {})?;
            Ok(moment_functional(f, &zt))
        })
        .collect::<Result<Vec<f64>>>()?;

    let (lhs, rhs) = (Estimate::from_samples(&lhs), Estimate::from_samples(&rhs));
    Ok(DualityReport {
        p,
        test_function: f.name().to_string(),
        t,
        replicas,
        seed,
        z_score: lhs.z_between(&rhs),
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::BoundedMeasure;

    #[test]
    fn phi_of_extreme_partitions() {
        let f = TestFunction::product(3).unwrap();
        let single = DistinguishedPartition::singletons(3);
        assert!((phi_lebesgue(&f, &single).unwrap() - 0.125).abs() < 1e-14);
        assert_eq!(phi_lebesgue(&f, &DistinguishedPartition::whole(3)).unwrap(), 0.0);
        let merged: DistinguishedPartition = "0|1,2,3".parse().unwrap();
        assert!((phi_lebesgue(&f, &merged).unwrap() - 0.25).abs() < 1e-14);
        let one = TestFunction::one(3).unwrap();
        assert!((phi_lebesgue(&one, &merged).unwrap() - 1.0).abs() < 1e-14);
        assert!(phi_lebesgue(&f, &DistinguishedPartition::singletons(2)).is_err());
    }

    #[test]
    fn zero_time_sides_are_exact() {
        let params = MParams::new("dirac:0.6:1".parse().unwrap(), "dirac:0.5:1".parse().unwrap());
        let f = TestFunction::product(2).unwrap();
        let r = duality_check(&params, &f, 0.0, 50, 3).unwrap();
        assert!((r.lhs.mean - 0.25).abs() < 1e-14 && (r.rhs.mean - 0.25).abs() < 1e-14);
        assert_eq!(r.z_score, 0.0);
    }

    #[test]
    fn constant_function_is_one() {
        let params = MParams::new("dirac:0.6:1".parse().unwrap(), "dirac:0.5:1".parse().unwrap());
        let r = duality_check(&params, &TestFunction::one(2).unwrap(), 1.0, 100, 3).unwrap();
        assert!((r.lhs.mean - 1.0).abs() < 1e-12 && (r.rhs.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_infinite_intensity() {
        let params = MParams::new(BoundedMeasure::zero(), "uniform:1".parse().unwrap());
        assert!(duality_check(&params, &TestFunction::first(1).unwrap(), 1.0, 10, 0).is_err());
    }
}
