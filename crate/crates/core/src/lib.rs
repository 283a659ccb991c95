//! Simulation and numerics for distinguished exchangeable coalescents.
//!
//! A distinguished coalescent is an exchangeable coalescent on `{0, 1, 2, ...}`
//! whose block containing `0` is marked: `0` stands for an immigrant ancestor
//! and any lineage merging into that block descends from immigration. The
//! simple members of the family (the *M-coalescents*) are parametrised by two
//! finite measures on `[0,1]`, `M = (Λ₀, Λ₁)`:
//!
//! * `Λ₁` drives multiple mergers among blocks that do not contain `0`, and
//! * `Λ₀` drives mergers of blocks into the distinguished block.
//!
//! The crate is organised bottom-up:
//!
//! * [`partitions`]: distinguished partitions of `{0,…,n}`, coagulation,
//!   restriction, permutations.
//! * [`paintbox`]: distinguished mass-partitions and paint-box sampling.
//! * [`measures`]: finite measures on `[0,1]` and the coalescent rates
//!   `λ_{b,k}`, `r_{b,k}`.
//! * [`coalescent`]: exact simulation of restrictions `Π⁰|[n]` and the
//!   generator of the restricted chain.
//! * [`cdi`]: coming down from infinity, fixation-time bounds and the dust
//!   subordinator exponent.
//! * [`flows`]: distinguished bridges and their flows, the generalized
//!   Fleming-Viot process with immigration (GFVI), and the duality harness.
//!
//! All randomness is drawn from explicitly seeded streams (see [`rng`]).

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cdi;
pub mod coalescent;
mod error;
pub mod flows;
pub mod measures;
pub mod paintbox;
pub mod partitions;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use cdi::{CdiConfig, CdiVerdict, Verdict};
pub use coalescent::{CoalescentTrajectory, GeneralCoagulationSpec, Horizon};
pub use error::{Error, Result};
pub use flows::{AtomicProbabilityMeasure, CompositeBridge, DistinguishedBridge, TestFunction};
pub use measures::{BoundedMeasure, Component, JumpIntensity, MParams};
pub use paintbox::DistinguishedMassPartition;
pub use partitions::{DistinguishedPartition, Permutation};
