//! Bridges, bridge flows, the GFVI forward process and its duality with the
//! M-coalescent.

pub mod bridge;
pub mod duality;
pub mod gfvi;

pub use bridge::{
    compose_check, exact_composed_law, partition_from_bridge, simulate_flow, ComposeReport, CompositeBridge,
    DistinguishedBridge,
};
pub use duality::{duality_check, phi_lebesgue, DualityReport};
pub use gfvi::{
    gfvi_generator_apply, gfvi_martingale_residual, gfvi_step, moment_functional, run_gfvi, simulate_gfvi,
    AtomicProbabilityMeasure, GfviEvent, GfviTrajectory, TestFunction,
};
