//! Seeded random streams.
//!
//! Every simulation takes an explicit RNG. Monte-Carlo harnesses derive one
//! ChaCha stream per replica from `(seed, replica index)` so results do not
//! depend on scheduling and parallel runs reproduce sequential ones bit for
//! bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream `index` of the family seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Offsets separating independent families of replica streams drawn from
/// one seed (for example the two sides of a two-sample comparison).
pub const FAMILY_STRIDE: u64 = 1 << 40;

pub fn family_stream(seed: u64, family: u64, index: u64) -> SimRng {
    stream(seed, family * FAMILY_STRIDE + index)
}

/// Exp(rate) by inversion. `rate` must be positive and finite.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    // 1 - U lies in (0, 1], so the logarithm is finite.
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Uniform draw on `[0, 1)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random()
}
