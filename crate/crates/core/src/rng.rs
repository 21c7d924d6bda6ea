//! Counter-based random streams.
//!
//! Every path draws from its own ChaCha8 stream selected by
//! `(master seed, family, index)`, so results do not depend on how paths are
//! distributed over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Independent stream families sharing one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Family {
    /// Driving noise of the radial diffusion.
    Radial = 1,
    /// Increments of the coupling-direction noise in the Girsanov weight.
    Girsanov = 2,
    /// Initial-condition sampling.
    Initial = 3,
}

fn mix(seed: u64, family: u64) -> u64 {
    // splitmix64 finaliser; keeps families far apart for adjacent seeds.
    let mut z = seed ^ family.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for path `index` of `family`.
pub fn stream(seed: u64, family: Family, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, family as u64));
    rng.set_stream(index);
    rng
}

/// A standard normal variate.
#[inline]
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}
