//! Seeded random number streams.
//!
//! Every randomized stage draws from its own ChaCha stream so that changing
//! one stage's consumption (say, training for more epochs) never perturbs
//! another stage's draws under the same seed.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Stream id for parameter initialization.
pub const STREAM_INIT: u64 = 1;
/// Stream id for per-epoch training shuffles.
pub const STREAM_SHUFFLE: u64 = 2;
/// Stream id for class partition draws.
pub const STREAM_SPLIT: u64 = 3;
/// Stream id for synthetic world generation.
pub const STREAM_WORLD: u64 = 4;
/// Stream id for random-pick class aggregation.
pub const STREAM_CLASS_PICK: u64 = 5;
/// Stream id for per-class sample-cap subsampling.
pub const STREAM_SUBSAMPLE: u64 = 6;

/// Deterministic generator for (`seed`, `stream`).
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a salt into a base seed (splitmix64 finalizer), for deriving
/// per-trial or per-modality seeds that stay decorrelated.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One standard normal draw.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform draw from the unit sphere in `dim` dimensions: normalized
/// Gaussian vector, redrawn in the (measure-zero) degenerate case.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let n = crate::linalg::norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}
