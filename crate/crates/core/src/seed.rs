//! Seed derivation.
//!
//! Every random stream in a run is derived from one master seed, so a
//! component can be re-seeded without perturbing the others and results do not
//! depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Named sub-streams of a command-level seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scenario,
    Ga,
    Simulation,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Scenario => 0x5343_454e,
            Stream::Ga => 0x4741_0000,
            Stream::Simulation => 0x5349_4d00,
        }
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed.
pub fn combine(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &p| mix64(acc ^ mix64(p)))
}

pub fn derive(seed: u64, stream: Stream) -> u64 {
    combine(&[seed, stream.tag()])
}

/// Seed for evaluating individual `index` of `generation`.
pub fn evaluation_seed(master: u64, generation: u32, index: u32) -> u64 {
    combine(&[master, u64::from(generation), u64::from(index)])
}

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
