//! Seeded random streams.
//!
//! Every random draw in an episode comes from an [`RngStream`] whose output is a
//! pure function of its lineage `(master_seed, run_index, component_tag)`.
//!
//! Generator identity (pinned for this build):
//! - seed material: SHA-256 over the little-endian bytes of
//!   `master_seed (u64) || run_index (u64) || component_tag (u64)`, used as the
//!   32-byte ChaCha key;
//! - generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), period 2^64
//!   blocks of 64 bytes per stream;
//! - standard normals: the ziggurat sampler of `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

/// Stream tag for materializing a problem instance (hidden parameter, context pool).
pub const TAG_INSTANCE: u64 = 0;
/// Stream tag for environment reward noise and fresh contexts.
pub const TAG_ENV: u64 = 1;
/// Stream tag for agent posterior sampling.
pub const TAG_AGENT: u64 = 2;
/// Stream tag for attacker randomness.
pub const TAG_ATTACK: u64 = 3;

/// Where a stream came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lineage {
    pub master_seed: u64,
    pub run_index: u64,
    pub component_tag: u64,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    lineage: Lineage,
}

/// Derives the stream for `(master_seed, run_index, component_tag)`.
pub fn derive_stream(master_seed: u64, run_index: u64, component_tag: u64) -> RngStream {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(run_index.to_le_bytes());
    hasher.update(component_tag.to_le_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    RngStream {
        rng: ChaCha8Rng::from_seed(seed),
        lineage: Lineage {
            master_seed,
            run_index,
            component_tag,
        },
    }
}

impl RngStream {
    pub fn lineage(&self) -> Lineage {
        self.lineage
    }

    /// One standard-normal variate.
    pub fn next_gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }

    /// Fills `out` with independent standard normals, in index order.
    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        for z in out.iter_mut() {
            *z = self.next_gaussian();
        }
    }
}
