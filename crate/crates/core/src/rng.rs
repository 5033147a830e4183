//! Seed derivation and counted random streams.
//!
//! Every stochastic quantity in an experiment comes from a stream whose seed
//! is `derive_seed(master_seed, label, indices)`. The derivation depends only
//! on its arguments, so two runs that differ only in noise mode see the same
//! data, reservoirs and optimizer draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

/// First eight bytes (little endian) of
/// `SHA-256(master_seed_le || label || 0x00 || index_le...)`.
pub fn derive_seed(master_seed: u64, label: &str, indices: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    for i in indices {
        hasher.update(i.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// ChaCha8 stream that counts how many variates it has handed out.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    draws: u64,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    pub fn derived(master_seed: u64, label: &str, indices: &[u64]) -> Self {
        Self::from_seed(derive_seed(master_seed, label, indices))
    }

    /// Normal variate with mean 0 and the given standard deviation.
    pub fn gaussian(&mut self, sigma: f64) -> f64 {
        self.draws += 1;
        let z: f64 = self.rng.sample(StandardNormal);
        sigma * z
    }

    /// Uniform variate on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.draws += 1;
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.draws += 1;
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.draws += 1;
        self.rng.fill_bytes(dst)
    }
}
