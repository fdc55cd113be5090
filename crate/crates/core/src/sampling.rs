//! Seedable inverse-transform sampling.
//!
//! The uniform source is ChaCha20 (`rand_chacha`). A state is seeded with
//! `seed_from_u64(seed)`; the state for replicate `i` of a parallel job is
//! the same seed with the ChaCha stream id set to `i`. Distinct streams are
//! disjoint keystreams of 2^68 bytes each, so derived states never overlap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::dist::NormalizedPmf;
use crate::error::{Error, Result};
use crate::table::FrequencyTable;

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::derived(seed, 0)
    }

    /// The state for task `stream` of a job seeded with `seed`.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position in the stream, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// The underlying generator, for drawing from other distributions.
    pub fn rng_mut(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

/// Smallest `k` with `F(k) ≥ θ`.
pub fn sample_with_uniform(dist: &NormalizedPmf, theta: f64) -> Result<u64> {
    dist.quantile(theta)
}

/// Draws `θ ~ U[0, 1)` and returns `min{k : F(k) ≥ θ}`.
pub fn sample(dist: &NormalizedPmf, rng: &mut RngState) -> Result<u64> {
    sample_with_uniform(dist, rng.uniform())
}

/// The textbook scan: start at `j = 0` and step up while `F(j) < θ`.
///
/// Same output as [`sample_with_uniform`]; kept as a reference for it.
pub fn sample_linear_scan(dist: &NormalizedPmf, theta: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Domain {
            function: "sample_linear_scan",
            value: theta,
            requirement: "0 ≤ θ < 1",
        });
    }
    let end = dist.effective_support_end();
    let mut j = 0;
    while j < end && dist.cdf(j) < theta {
        j += 1;
    }
    Ok(j)
}

/// `n ≥ 1` draws, tabulated.
pub fn sample_batch(dist: &NormalizedPmf, rng: &mut RngState, n: u64) -> Result<FrequencyTable> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be at least 1".into(),
        ));
    }
    let mut counts: Vec<u64> = Vec::new();
    for _ in 0..n {
        let k = sample(dist, rng)? as usize;
        if k >= counts.len() {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    FrequencyTable::from_counts(&counts)
}
