//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a [`RngStream`], a `(seed,
//! stream_id)` pair mapped onto an independent ChaCha8 stream. Parallel
//! replications derive their seeds from the master seed and replication index
//! only, so results do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A stream with the same seed but a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep_index` of a study seeded with `master_seed`.
pub fn replication_seed(master_seed: u64, rep_index: u64) -> u64 {
    mix64(mix64(master_seed) ^ rep_index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}
