//! Deterministic, counter-based random number streams.
//!
//! All sampling in this crate derives its randomness from a `u64` master
//! seed through ChaCha streams: the stream index separates eigenmodes (so
//! raising the truncation level never perturbs lower modes) and a SplitMix64
//! hash separates Monte Carlo replicas. Results are reproducible regardless
//! of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// RNG for (seed, stream). Streams with the same seed are independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derived master seed for one Monte Carlo replica.
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    splitmix64(master ^ splitmix64(replica.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
