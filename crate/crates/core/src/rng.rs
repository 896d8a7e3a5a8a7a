//! Seeded random streams.
//!
//! Every randomized computation draws from a ChaCha8 stream selected by
//! `(seed, stream)`. Stream 0 is the point estimate; bootstrap replicate `k`
//! uses stream `k + 1`. ChaCha is counter-based, so a replicate's draws do not
//! depend on which thread ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
