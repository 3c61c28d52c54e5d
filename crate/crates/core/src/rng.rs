//! Seeded random streams.
//!
//! Every run draws from a ChaCha8 stream. Sweep cells derive their own
//! stream seed as `seed ^ stable_hash(cell coordinates)` so that results do
//! not depend on how cells are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Platform-independent hash of a coordinate tuple.
pub fn stable_hash(coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn cell_seed(seed: u64, coords: &[u64]) -> u64 {
    seed ^ stable_hash(coords)
}
