//! Seed derivation. One master seed fans out into independent ChaCha
//! streams so that shuffling, initialization, clustering and resampling
//! never share random draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for derived streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Shuffle = 2,
    KMeans = 3,
    Bootstrap = 4,
    Vqc = 5,
    Eigen = 6,
    Monitor = 7,
    Corpus = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a reproducible generator for `(seed, stream, index)`.
pub fn derive(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(index.wrapping_add(0x5EED)));
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(stream as u64);
    rng
}

/// Derive a child seed, e.g. one per boosting round.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ splitmix64(index))
}
