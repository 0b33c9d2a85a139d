//! Named random substreams derived from a single master seed.
//!
//! Every stochastic step (subsampling, phenotype permutation, simulation)
//! draws from its own ChaCha stream, selected by a tag and an index, so the
//! numbers a task sees do not depend on which thread ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Generator for task `index` of the stream named `tag`.
///
/// The master seed, tag hash and index fill three quarters of the 256-bit
/// ChaCha key, so distinct triples give unrelated streams.
pub fn substream(master_seed: u64, tag: &str, index: u64) -> Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(tag).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
