//! Seeded random streams.
//!
//! A [`RandomStream`] names a ChaCha8 key (the seed) and one of its 2^64
//! streams. Identical `(seed, stream)` pairs always replay the same draws, and
//! distinct stream ids never overlap. Replicates inside one stream are laid out
//! in fixed-size blocks of the keystream so replicate `r` can be regenerated on
//! its own.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Number of 32-bit keystream words reserved for each replicate block.
const BLOCK_WORDS_LOG2: u32 = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Stream whose id is derived from a textual key (FNV-1a), so a cell of a
    /// simulation gets the same draws no matter which other cells run.
    pub fn keyed(seed: u64, key: &str) -> Self {
        Self::new(seed, fnv1a(key.as_bytes()))
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = StreamRng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Generator positioned at the start of replicate block `block`.
    pub fn block(&self, block: u32) -> StreamRng {
        let mut rng = self.rng();
        rng.set_word_pos(u128::from(block) << BLOCK_WORDS_LOG2);
        rng
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
