//! Reproducible, splittable random streams.
//!
//! A stream is identified by a 64-bit seed plus a path of child indices.
//! The generator for a given `(seed, path)` pair is derived by hashing the
//! identifier into a ChaCha key, so every substream is a pure function of
//! its identifier: draws do not depend on thread count, scheduling, or the
//! order in which sibling substreams are consumed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Identifier of a reproducible random substream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream_path: Vec<u64>,
}

impl SeedSpec {
    /// The root stream for a seed.
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            stream_path: Vec::new(),
        }
    }

    /// The child stream at `index`; distinct indices give independent streams.
    pub fn child(&self, index: u64) -> Self {
        let mut stream_path = Vec::with_capacity(self.stream_path.len() + 1);
        stream_path.extend_from_slice(&self.stream_path);
        stream_path.push(index);
        Self {
            seed: self.seed,
            stream_path,
        }
    }

    /// The generator keyed by this identifier.
    pub fn rng(&self) -> ChaCha8Rng {
        // Length-prefixed little-endian encoding keeps the key injective in
        // (seed, path).
        let mut hasher = Sha256::new();
        hasher.update(b"maxplus.stream.v1");
        hasher.update(self.seed.to_le_bytes());
        hasher.update((self.stream_path.len() as u64).to_le_bytes());
        for part in &self.stream_path {
            hasher.update(part.to_le_bytes());
        }
        ChaCha8Rng::from_seed(hasher.finalize().into())
    }
}
