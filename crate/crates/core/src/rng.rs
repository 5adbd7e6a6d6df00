//! Counter-based randomness.
//!
//! Every random decision in the simulator is drawn from a ChaCha8 stream
//! addressed by `(root seed, purpose, stream index, word offset)`. Streams can
//! be read sequentially or entered at any word position, so the value used for
//! a given pair or node never depends on evaluation order or thread count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Root of a family of deterministic random streams.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seed(pub u64);

/// Purpose tags keep streams for different decisions independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    PairCoin = 1,
    DirectedCoin = 2,
    DegreeNoise = 3,
    Targets = 4,
    Craft = 5,
    Compromise = 6,
    Derive = 7,
    Synthetic = 8,
    Unpaired = 9,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed(root)
    }

    /// A generator positioned at the start of stream `index` for `purpose`.
    pub fn stream(self, purpose: Purpose, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.0.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }

    /// Child seed, e.g. one per trial.
    pub fn derive(self, index: u64) -> Seed {
        Seed(self.stream(Purpose::Derive, index).next_u64())
    }

    /// The `k`-th 64-bit word of a stream, by random access.
    pub fn word_at(self, purpose: Purpose, index: u64, k: u64) -> u64 {
        let mut rng = self.stream(purpose, index);
        rng.set_word_pos(2 * k as u128);
        rng.next_u64()
    }
}

/// Uniform in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in the open interval `(0, 1)`.
#[inline]
pub fn open_unit_f64(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Uniform sample of `k` distinct values from `0..n`, in draw order.
pub fn sample_distinct<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k.min(n)).into_vec()
}
