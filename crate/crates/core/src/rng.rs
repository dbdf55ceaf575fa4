//! Seeded, indexable random streams.
//!
//! Every Monte Carlo replication `r` draws from substream `r` of the master
//! seed, so results do not depend on scheduling or worker count. The
//! generator is ChaCha8 with its 64-bit stream selector, which is portable
//! and bit-reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub substream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, substream_index: u64) -> Self {
        Self {
            master_seed,
            substream_index,
        }
    }

    /// Same master seed, different substream.
    pub fn substream(&self, index: u64) -> Self {
        Self::new(self.master_seed, index)
    }

    /// An independent stream family keyed by `key`, keeping the substream
    /// index. `child(0)` is the stream itself.
    pub fn child(&self, key: u64) -> Self {
        if key == 0 {
            return *self;
        }
        Self::new(
            splitmix64(self.master_seed ^ splitmix64(key)),
            self.substream_index,
        )
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.substream_index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn fill_normal<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for x in out.iter_mut() {
        *x = StandardNormal.sample(rng);
    }
}

pub(crate) fn normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
