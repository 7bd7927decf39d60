//! Counter-based sample streams.
//!
//! Every stochastic routine addresses its randomness by `(seed, stream)`; the
//! ChaCha block counter inside a stream is the sample counter. Work split into
//! fixed-size chunks therefore reproduces bit-for-bit under any scheduling.

use crate::special::normal_quantile;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform draw on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw by inversion.
    pub fn normal(&mut self) -> f64 {
        normal_quantile(self.uniform())
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.normal();
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for a named sub-experiment.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix(seed ^ splitmix(h))
}

/// Derives a seed indexed by an integer (trial number, worker index).
pub fn derive_index(seed: u64, index: u64) -> u64 {
    splitmix(seed.wrapping_add(splitmix(index.wrapping_add(0x5851_F42D_4C95_7F2D))))
}
