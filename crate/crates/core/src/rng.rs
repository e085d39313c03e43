//! Seeded uniform streams.
//!
//! The generator is ChaCha20 (a counter-based stream cipher), seeded through
//! `seed_from_u64` and split into independent substreams by stream id. The
//! `u64 -> f64` conversion is fixed here, so draws are identical on every
//! platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub struct UniformStream {
    inner: ChaCha20Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent stream `stream` under the same seed.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// A draw from the open interval (0, 1): the top 53 bits, offset by half
    /// an ulp so that neither endpoint is reachable.
    pub fn next_open01(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_open01()
    }
}
