//! Counter-based pseudo-random generator.
//!
//! Output `i` of a stream is `mix(key + i * GAMMA)` with the SplitMix64
//! finalizer, so any draw can be computed from `(seed, index)` alone.
//! Monte Carlo samplers derive one substream per sample index, which makes
//! estimates reproducible regardless of evaluation order or sharding.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seedable counter-mode generator (SplitMix64 finalizer).
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Root stream for a seed.
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: mix(seed ^ GAMMA),
            counter: 0,
        }
    }

    /// Substream `index` of `seed`; independent of all other indices.
    pub fn substream(seed: u64, index: u64) -> Self {
        CounterRng {
            key: mix(mix(seed ^ GAMMA) ^ index.wrapping_mul(GAMMA)),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)));
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw.
    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform in `0..n` (n > 0). Modulo bias is negligible for desk-scale n.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
