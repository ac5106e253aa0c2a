//! Counter-based random number generation.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so generation
//! is order-independent: parallel consumers produce bit-identical output
//! regardless of scheduling, and no generator state is threaded through the
//! code. The mixing function is the splitmix64 finalizer applied to a
//! three-stage key chain.

#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    /// Derive an independent generator, e.g. one per Monte-Carlo trajectory.
    pub fn substream(&self, index: u64) -> Self {
        CounterRng {
            seed: splitmix64(splitmix64(self.seed) ^ index),
        }
    }

    fn word(&self, stream: u64, counter: u64) -> u64 {
        splitmix64(splitmix64(splitmix64(self.seed) ^ stream) ^ counter)
    }

    /// Uniform draw in `(0, 1]` keyed by `(stream, counter)`.
    pub fn uniform(&self, stream: u64, counter: u64) -> f64 {
        (((self.word(stream, counter) >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw keyed by `(stream, counter)`, via Box-Muller on
    /// two counter-derived uniforms.
    pub fn normal(&self, stream: u64, counter: u64) -> f64 {
        let u1 = self.uniform(stream, 2 * counter);
        let u2 = self.uniform(stream, 2 * counter + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
