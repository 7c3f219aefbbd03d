//! Counter-based random numbers keyed by `(seed, stream, counter)`.
//!
//! Every draw is a pure function of its key, so shots can be simulated in any
//! order or in parallel and still reproduce the same sequence. The algorithm,
//! with `mix` the SplitMix64 finalizer and `γ = 0x9E3779B97F4A7C15`:
//!
//! ```text
//! mix(z)   = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!            z ^= z >> 27; z *= 0x94D049BB133111EB; z ^ (z >> 31)
//! key      = mix(seed ^ mix((stream + 1) · γ))
//! word     = mix(key + (counter + 1) · γ)            (wrapping u64 arithmetic)
//! uniform  = (word >> 11) · 2⁻⁵³                      ∈ [0, 1)
//! ```
//!
//! Normal deviates use Box–Muller on two consecutive counters.

use std::f64::consts::PI;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seed for an independent sub-experiment (e.g. one hypothesis arm).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix(seed ^ mix(label.wrapping_mul(GAMMA) ^ 0xA5A5_A5A5_A5A5_A5A5))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: mix(seed ^ mix(stream.wrapping_add(1).wrapping_mul(GAMMA))),
        }
    }

    pub fn word(&self, counter: u64) -> u64 {
        mix(self.key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    /// Uniform in [0, 1).
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.word(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal from counters `counter` and `counter + 1`.
    pub fn normal(&self, counter: u64) -> f64 {
        // (0, 1] so the logarithm stays finite.
        let u1 = ((self.word(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform(counter.wrapping_add(1));
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // SplitMix64 seeded with 0 emits mix(γ), mix(2γ), ...
        assert_eq!(mix(GAMMA), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix(GAMMA.wrapping_mul(2)), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn pure_function_of_key() {
        let a = CounterRng::new(42, 7);
        let b = CounterRng::new(42, 7);
        for c in 0..100 {
            assert_eq!(a.word(c), b.word(c));
        }
        assert_ne!(CounterRng::new(42, 8).word(0), a.word(0));
        assert_ne!(CounterRng::new(43, 7).word(0), a.word(0));
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }

    #[test]
    fn uniform_and_normal_moments() {
        let n = 200_000u64;
        let (mut su, mut sn, mut sn2) = (0.0, 0.0, 0.0);
        for s in 0..n {
            let r = CounterRng::new(9, s);
            let u = r.uniform(0);
            assert!((0.0..1.0).contains(&u));
            su += u;
            let z = r.normal(1);
            sn += z;
            sn2 += z * z;
        }
        let nf = n as f64;
        assert!((su / nf - 0.5).abs() < 0.005);
        assert!((sn / nf).abs() < 0.01);
        assert!((sn2 / nf - 1.0).abs() < 0.02);
    }
}
