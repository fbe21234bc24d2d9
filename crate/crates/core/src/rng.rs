//! Small deterministic PRNG and stable hashing.
//!
//! Everything seeded goes through this module so that runs are reproducible
//! bit-for-bit across platforms, independent of the standard library's
//! randomized hashers.

/// SplitMix64: tiny, fast, and good enough for sampling and initialization.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound). `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Modulo bias is irrelevant at the bounds used here (tiny vs 2^64).
        self.next_u64() % bound
    }
}

/// SplitMix64 finalizer; also usable as a standalone integer mixer.
pub fn mix64(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive a component seed from a master seed and a component name.
pub fn component_seed(master: u64, component: &str) -> u64 {
    mix64(master ^ fnv1a64(component.as_bytes()))
}

/// Deterministic score in [0, 1) for a (seed, a, b) triple.
pub fn hash_score(seed: u64, a: u64, b: u64) -> f64 {
    let z = mix64(seed ^ mix64(a.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(b)));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn next_f64_in_unit_interval() {
        let mut r = SplitMix64::new(123);
        for _ in 0..1000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn component_seeds_differ() {
        assert_ne!(component_seed(1, "rnd"), component_seed(1, "hkv"));
        assert_ne!(component_seed(1, "rnd"), component_seed(2, "rnd"));
    }

    #[test]
    fn hash_score_deterministic_and_spread() {
        assert_eq!(hash_score(5, 10, 20), hash_score(5, 10, 20));
        assert_ne!(hash_score(5, 10, 20), hash_score(5, 10, 21));
        assert_ne!(hash_score(5, 10, 20), hash_score(6, 10, 20));
    }
}
