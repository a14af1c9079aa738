//! SplitMix64, the scenario generator's only source of randomness.
//!
//! The stream is fixed by three constants (increment `0x9E3779B97F4A7C15`,
//! multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`) so that a seed
//! produces the same scenario on every platform and in every implementation
//! that follows the same draw order.

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
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in the closed range `[lo, hi]` (multiply-shift reduction).
    pub fn int_in(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty integer range");
        let span = (hi - lo) as u128 + 1;
        lo + ((self.next_u64() as u128 * span) >> 64) as u64
    }

    /// Uniform real in `[lo, hi]`; returns `lo` for a degenerate range.
    pub fn real_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index over empty range");
        self.int_in(0, n as u64 - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream_seed_zero() {
        // Published SplitMix64 outputs for seed 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn ranges_are_closed_and_respected() {
        let mut rng = SplitMix64::new(7);
        let mut seen = [false; 3];
        for _ in 0..1000 {
            let v = rng.int_in(10, 12);
            assert!((10..=12).contains(&v));
            seen[(v - 10) as usize] = true;
            let x = rng.real_in(1.0, 3.0);
            assert!((1.0..=3.0).contains(&x));
        }
        assert!(seen.iter().all(|s| *s));
        assert_eq!(rng.int_in(5, 5), 5);
        assert_eq!(rng.real_in(2.5, 2.5), 2.5);
    }
}
