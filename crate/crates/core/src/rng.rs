//! Deterministic pseudo-random streams.
//!
//! Everything randomized in this crate (property trials, Monte Carlo
//! censuses, sampling of group elements) draws from [`SplitMix64`] streams
//! derived from a caller-supplied seed. Streams indexed by a counter make
//! results independent of worker count and platform.

/// SplitMix64 generator (Steele, Lea, Flood 2014). Passes BigCrush, tiny
/// state, and trivially seedable; enough for test-driving and Monte Carlo.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derive an independent stream for `(seed, stream)`, e.g. one per
    /// Monte Carlo sample index.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let state = Self::mix(seed).wrapping_add(Self::mix(stream).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        SplitMix64::new(Self::mix(state))
    }

    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, n)`, unbiased via rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform draw from the inclusive range `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Uniform f64 in [0, 1).
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
