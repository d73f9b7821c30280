//! SplitMix64, fixed bit-exactly so that every derived constant in the test
//! suite is reproducible across platforms and languages.

/// SplitMix64 stream. `state += 0x9E3779B97F4A7C15` per draw, output mixed
/// with the standard two xor-shift-multiply rounds.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` by plain modulo. The bias is < bound/2^64,
    /// irrelevant at desk scale, and keeping the draw to a single next_u64
    /// makes the stream trivially portable.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// In-place Fisher-Yates shuffle; one draw per swap, from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Derive an independent sub-stream seed from a base seed and a salt.
/// One SplitMix64 step of `seed ^ salt`; used for per-(weight, iteration)
/// parametrization seeds and the like.
pub fn mix(seed: u64, salt: u64) -> u64 {
    SplitMix64::new(seed ^ salt).next_u64()
}
