//! Deterministic pseudo-random numbers.
//!
//! All randomness in the crate comes from [`SplitMix64`] (Steele, Lea and
//! Flood, 2014), a 64-bit counter-based generator:
//!
//! ```text
//! state  += 0x9E3779B97F4A7C15
//! z       = state
//! z       = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z       = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output  = z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping mod 2^64). The algorithm is fixed here rather than
//! taken from an external crate so that outputs never change across platforms
//! or dependency upgrades.
//!
//! Independent streams are derived with [`derive_seed`]: stream `i` of master
//! seed `s` is seeded with `mix(s ^ mix(i + 1))`, where `mix` is the output
//! function above applied to a single value. Forest tree `t` uses stream `t`,
//! so trees can be trained in any order or in parallel with identical results.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `stream`-th child generator of `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix(master ^ mix(stream.wrapping_add(1)))
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`, unbiased (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "below(0)");
        let bound = bound as u64;
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `amount` distinct elements of `items`, drawn without replacement
    /// (partial Fisher–Yates; the chosen elements end up in `items[..amount]`).
    pub fn choose_multiple<T: Copy>(&mut self, items: &mut [T], amount: usize) -> Vec<T> {
        let amount = amount.min(items.len());
        for i in 0..amount {
            let j = i + self.below(items.len() - i);
            items.swap(i, j);
        }
        items[..amount].to_vec()
    }
}
