//! Seeding and the counter-based generator used by every sampler.
//!
//! Streams are portable: the generator is Philox4x32-10 with the published
//! multipliers and Weyl key increments, and every derived quantity (64-bit
//! words, floats, bounded integers, shuffles) is defined below in terms of the
//! raw 32-bit outputs. A reimplementation in another language that follows
//! these definitions reproduces every dataset bit for bit.
//!
//! Derivations:
//!
//! * `next_u64` = `(hi << 32) | lo` where `lo` is drawn first.
//! * `uniform_f64` = `(next_u64 >> 11) * 2^-53`, in `[0, 1)`.
//! * `below(n)` = Lemire's multiply-shift with rejection on `next_u64`.
//! * `shuffle` = Fisher-Yates from the last index down, `j = below(i + 1)`.

use alloc::vec::Vec;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;
const PHILOX_ROUNDS: usize = 10;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of item `index` from a master seed.
///
/// `stable_hash(s, i) = mix64(mix64(s + G) + (i + 1) * G)` with wrapping
/// arithmetic and `G = 0x9E3779B97F4A7C15`.
pub fn stable_hash(seed: u64, index: u64) -> u64 {
    let base = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// One Philox4x32-10 block: encrypts `ctr` under `key`.
pub fn philox4x32_10(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for round in 0..PHILOX_ROUNDS {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Philox4x32-10 stream keyed by a 64-bit seed.
///
/// The key is `[seed as u32, seed >> 32]`; the 128-bit counter starts at zero
/// and each block yields four words consumed in order.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: [u32; 2],
    counter: u128,
    block: [u32; 4],
    used: usize,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
            counter: 0,
            block: [0; 4],
            used: 4,
        }
    }

    /// Generator for item `index` of a run seeded with `master`.
    pub fn for_item(master: u64, index: u64) -> Self {
        Self::new(stable_hash(master, index))
    }

    fn refill(&mut self) {
        let c = self.counter;
        let ctr = [c as u32, (c >> 32) as u32, (c >> 64) as u32, (c >> 96) as u32];
        self.block = philox4x32_10(ctr, self.key);
        self.counter = self.counter.wrapping_add(1);
        self.used = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.used == 4 {
            self.refill();
        }
        let v = self.block[self.used];
        self.used += 1;
        v
    }

    pub fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_f64()
    }

    /// Unbiased integer in `[0, n)`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let mut m = u128::from(self.next_u64()) * u128::from(n);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(n);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn inclusive(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + self.index(hi - lo + 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform_f64() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// A uniformly random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.shuffle(&mut p);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors from the Random123 distribution (kat_vectors).
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0; 4], [0; 2]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = CounterRng::for_item(7, 37);
        let mut b = CounterRng::for_item(7, 37);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(stable_hash(7, 37), stable_hash(7, 38));
        assert_ne!(stable_hash(7, 0), stable_hash(8, 0));
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = CounterRng::new(1);
        let mut seen = [0usize; 7];
        for _ in 0..7000 {
            seen[rng.index(7)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
        assert!((0..1000).all(|_| rng.below(1) == 0));
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = CounterRng::new(99);
        let mut sum = 0.0;
        for _ in 0..10_000 {
            let u = rng.uniform_f64();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        assert!((sum / 10_000.0 - 0.5).abs() < 0.01);
    }
}
