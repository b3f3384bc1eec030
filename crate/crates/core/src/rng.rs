//! Seeding and the integer sampling primitives shared by every generator.
//!
//! All generators draw from a [`SimRng`] using only [`below`] and [`coin`],
//! so a seed fully determines every sample regardless of the `rand` version.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 output function: `z = x + 0x9E3779B97F4A7C15`, then two
/// xor-shift-multiply rounds with constants `0xBF58476D1CE4E5B9` and
/// `0x94D049BB133111EB` and a final `z ^ (z >> 31)`.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream for replicate `replicate` of an experiment: ChaCha8 seeded with
/// `mix64(master_seed ^ replicate)`.
pub fn replicate_rng(master_seed: u64, replicate: u64) -> SimRng {
    SimRng::seed_from_u64(mix64(master_seed ^ replicate))
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Uniform integer in `0..bound` by Lemire's multiply-and-reject method (no
/// modulo bias). `bound` must be positive.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, bound: u32) -> u32 {
    debug_assert!(bound > 0);
    let mut m = u64::from(rng.next_u32()) * u64::from(bound);
    let mut low = m as u32;
    if low < bound {
        let threshold = bound.wrapping_neg() % bound;
        while low < threshold {
            m = u64::from(rng.next_u32()) * u64::from(bound);
            low = m as u32;
        }
    }
    (m >> 32) as u32
}

/// Fair bit: the top bit of one 32-bit draw.
#[inline]
pub fn coin<R: RngCore + ?Sized>(rng: &mut R) -> u8 {
    (rng.next_u32() >> 31) as u8
}

/// Uniform unordered pair of distinct indices in `0..m`, returned sorted.
/// The first index is uniform on `0..m`, the second uniform on the rest.
#[inline]
pub fn distinct_pair<R: RngCore + ?Sized>(rng: &mut R, m: u32) -> (u32, u32) {
    debug_assert!(m >= 2);
    let x = below(rng, m);
    let mut y = below(rng, m - 1);
    if y >= x {
        y += 1;
    }
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}
