//! Portable seeded randomness.
//!
//! Every random choice the toolkit makes goes through [`SplitMix64`], so a
//! perturbed dataset can be reproduced by any implementation that follows
//! these equations:
//!
//! ```text
//! mix(z):   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!           z =  z ^ (z >> 31)
//! next():   state = state + 0x9E3779B97F4A7C15;  return mix(state)
//! below(n): (next() * n) >> 64            (128-bit product)
//! ```
//!
//! All arithmetic is wrapping on unsigned 64-bit integers. Shuffles are
//! Fisher–Yates from the last element down: for `i` in `n-1..=1`,
//! `j = below(i + 1)`, swap `i` and `j`.
//!
//! Per-question seeds come from [`derive_seed`]:
//!
//! ```text
//! fnv1a(id): h = 0xCBF29CE484222325; for each UTF-8 byte b: h = (h ^ b) * 0x100000001B3
//! derive_seed(global, id) = mix(fnv1a(id) ^ mix(global))
//! ```

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Seed for one question, a pure function of the run seed and the question id.
pub fn derive_seed(global_seed: u64, question_id: &str) -> u64 {
    mix(fnv1a(question_id.as_bytes()) ^ mix(global_seed))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) has no valid result");
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// The permutation a shuffle of `n` items produces: `perm[k]` is the original
/// index of the item now at position `k`.
pub fn permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut perm);
    perm
}
