//! Splittable deterministic random streams.
//!
//! Every sampled check in the crate takes an explicit [`RngStream`]. A stream
//! is a ChaCha8 generator keyed from a 64-bit seed; [`RngStream::split`]
//! derives an independent child stream from the parent key and a label, so
//! concurrent work can be given disjoint streams while staying reproducible.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        let key = splitmix64(seed);
        RngStream {
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Child stream determined only by this stream's key and `label`, not by
    /// how many values have been drawn from the parent.
    pub fn split(&self, label: u64) -> RngStream {
        let key = splitmix64(self.key ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d)));
        RngStream {
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Split keyed by a string label.
    pub fn split_named(&self, label: &str) -> RngStream {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x1000_0000_01b3));
        self.split(h)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniformly random permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.index(i + 1);
            p.swap(i, j);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(7);
        let mut b = RngStream::new(7);
        for _ in 0..50 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_ignores_parent_position() {
        let a = RngStream::new(3);
        let mut b = RngStream::new(3);
        b.normal();
        assert_eq!(a.split(11).next_u64(), b.split(11).next_u64());
        assert_ne!(a.split(11).next_u64(), a.split(12).next_u64());
    }

    #[test]
    fn permutation_is_bijection() {
        let mut r = RngStream::new(1);
        let mut p = r.permutation(9);
        p.sort_unstable();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }
}
