//! Seedable random streams, unbiased bounded integers, binomial draws and
//! uniform shuffles.

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;

/// A seedable 64-bit pseudo-random stream. Streams are single-owner; parallel
/// code derives one independent stream per worker with [`RandomStream::derive`].
#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: Pcg64Mcg,
    seed: u64,
}

/// SplitMix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            rng: Pcg64Mcg::seed_from_u64(seed),
            seed,
        }
    }

    /// A stream seeded from operating-system entropy. The seed is available
    /// through [`RandomStream::seed`] so the run can be reproduced.
    pub fn from_entropy() -> Self {
        let state = std::collections::hash_map::RandomState::new();
        let seed = std::hash::BuildHasher::hash_one(&state, std::time::SystemTime::now());
        Self::new(seed)
    }

    /// Sub-stream `id` of the master seed `seed`.
    pub fn derive(seed: u64, id: u64) -> Self {
        Self::new(mix64(seed ^ mix64(id.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform integer in `[0, bound)` by multiply-and-reject; free of modulo bias.
    #[inline]
    pub fn uniform_index(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut wide = self.next_u64() as u128 * bound as u128;
        let mut low = wide as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                wide = self.next_u64() as u128 * bound as u128;
                low = wide as u64;
            }
        }
        (wide >> 64) as u64
    }

    /// Uniform index into a slice of length `bound`.
    #[inline]
    pub fn index(&mut self, bound: usize) -> usize {
        self.uniform_index(bound as u64) as usize
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A Bernoulli(p) draw, resolved to 2^-64.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        match bernoulli_threshold(p) {
            None => true,
            Some(t) => self.next_u64() < t,
        }
    }
}

/// `None` means "always succeed".
fn bernoulli_threshold(p: f64) -> Option<u64> {
    if p >= 1.0 {
        None
    } else if p <= 0.0 {
        Some(0)
    } else {
        Some((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

/// Binomial(trials, p) as a sum of Bernoulli trials.
pub fn binomial(stream: &mut RandomStream, trials: u64, p: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p), "success probability must lie in [0, 1]");
    match bernoulli_threshold(p) {
        None => trials,
        Some(0) => 0,
        Some(t) => (0..trials).filter(|_| stream.next_u64() < t).count() as u64,
    }
}

/// Fisher–Yates shuffle.
pub fn shuffle<T>(items: &mut [T], stream: &mut RandomStream) {
    for i in (1..items.len()).rev() {
        let j = stream.index(i + 1);
        items.swap(i, j);
    }
}

/// Uniform shuffle split into `parts` independent pieces of work.
///
/// Every element is scattered into one of `parts` buckets by an independent
/// uniform draw, each bucket is Fisher–Yates shuffled, and the buckets are
/// concatenated. The result is an exactly uniform permutation and depends only
/// on the stream state and `parts`, never on how many threads execute it.
/// With `parts == 1` this is [`shuffle`].
pub fn parallel_shuffle<T>(items: &mut [T], stream: &mut RandomStream, parts: usize)
where
    T: Copy + Send + Sync,
{
    assert!(parts >= 1, "parts must be positive");
    if parts == 1 || items.len() < 2 {
        shuffle(items, stream);
        return;
    }
    let key = stream.next_u64();
    let chunk = items.len().div_ceil(parts);

    let scattered: Vec<Vec<Vec<T>>> = items
        .par_chunks(chunk)
        .enumerate()
        .map(|(worker, slice)| {
            let mut rng = RandomStream::derive(key, worker as u64);
            let mut buckets: Vec<Vec<T>> =
                (0..parts).map(|_| Vec::with_capacity(slice.len() / parts + 16)).collect();
            for &x in slice {
                buckets[rng.index(parts)].push(x);
            }
            buckets
        })
        .collect();

    let mut targets: Vec<&mut [T]> = Vec::with_capacity(parts);
    let mut rest = items;
    for b in 0..parts {
        let size: usize = scattered.iter().map(|w| w[b].len()).sum();
        let (head, tail) = rest.split_at_mut(size);
        targets.push(head);
        rest = tail;
    }

    targets.into_par_iter().enumerate().for_each(|(b, target)| {
        let mut at = 0;
        for worker in &scattered {
            let src = &worker[b];
            target[at..at + src.len()].copy_from_slice(src);
            at += src.len();
        }
        let mut rng = RandomStream::derive(key, (1 << 32) | b as u64);
        shuffle(target, &mut rng);
    });
}

/// Number of shuffle parts used by the chains for `len` items; a pure function
/// of the length so that results do not depend on the thread count.
pub fn shuffle_parts_for(len: usize) -> usize {
    if len < 1 << 16 {
        1
    } else {
        (len >> 15).min(256)
    }
}
