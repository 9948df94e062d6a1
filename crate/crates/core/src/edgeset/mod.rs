//! Open-addressing hash sets over packed canonical edges.
//!
//! [`SequentialEdgeSet`] is the single-owner set used by the sequential
//! chains. [`ConcurrentEdgeSet`] stores one 64-bit atomic word per bucket:
//! the top 8 bits are a lock byte and the low 56 bits hold the packed edge.

mod concurrent;
mod sequential;

pub use concurrent::{Busy, ConcurrentEdgeSet, LockError, Ticket};
pub use sequential::SequentialEdgeSet;

use crate::random::mix64;

/// Mask of the 56-bit payload.
pub const PAYLOAD_MASK: u64 = (1 << 56) - 1;
/// Payload of the loop `(0, 0)`, reserved as the empty marker.
pub const EMPTY: u64 = 0;
/// All-ones payload, a loop on the largest node id, reserved as the tombstone.
pub const TOMBSTONE: u64 = PAYLOAD_MASK;

/// Bucket hash of a payload.
#[inline]
pub fn hash_payload(payload: u64) -> u64 {
    mix64(payload)
}

/// Smallest power of two `>= n`, and at least 16.
pub(crate) fn table_capacity(n: usize) -> usize {
    n.max(16).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RandomStream;
    use crate::CanonicalEdge;

    #[test]
    fn hash_avalanche() {
        let mut rng = RandomStream::new(4);
        let mut total = 0u64;
        let mut samples = 0u64;
        for _ in 0..2000 {
            let x = rng.next_u64() & PAYLOAD_MASK;
            let h = hash_payload(x);
            for bit in 0..56 {
                total += (h ^ hash_payload(x ^ 1 << bit)).count_ones() as u64;
                samples += 1;
            }
        }
        let mean = total as f64 / samples as f64;
        assert!((mean - 32.0).abs() <= 8.0, "mean flipped bits {mean}");
    }

    #[test]
    fn collision_chains_stay_short() {
        let mut rng = RandomStream::new(9);
        let cap = 1usize << 18;
        let mut edges = std::collections::HashSet::new();
        while edges.len() < cap / 2 {
            edges.insert(CanonicalEdge::new(rng.index(1 << 20) as u32, rng.index(1 << 20) as u32));
        }
        let mut per_bucket = vec![0u32; cap];
        for e in &edges {
            per_bucket[hash_payload(e.pack()) as usize & (cap - 1)] += 1;
        }
        let longest = per_bucket.into_iter().max().unwrap();
        assert!(longest <= 16, "longest collision chain {longest}");
    }
}
