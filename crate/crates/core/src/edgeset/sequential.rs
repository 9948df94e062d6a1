use super::{hash_payload, table_capacity, EMPTY};
use crate::CanonicalEdge;

/// Linear-probing hash set of canonical edges with backward-shift deletion.
///
/// The load factor never exceeds 1/2; inserting beyond it doubles the table.
#[derive(Clone, Debug)]
pub struct SequentialEdgeSet {
    buckets: Vec<u64>,
    live: usize,
}

impl Default for SequentialEdgeSet {
    fn default() -> Self {
        Self::with_capacity(0)
    }
}

impl SequentialEdgeSet {
    /// A set sized for `edges` entries at load 1/2.
    pub fn with_capacity(edges: usize) -> Self {
        SequentialEdgeSet {
            buckets: vec![EMPTY; table_capacity(2 * edges)],
            live: 0,
        }
    }

    pub fn from_edges(edges: &[CanonicalEdge]) -> Self {
        let mut set = Self::with_capacity(edges.len());
        for &e in edges {
            set.insert(e);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn capacity(&self) -> usize {
        self.buckets.len()
    }

    #[inline]
    fn mask(&self) -> usize {
        self.buckets.len() - 1
    }

    #[inline]
    fn home(&self, payload: u64) -> usize {
        hash_payload(payload) as usize & self.mask()
    }

    /// Bucket holding `payload`, or the empty bucket ending its probe chain.
    #[inline]
    fn probe(&self, payload: u64) -> (usize, bool) {
        let mut at = self.home(payload);
        loop {
            match self.buckets[at] {
                EMPTY => return (at, false),
                p if p == payload => return (at, true),
                _ => at = (at + 1) & self.mask(),
            }
        }
    }

    #[inline]
    pub fn contains(&self, e: CanonicalEdge) -> bool {
        !e.is_loop() && self.probe(e.pack()).1
    }

    /// Inserts `e`; false if it was already present.
    pub fn insert(&mut self, e: CanonicalEdge) -> bool {
        debug_assert!(!e.is_loop(), "loops are not stored");
        let payload = e.pack();
        let (at, found) = self.probe(payload);
        if found {
            return false;
        }
        if 2 * (self.live + 1) > self.buckets.len() {
            self.grow();
            let (at, _) = self.probe(payload);
            self.buckets[at] = payload;
        } else {
            self.buckets[at] = payload;
        }
        self.live += 1;
        true
    }

    /// Removes `e`; false if it was absent.
    pub fn erase(&mut self, e: CanonicalEdge) -> bool {
        if e.is_loop() {
            return false;
        }
        let (mut hole, found) = self.probe(e.pack());
        if !found {
            return false;
        }
        // Shift later members of the cluster back into the hole whenever
        // their home bucket does not lie cyclically in (hole, at].
        let mask = self.mask();
        let mut at = hole;
        loop {
            at = (at + 1) & mask;
            let p = self.buckets[at];
            if p == EMPTY {
                break;
            }
            let home = self.home(p);
            let stays = if hole <= at {
                hole < home && home <= at
            } else {
                hole < home || home <= at
            };
            if !stays {
                self.buckets[hole] = p;
                hole = at;
            }
        }
        self.buckets[hole] = EMPTY;
        self.live -= 1;
        true
    }

    fn grow(&mut self) {
        let doubled = vec![EMPTY; self.buckets.len() * 2];
        let old = std::mem::replace(&mut self.buckets, doubled);
        for p in old.into_iter().filter(|&p| p != EMPTY) {
            let (at, _) = self.probe(p);
            self.buckets[at] = p;
        }
    }

    pub fn clear(&mut self) {
        self.buckets.fill(EMPTY);
        self.live = 0;
    }

    pub fn iter(&self) -> impl Iterator<Item = CanonicalEdge> + '_ {
        self.buckets.iter().filter(|&&p| p != EMPTY).map(|&p| CanonicalEdge::unpack(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RandomStream;
    use std::collections::BTreeSet;

    fn e(u: u32, v: u32) -> CanonicalEdge {
        CanonicalEdge::new(u, v)
    }

    #[test]
    fn insert_contains_erase() {
        let mut s = SequentialEdgeSet::default();
        assert!(s.insert(e(1, 2)));
        assert!(s.contains(e(2, 1)));
        assert!(!s.insert(e(1, 2)));
        assert!(!s.erase(e(3, 4)));
        assert!(s.erase(e(1, 2)));
        assert!(!s.contains(e(1, 2)));
        assert!(s.is_empty());
    }

    #[test]
    fn grows_to_keep_half_load() {
        let mut s = SequentialEdgeSet::default();
        for v in 1..=100 {
            assert!(s.insert(e(0, v)));
        }
        assert!(s.capacity() >= 256);
        assert_eq!(s.len(), 100);
        assert!((1..=100).all(|v| s.contains(e(0, v))));
    }

    #[test]
    fn churn_matches_model() {
        let mut rng = RandomStream::new(21);
        let mut s = SequentialEdgeSet::with_capacity(64);
        let mut model = BTreeSet::new();
        for _ in 0..1_000_000 {
            let a = rng.index(40) as u32;
            let b = rng.index(40) as u32;
            if a == b {
                continue;
            }
            let x = e(a, b);
            if rng.bit() {
                assert_eq!(s.insert(x), model.insert(x));
            } else {
                assert_eq!(s.erase(x), model.remove(&x));
            }
        }
        assert_eq!(s.iter().collect::<BTreeSet<_>>(), model);
        assert_eq!(s.len(), model.len());
    }
}
