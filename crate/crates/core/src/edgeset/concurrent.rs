use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use super::{hash_payload, table_capacity, EMPTY, PAYLOAD_MASK, TOMBSTONE};
use crate::{CanonicalEdge, MAX_THREADS};

/// The edge's bucket is locked by another thread.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Busy;

/// Why [`ConcurrentEdgeSet::lock_existing`] failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LockError {
    Busy,
    Absent,
}

/// Exclusive access to one bucket, obtained from
/// [`ConcurrentEdgeSet::lock_or_insert`] or [`ConcurrentEdgeSet::lock_existing`].
///
/// A ticket must be consumed by [`ConcurrentEdgeSet::release`] or
/// [`ConcurrentEdgeSet::erase_locked`].
#[derive(Debug)]
#[must_use = "a ticket holds a lock until released"]
pub struct Ticket {
    edge: CanonicalEdge,
    bucket: usize,
    was_present: bool,
    owner: u8,
    finalized: bool,
}

impl Ticket {
    pub fn edge(&self) -> CanonicalEdge {
        self.edge
    }

    pub fn bucket(&self) -> usize {
        self.bucket
    }

    /// True if the edge was already in the set when it was locked.
    pub fn was_present(&self) -> bool {
        self.was_present
    }

    pub fn owner(&self) -> usize {
        self.owner as usize
    }

    fn locked_word(&self) -> u64 {
        lock_word(self.owner) | self.edge.pack()
    }
}

#[inline]
fn lock_word(tid: u8) -> u64 {
    ((tid as u64) + 1) << 56
}

#[inline]
fn lock_byte(word: u64) -> u64 {
    word >> 56
}

/// Thread-safe linear-probing edge set with per-bucket lock bytes.
///
/// Every cell mutation is one compare-and-swap of the full word. Edges are
/// never relocated; erased cells become tombstones and new edges only ever
/// claim the first empty cell of their probe chain, which keeps the set free
/// of duplicates without global locking. Tombstones are reclaimed by
/// [`ConcurrentEdgeSet::rebuild`] at quiescent points.
#[derive(Debug)]
pub struct ConcurrentEdgeSet {
    cells: Vec<AtomicU64>,
    used: AtomicUsize,
    tombstones: AtomicUsize,
}

impl ConcurrentEdgeSet {
    /// An empty set with at least `capacity` buckets.
    pub fn with_capacity(capacity: usize) -> Self {
        ConcurrentEdgeSet {
            cells: (0..table_capacity(capacity)).map(|_| AtomicU64::new(EMPTY)).collect(),
            used: AtomicUsize::new(0),
            tombstones: AtomicUsize::new(0),
        }
    }

    /// A set holding `edges` with capacity the next power of two `>= 4m` (and
    /// at least `min_capacity`).
    pub fn from_edges(edges: &[CanonicalEdge], min_capacity: usize) -> Self {
        let mut set = Self::with_capacity((4 * edges.len()).max(min_capacity));
        set.fill(edges);
        set
    }

    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    /// Cells that are not empty: live edges, placeholders and tombstones.
    pub fn used(&self) -> usize {
        self.used.load(Ordering::Relaxed)
    }

    pub fn tombstones(&self) -> usize {
        self.tombstones.load(Ordering::Relaxed)
    }

    pub fn live(&self) -> usize {
        self.used() - self.tombstones()
    }

    #[inline]
    fn mask(&self) -> usize {
        self.cells.len() - 1
    }

    /// Locks `e`, inserting a locked placeholder if it is absent.
    pub fn lock_or_insert(&self, e: CanonicalEdge, tid: usize) -> Result<Ticket, Busy> {
        self.lock(e, tid, true).map_err(|_| Busy)
    }

    /// Locks `e` only if it is present.
    pub fn lock_existing(&self, e: CanonicalEdge, tid: usize) -> Result<Ticket, LockError> {
        self.lock(e, tid, false)
    }

    fn lock(&self, e: CanonicalEdge, tid: usize, insert: bool) -> Result<Ticket, LockError> {
        debug_assert!(!e.is_loop(), "loops are not stored");
        assert!(tid < MAX_THREADS, "thread id {tid} exceeds the lock byte");
        let payload = e.pack();
        let owner = tid as u8;
        let mut at = hash_payload(payload) as usize & self.mask();
        let mut probed = 0;
        loop {
            let cell = &self.cells[at];
            let word = cell.load(Ordering::Acquire);
            if word == EMPTY {
                if !insert {
                    return Err(LockError::Absent);
                }
                match cell.compare_exchange(EMPTY, lock_word(owner) | payload, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => {
                        self.used.fetch_add(1, Ordering::Relaxed);
                        return Ok(Ticket { edge: e, bucket: at, was_present: false, owner, finalized: false });
                    }
                    Err(_) => continue,
                }
            }
            if word & PAYLOAD_MASK == payload {
                if lock_byte(word) != 0 {
                    debug_assert_ne!(lock_byte(word), owner as u64 + 1, "re-entrant lock");
                    return Err(LockError::Busy);
                }
                match cell.compare_exchange(word, lock_word(owner) | payload, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => return Ok(Ticket { edge: e, bucket: at, was_present: true, owner, finalized: false }),
                    Err(_) => continue,
                }
            }
            at = (at + 1) & self.mask();
            probed += 1;
            assert!(probed <= self.cells.len(), "concurrent edge set is full");
        }
    }

    /// Turns a placeholder into a real edge, still locked. False if the edge
    /// was already present, i.e. the insertion must be rejected.
    pub fn finalize_insert(&self, t: &mut Ticket) -> bool {
        self.check(t);
        if t.was_present {
            return false;
        }
        t.finalized = true;
        true
    }

    /// Erases the locked edge, leaving a tombstone.
    pub fn erase_locked(&self, t: Ticket) {
        self.swap(&t, TOMBSTONE);
        self.tombstones.fetch_add(1, Ordering::Relaxed);
    }

    /// Unlocks the edge; a placeholder that was never finalized disappears.
    pub fn release(&self, t: Ticket) {
        if t.was_present || t.finalized {
            self.swap(&t, t.edge.pack());
        } else {
            self.swap(&t, TOMBSTONE);
            self.tombstones.fetch_add(1, Ordering::Relaxed);
        }
    }

    fn check(&self, t: &Ticket) {
        assert_eq!(self.cells[t.bucket].load(Ordering::Acquire), t.locked_word(), "stale ticket");
    }

    fn swap(&self, t: &Ticket, new: u64) {
        let ok = self.cells[t.bucket]
            .compare_exchange(t.locked_word(), new, Ordering::AcqRel, Ordering::Acquire)
            .is_ok();
        assert!(ok, "stale ticket");
    }

    /// Membership of a finalized or pre-existing edge. Meaningful at
    /// quiescent points; concurrently it is a racy snapshot.
    pub fn contains(&self, e: CanonicalEdge) -> bool {
        if e.is_loop() {
            return false;
        }
        let payload = e.pack();
        let mut at = hash_payload(payload) as usize & self.mask();
        for _ in 0..self.cells.len() {
            let word = self.cells[at].load(Ordering::Acquire);
            if word == EMPTY {
                return false;
            }
            if word & PAYLOAD_MASK == payload {
                return true;
            }
            at = (at + 1) & self.mask();
        }
        false
    }

    /// All edges in bucket order. Requires quiescence.
    pub fn snapshot(&mut self) -> Vec<CanonicalEdge> {
        self.cells
            .iter_mut()
            .map(|c| *c.get_mut())
            .filter(|&w| w != EMPTY && w != TOMBSTONE)
            .map(|w| {
                debug_assert_eq!(lock_byte(w), 0, "lock held at a quiescent point");
                CanonicalEdge::unpack(w & PAYLOAD_MASK)
            })
            .collect()
    }

    /// Clears the table and reinserts `edges`, dropping all tombstones.
    pub fn rebuild(&mut self, edges: &[CanonicalEdge]) {
        for c in &mut self.cells {
            *c.get_mut() = EMPTY;
        }
        *self.used.get_mut() = 0;
        *self.tombstones.get_mut() = 0;
        self.fill(edges);
    }

    fn fill(&mut self, edges: &[CanonicalEdge]) {
        let mask = self.mask();
        for e in edges {
            let payload = e.pack();
            let mut at = hash_payload(payload) as usize & mask;
            loop {
                let c = self.cells[at].get_mut();
                if *c == EMPTY {
                    *c = payload;
                    break;
                }
                debug_assert_ne!(*c, payload, "duplicate edge {e}");
                at = (at + 1) & mask;
            }
        }
        *self.used.get_mut() += edges.len();
    }
}
