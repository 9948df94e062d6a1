use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::edgeset::hash_payload;
use crate::CanonicalEdge;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Erase,
    Insert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Undecided,
    Legal,
    Illegal,
}

/// Result of looking up a switch's dependencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Legal,
    Illegal,
    Delay,
}

/// One announced erase or insert. `index` is `None` for the untouched edges
/// stored at index infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DependencyTuple {
    pub edge: CanonicalEdge,
    pub index: Option<usize>,
    pub op: Op,
    pub status: Status,
}

const UNDECIDED: u8 = 0;
const LEGAL: u8 = 1;
const ILLEGAL: u8 = 2;
const STATUS_BITS: u32 = 2;

const NO_KEY: u64 = 0;
const INFINITY: u64 = u64::MAX >> 1;

fn status_of(raw: u8) -> Status {
    match raw {
        UNDECIDED => Status::Undecided,
        LEGAL => Status::Legal,
        _ => Status::Illegal,
    }
}

/// Concurrent multimap from edges to erase/insert announcements.
///
/// Cells are claimed by compare-and-swap on the key word (edge payload plus
/// one, so zero marks an empty cell) and never move. A tuple's status is the
/// status of its switch, kept once per switch together with the round that
/// decided it; tuples at index infinity are always illegal.
#[derive(Debug)]
pub struct DependencyTable {
    keys: Vec<AtomicU64>,
    meta: Vec<AtomicU64>,
    statuses: Vec<AtomicU32>,
}

/// What a switch being decided may see: decisions of earlier rounds, and
/// decisions of the current round made within its own block of
/// `block_size` consecutive indices.
#[derive(Clone, Copy, Debug)]
pub(crate) struct View {
    pub round: u32,
    pub block_size: usize,
}

impl View {
    /// Every decision is visible.
    const ALL: View = View { round: u32::MAX, block_size: usize::MAX };
}

impl DependencyTable {
    /// A table for graphs with `edge_count` edges: capacity is the next power
    /// of two `>= 4m`.
    pub fn new(edge_count: usize) -> Self {
        let cap = (4 * edge_count).max(16).next_power_of_two();
        DependencyTable {
            keys: (0..cap).map(|_| AtomicU64::new(NO_KEY)).collect(),
            meta: (0..cap).map(|_| AtomicU64::new(0)).collect(),
            statuses: Vec::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    fn mask(&self) -> usize {
        self.keys.len() - 1
    }

    /// Zero-fills the table and resets the switch statuses for `len` switches.
    pub fn clear(&mut self, len: usize, grain: usize) {
        self.keys.par_iter_mut().with_min_len(grain).for_each(|k| *k.get_mut() = NO_KEY);
        self.statuses.clear();
        self.statuses.resize_with(len, || AtomicU32::new(UNDECIDED as u32));
    }

    fn store(&self, e: CanonicalEdge, index: u64, op: Op) {
        let key = e.pack() + 1;
        let meta = index << 1 | (op == Op::Insert) as u64;
        let mut at = hash_payload(e.pack()) as usize & self.mask();
        loop {
            if self.keys[at]
                .compare_exchange(NO_KEY, key, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
            {
                self.meta[at].store(meta, Ordering::Release);
                return;
            }
            at = (at + 1) & self.mask();
        }
    }

    /// Announces the switches of an arranged edge array: switch `k < len`
    /// erases slots `2k, 2k + 1` and inserts their targets; every later slot
    /// gets an erase tuple at index infinity.
    pub fn announce(&mut self, edges: &[CanonicalEdge], len: usize, directions: &[bool], grain: usize) {
        assert!(2 * len <= edges.len() && directions.len() >= len);
        self.clear(len, grain);
        let table = &*self;
        (0..len).into_par_iter().with_min_len(grain).for_each(|k| {
            let (e1, e2) = (edges[2 * k], edges[2 * k + 1]);
            let (e3, e4) = e1.switch_targets(e2, directions[k]);
            table.store(e1, k as u64, Op::Erase);
            table.store(e2, k as u64, Op::Erase);
            table.store(e3, k as u64, Op::Insert);
            table.store(e4, k as u64, Op::Insert);
        });
        edges[2 * len..].par_iter().with_min_len(grain).for_each(|&e| table.store(e, INFINITY, Op::Erase));
    }

    #[inline]
    fn switch_status(&self, index: u64, reader: u64, view: View) -> u8 {
        if index == INFINITY {
            return ILLEGAL;
        }
        let raw = self.statuses[index as usize].load(Ordering::Acquire);
        let status = (raw & ((1 << STATUS_BITS) - 1)) as u8;
        let same_block = index as usize / view.block_size == reader as usize / view.block_size;
        if status != UNDECIDED && (raw >> STATUS_BITS < view.round || same_block) {
            status
        } else {
            UNDECIDED
        }
    }

    /// All tuples announced for `e`, in probe order.
    pub fn tuples(&self, e: CanonicalEdge) -> Vec<DependencyTuple> {
        let mut out = Vec::new();
        self.scan(e, |index, op| {
            out.push(DependencyTuple {
                edge: e,
                index: (index != INFINITY).then_some(index as usize),
                op,
                status: status_of(self.switch_status(index, 0, View::ALL)),
            })
        });
        out
    }

    /// Number of stored tuples.
    pub fn len(&self) -> usize {
        self.keys.iter().filter(|k| k.load(Ordering::Relaxed) != NO_KEY).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn scan(&self, e: CanonicalEdge, mut visit: impl FnMut(u64, Op)) {
        let key = e.pack() + 1;
        let mut at = hash_payload(e.pack()) as usize & self.mask();
        loop {
            match self.keys[at].load(Ordering::Acquire) {
                NO_KEY => return,
                k if k == key => {
                    let meta = self.meta[at].load(Ordering::Acquire);
                    let op = if meta & 1 == 1 { Op::Insert } else { Op::Erase };
                    visit(meta >> 1, op);
                }
                _ => {}
            }
            at = (at + 1) & self.mask();
        }
    }

    /// The final status of switch `k`.
    pub fn status(&self, k: usize) -> Status {
        status_of((self.statuses[k].load(Ordering::Acquire) & ((1 << STATUS_BITS) - 1)) as u8)
    }

    /// Records the decision of switch `k`, made in `round`.
    pub(crate) fn set_status(&self, k: usize, decision: Decision, round: u32) {
        let status = match decision {
            Decision::Legal => LEGAL,
            Decision::Illegal => ILLEGAL,
            Decision::Delay => return,
        };
        let old = self.statuses[k].swap(round << STATUS_BITS | status as u32, Ordering::AcqRel);
        debug_assert_eq!(old, UNDECIDED as u32, "switch {k} decided twice");
    }

    /// Decides switch `k` from all statuses recorded so far.
    ///
    /// A switch whose targets coincide with its sources would recreate them
    /// and is illegal, like a rejected existing edge in the sequential chain.
    pub fn decide_switch(&self, edges: &[CanonicalEdge], k: usize, g: bool) -> Decision {
        self.decide_in(edges, k, g, View::ALL)
    }

    /// Decides switch `k` seeing only what `view` allows.
    pub(crate) fn decide_in(&self, edges: &[CanonicalEdge], k: usize, g: bool, view: View) -> Decision {
        let (e1, e2) = (edges[2 * k], edges[2 * k + 1]);
        let (e3, e4) = e1.switch_targets(e2, g);
        if e3.is_loop() || e4.is_loop() || e3 == e1 || e3 == e2 {
            return Decision::Illegal;
        }
        let mut delay = false;
        for target in [e3, e4] {
            match self.decide_target(target, k as u64, view) {
                Decision::Illegal => return Decision::Illegal,
                Decision::Delay => delay = true,
                Decision::Legal => {}
            }
        }
        if delay {
            Decision::Delay
        } else {
            Decision::Legal
        }
    }

    fn decide_target(&self, e: CanonicalEdge, k: u64, view: View) -> Decision {
        let mut erase: Option<u64> = None;
        let mut first_insert: Option<(u64, u8)> = None;
        self.scan(e, |index, op| match op {
            Op::Erase => {
                debug_assert!(erase.is_none(), "edge {e} erased twice");
                erase = Some(index);
            }
            Op::Insert => {
                let s = self.switch_status(index, k, view);
                if s != ILLEGAL && first_insert.is_none_or(|(q, _)| index < q) {
                    first_insert = Some((index, s));
                }
            }
        });

        let mut delay = false;
        if let Some(j) = erase {
            let s = self.switch_status(j, k, view);
            if j > k || s == ILLEGAL {
                return Decision::Illegal;
            }
            delay |= j < k && s == UNDECIDED;
        }
        if let Some((q, s)) = first_insert {
            if q < k && s == LEGAL {
                return Decision::Illegal;
            }
            delay |= q < k && s == UNDECIDED;
        }
        if delay {
            Decision::Delay
        } else {
            Decision::Legal
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: u32, v: u32) -> CanonicalEdge {
        CanonicalEdge::new(u, v)
    }

    #[test]
    fn no_switches_only_infinity_tuples() {
        let edges = vec![e(0, 1), e(2, 3), e(4, 5)];
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 0, &[], 1);
        assert_eq!(t.len(), 3);
        let tuples = t.tuples(e(2, 3));
        assert_eq!(tuples.len(), 1);
        assert_eq!(tuples[0].index, None);
        assert_eq!(tuples[0].status, Status::Illegal);
    }

    #[test]
    fn full_global_switch_has_four_tuples_each() {
        let edges = vec![e(0, 1), e(2, 3), e(4, 5), e(6, 7)];
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 2, &[false, true], 1);
        assert_eq!(t.len(), 8);
        for x in &edges {
            let erases = t.tuples(*x).iter().filter(|t| t.op == Op::Erase).count();
            assert_eq!(erases, 1);
        }
    }

    #[test]
    fn target_untouched_in_graph_is_illegal() {
        // switch 0: {0,1},{2,3} g=0 -> {0,2},{1,3}; {0,2} exists and is untouched
        let edges = vec![e(0, 1), e(2, 3), e(0, 2)];
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 1, &[false], 1);
        assert_eq!(t.decide_switch(&edges, 0, false), Decision::Illegal);
    }

    #[test]
    fn competing_inserters() {
        // both switches insert {0,5}
        let edges = vec![e(0, 1), e(4, 5), e(0, 2), e(3, 5)];
        assert_eq!(e(0, 1).switch_targets(e(4, 5), true).0, e(0, 5));
        assert_eq!(e(0, 2).switch_targets(e(3, 5), true).0, e(0, 5));
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 2, &[true, true], 1);
        assert_eq!(t.decide_switch(&edges, 0, true), Decision::Legal);
        assert_eq!(t.decide_switch(&edges, 1, true), Decision::Delay);
        t.set_status(0, Decision::Legal, 1);
        assert_eq!(t.decide_switch(&edges, 1, true), Decision::Illegal);
    }

    #[test]
    fn erase_dependency_delays() {
        // switch 0 erases {0,1}; switch 1 wants to insert {0,1}
        let edges = vec![e(0, 1), e(2, 3), e(0, 4), e(1, 5)];
        assert_eq!(e(0, 4).switch_targets(e(1, 5), false), (e(0, 1), e(4, 5)));
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 2, &[false, false], 1);
        assert_eq!(t.decide_switch(&edges, 1, false), Decision::Delay);
        t.set_status(0, Decision::Legal, 1);
        assert_eq!(t.decide_switch(&edges, 1, false), Decision::Legal);
    }

    #[test]
    fn same_round_decisions_are_visible_within_a_block_only() {
        let edges = vec![e(0, 1), e(2, 3), e(0, 4), e(1, 5)];
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 2, &[false, false], 1);
        t.set_status(0, Decision::Legal, 3);
        let apart = View { round: 3, block_size: 1 };
        let together = View { round: 3, block_size: 2 };
        assert_eq!(t.decide_in(&edges, 1, false, apart), Decision::Delay);
        assert_eq!(t.decide_in(&edges, 1, false, together), Decision::Legal);
        assert_eq!(t.decide_in(&edges, 1, false, View { round: 4, block_size: 1 }), Decision::Legal);
    }

    #[test]
    fn self_targets_are_illegal() {
        let edges = vec![e(0, 1), e(1, 2)];
        let mut t = DependencyTable::new(edges.len());
        t.announce(&edges, 1, &[false], 1);
        assert_eq!(e(0, 1).switch_targets(e(1, 2), false).0, e(0, 1));
        assert_eq!(t.decide_switch(&edges, 0, false), Decision::Illegal);
    }
}
