//! Sequential ES-MC and G-ES-MC.
//!
//! [`ChainState`] keeps the edge array together with a hash-set mirror used
//! for the existence test. It is the performance baseline and the oracle that
//! the parallel chains are checked against.

use crate::edgeset::SequentialEdgeSet;
use crate::graph::{CanonicalEdge, DegreeSequence, EdgeList};
use crate::source::{GlobalSwitch, SwitchSource};
use crate::{Error, Result};

/// One edge switch `(i, j, g)` on array positions `i != j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwitchDescriptor {
    pub i: usize,
    pub j: usize,
    pub g: bool,
}

impl SwitchDescriptor {
    pub fn new(i: usize, j: usize, g: bool) -> Self {
        SwitchDescriptor { i, j, g }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwitchOutcome {
    Accepted,
    RejectedLoop,
    RejectedExisting,
}

impl SwitchOutcome {
    pub fn is_accepted(self) -> bool {
        self == SwitchOutcome::Accepted
    }
}

/// Outcome tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub accepted: u64,
    pub rejected_loop: u64,
    pub rejected_existing: u64,
}

impl Counters {
    #[inline]
    pub fn record(&mut self, outcome: SwitchOutcome) {
        match outcome {
            SwitchOutcome::Accepted => self.accepted += 1,
            SwitchOutcome::RejectedLoop => self.rejected_loop += 1,
            SwitchOutcome::RejectedExisting => self.rejected_existing += 1,
        }
    }

    pub fn attempts(&self) -> u64 {
        self.accepted + self.rejected_loop + self.rejected_existing
    }

    pub fn merge(&mut self, other: Counters) {
        self.accepted += other.accepted;
        self.rejected_loop += other.rejected_loop;
        self.rejected_existing += other.rejected_existing;
    }

    pub fn from_outcomes(outcomes: &[SwitchOutcome]) -> Self {
        let mut c = Counters::default();
        outcomes.iter().for_each(|&o| c.record(o));
        c
    }
}

/// Decides a switch of `e1` and `e2` against an existence predicate.
#[inline]
pub(crate) fn classify(
    e1: CanonicalEdge,
    e2: CanonicalEdge,
    g: bool,
    exists: impl Fn(CanonicalEdge) -> bool,
) -> (SwitchOutcome, CanonicalEdge, CanonicalEdge) {
    let (e3, e4) = e1.switch_targets(e2, g);
    let outcome = if e3.is_loop() || e4.is_loop() {
        SwitchOutcome::RejectedLoop
    } else if exists(e3) || exists(e4) {
        SwitchOutcome::RejectedExisting
    } else {
        SwitchOutcome::Accepted
    };
    (outcome, e3, e4)
}

/// Number of single-switch attempts forming one ES-MC superstep.
pub fn es_superstep_len(edge_count: usize) -> usize {
    edge_count.div_ceil(2)
}

/// State of a sequential chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    nodes: usize,
    edges: Vec<CanonicalEdge>,
    set: SequentialEdgeSet,
    counters: Counters,
    supersteps: u64,
}

impl ChainState {
    /// Starts a chain on a simple graph.
    pub fn new(graph: EdgeList) -> Result<Self> {
        if let Some(why) = graph.simplicity_violation() {
            return Err(Error::NotSimple(why));
        }
        let nodes = graph.node_count();
        let edges = graph.into_edges();
        let set = SequentialEdgeSet::from_edges(&edges);
        Ok(ChainState { nodes, edges, set, counters: Counters::default(), supersteps: 0 })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[CanonicalEdge] {
        &self.edges
    }

    pub fn contains(&self, e: CanonicalEdge) -> bool {
        self.set.contains(e)
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn supersteps(&self) -> u64 {
        self.supersteps
    }

    pub fn graph(&self) -> EdgeList {
        EdgeList::new(self.nodes, self.edges.clone()).expect("chain keeps node ids in range")
    }

    pub fn into_graph(self) -> EdgeList {
        EdgeList::new(self.nodes, self.edges).expect("chain keeps node ids in range")
    }

    /// Applies one edge switch.
    pub fn apply_switch(&mut self, s: SwitchDescriptor) -> SwitchOutcome {
        debug_assert!(s.i != s.j, "a switch needs two distinct positions");
        let (e1, e2) = (self.edges[s.i], self.edges[s.j]);
        let set = &self.set;
        let (outcome, e3, e4) = classify(e1, e2, s.g, |e| set.contains(e));
        if outcome.is_accepted() {
            self.set.erase(e1);
            self.set.erase(e2);
            self.set.insert(e3);
            self.set.insert(e4);
            self.edges[s.i] = e3;
            self.edges[s.j] = e4;
        }
        self.counters.record(outcome);
        outcome
    }

    /// Draws and applies `num_switches` single switches.
    pub fn run_es<S: SwitchSource>(&mut self, num_switches: usize, source: &mut S) -> Counters {
        let before = self.counters;
        if self.edges.len() >= 2 {
            for _ in 0..num_switches {
                let s = source.next_switch(self.edges.len());
                self.apply_switch(s);
            }
        }
        delta(before, self.counters)
    }

    /// One ES-MC superstep of `⌈m/2⌉` attempts.
    pub fn es_superstep<S: SwitchSource>(&mut self, source: &mut S) -> Counters {
        let c = self.run_es(es_superstep_len(self.edges.len()), source);
        self.supersteps += 1;
        c
    }

    /// One G-ES-MC superstep: the source arranges the edge array, then the
    /// first `ℓ` consecutive slot pairs are switched in order.
    pub fn global_superstep<S: SwitchSource>(&mut self, source: &mut S) -> Counters {
        let draw = source.next_global(&mut self.edges);
        let outcomes = self.execute_arranged(draw.len, &draw.directions);
        self.supersteps += 1;
        Counters::from_outcomes(&outcomes)
    }

    pub fn run_global_es<S: SwitchSource>(&mut self, supersteps: usize, source: &mut S) -> Counters {
        let mut total = Counters::default();
        for _ in 0..supersteps {
            total.merge(self.global_superstep(source));
        }
        total
    }

    /// Switches slots `(2k, 2k + 1)` with direction `directions[k]` for
    /// `k < len`, in order.
    pub fn execute_arranged(&mut self, len: usize, directions: &[bool]) -> Vec<SwitchOutcome> {
        assert!(2 * len <= self.edges.len() && directions.len() >= len);
        (0..len)
            .map(|k| self.apply_switch(SwitchDescriptor::new(2 * k, 2 * k + 1, directions[k])))
            .collect()
    }

    /// Executes a global switch in place: switch `k` acts on positions
    /// `order[2k]` and `order[2k + 1]`. The array is not rearranged.
    pub fn apply_global_switch(&mut self, gs: &GlobalSwitch) -> Vec<SwitchOutcome> {
        assert!(gs.is_valid_for(self.edges.len()), "global switch does not fit the graph");
        (0..gs.len)
            .map(|k| {
                self.apply_switch(SwitchDescriptor::new(gs.order[2 * k], gs.order[2 * k + 1], gs.directions[k]))
            })
            .collect()
    }

    /// Checks simplicity, the array/set mirror and, if given, the degrees.
    pub fn check_invariants(&self, degrees: Option<&DegreeSequence>) -> std::result::Result<(), String> {
        let graph = self.graph();
        if let Some(why) = graph.simplicity_violation() {
            return Err(why);
        }
        if self.set.len() != self.edges.len() || !self.edges.iter().all(|&e| self.set.contains(e)) {
            return Err("edge set and edge array disagree".into());
        }
        if let Some(d) = degrees {
            if &graph.degree_sequence() != d {
                return Err("degree sequence changed".into());
            }
        }
        Ok(())
    }
}

fn delta(before: Counters, after: Counters) -> Counters {
    Counters {
        accepted: after.accepted - before.accepted,
        rejected_loop: after.rejected_loop - before.rejected_loop,
        rejected_existing: after.rejected_existing - before.rejected_existing,
    }
}

/// The direction bit that undoes an accepted switch of `e1` and `e2`
/// (in that order) which produced `e3` and `e4`.
///
/// Four distinct endpoints admit three perfect matchings; from `{e3, e4}` the
/// two directions reach the other two, so exactly one restores `{e1, e2}`.
pub fn restoring_direction(e1: CanonicalEdge, e2: CanonicalEdge, e3: CanonicalEdge, e4: CanonicalEdge) -> bool {
    let restores = |g| {
        let (a, b) = e3.switch_targets(e4, g);
        (a, b) == (e1, e2) || (a, b) == (e2, e1)
    };
    debug_assert!(restores(false) != restores(true), "exactly one direction restores");
    restores(true)
}

/// Builds the global switch that undoes `gs`.
///
/// `before` is the edge array `gs` was applied to and `outcomes` its result.
/// The inverse visits the same position pairs in reverse order; accepted
/// switches get their restoring direction and rejected ones are repeated
/// as they were, which again rejects them.
pub fn inverse_global_switch(gs: &GlobalSwitch, outcomes: &[SwitchOutcome], before: &[CanonicalEdge]) -> GlobalSwitch {
    assert_eq!(outcomes.len(), gs.len);
    assert!(gs.is_valid_for(before.len()));
    let mut order = gs.order.clone();
    let mut directions = Vec::with_capacity(gs.len);
    for k in (0..gs.len).rev() {
        let (i, j) = (gs.order[2 * k], gs.order[2 * k + 1]);
        let kk = gs.len - 1 - k;
        order[2 * kk] = i;
        order[2 * kk + 1] = j;
        let g = if outcomes[k].is_accepted() {
            let (e1, e2) = (before[i], before[j]);
            let (e3, e4) = e1.switch_targets(e2, gs.directions[k]);
            restoring_direction(e1, e2, e3, e4)
        } else {
            gs.directions[k]
        };
        directions.push(g);
    }
    GlobalSwitch { order, len: gs.len, directions }
}
