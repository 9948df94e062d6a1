use std::sync::Arc;

use rayon::prelude::*;

use super::deps::{Decision, DependencyTable, Status, View};
use super::WorkerPool;
use crate::chain::Counters;
use crate::graph::{CanonicalEdge, EdgeList};
use crate::source::SwitchSource;
use crate::{Error, Result};

/// Default block size: switches per task and minimum items per parallel task
/// of the other phases.
pub const DEFAULT_GRAIN: usize = 1024;

/// Result of one global switch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GlobalStats {
    pub counters: Counters,
    pub rounds: usize,
}

/// Parallel G-ES-MC.
///
/// Each global switch is announced into a [`DependencyTable`] and then
/// decided in rounds. Pending switches are split into blocks of `grain`
/// consecutive indices, each decided in index order by one task. A switch
/// sees the decisions of earlier rounds and those already made in its own
/// block; switches that still wait on an undecided predecessor are delayed
/// to the next round. The smallest pending index can always be decided, so
/// the loop terminates. The result is the sequential in-order execution, and
/// neither it nor the round count depends on the thread count.
#[derive(Debug)]
pub struct SteadyGlobalEs {
    nodes: usize,
    edges: Vec<CanonicalEdge>,
    table: DependencyTable,
    pool: Arc<WorkerPool>,
    grain: usize,
    counters: Counters,
    rounds: Vec<usize>,
}

impl SteadyGlobalEs {
    pub fn new(graph: EdgeList, threads: usize) -> Result<Self> {
        Self::with_pool(graph, Arc::new(WorkerPool::new(threads)?))
    }

    /// A chain running on a shared pool.
    pub fn with_pool(graph: EdgeList, pool: Arc<WorkerPool>) -> Result<Self> {
        if let Some(why) = graph.simplicity_violation() {
            return Err(Error::NotSimple(why));
        }
        let nodes = graph.node_count();
        let edges = graph.into_edges();
        Ok(SteadyGlobalEs {
            nodes,
            table: DependencyTable::new(edges.len()),
            edges,
            pool,
            grain: DEFAULT_GRAIN,
            counters: Counters::default(),
            rounds: Vec::new(),
        })
    }

    /// Sets the block size. Small values force fine interleavings on small
    /// graphs; a block size of one makes every round a strict snapshot.
    pub fn with_grain(mut self, grain: usize) -> Self {
        self.grain = grain.max(1);
        self
    }

    pub fn threads(&self) -> usize {
        self.pool.threads()
    }

    pub fn edges(&self) -> &[CanonicalEdge] {
        &self.edges
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Rounds used by every global switch so far.
    pub fn rounds_history(&self) -> &[usize] {
        &self.rounds
    }

    pub fn graph(&self) -> EdgeList {
        EdgeList::new(self.nodes, self.edges.clone()).expect("chain keeps node ids in range")
    }

    pub fn into_graph(self) -> EdgeList {
        EdgeList::new(self.nodes, self.edges).expect("chain keeps node ids in range")
    }

    /// One superstep: the source arranges the edges in parallel, then the
    /// drawn switches are executed.
    pub fn superstep<S: SwitchSource + Send>(&mut self, source: &mut S) -> GlobalStats {
        let SteadyGlobalEs { edges, table, pool, grain, .. } = self;
        let grain = *grain;
        let stats = pool.install(|| {
            let draw = source.next_global(edges);
            execute(edges, table, draw.len, &draw.directions, grain)
        });
        self.record(stats);
        stats
    }

    pub fn run<S: SwitchSource + Send>(&mut self, supersteps: usize, source: &mut S) -> Vec<GlobalStats> {
        (0..supersteps).map(|_| self.superstep(source)).collect()
    }

    /// Executes switches `k < len` on slots `(2k, 2k + 1)` of the current,
    /// already arranged, edge array.
    pub fn global_switch(&mut self, len: usize, directions: &[bool]) -> GlobalStats {
        let SteadyGlobalEs { edges, table, pool, grain, .. } = self;
        let grain = *grain;
        let stats = pool.install(|| execute(edges, table, len, directions, grain));
        self.record(stats);
        stats
    }

    fn record(&mut self, stats: GlobalStats) {
        self.counters.merge(stats.counters);
        self.rounds.push(stats.rounds);
    }
}

fn execute(
    edges: &mut [CanonicalEdge],
    table: &mut DependencyTable,
    len: usize,
    directions: &[bool],
    grain: usize,
) -> GlobalStats {
    table.announce(edges, len, directions, grain);
    let table = &*table;

    let mut pending: Vec<usize> = (0..len).collect();
    let mut rounds = 0;
    while !pending.is_empty() {
        rounds += 1;
        let view = View { round: rounds as u32, block_size: grain };
        let snapshot: &[CanonicalEdge] = edges;
        let before = pending.len();
        pending = pending
            .par_chunk_by(|&a, &b| a / grain == b / grain)
            .flat_map_iter(|block| {
                let mut delayed = Vec::new();
                for &k in block {
                    match table.decide_in(snapshot, k, directions[k], view) {
                        Decision::Delay => delayed.push(k),
                        d => table.set_status(k, d, view.round),
                    }
                }
                delayed
            })
            .collect();
        assert!(pending.len() < before, "a round must decide at least one switch");
    }

    let mut counters = Counters::default();
    let outcomes: Vec<(bool, bool)> = edges[..2 * len]
        .par_chunks_mut(2)
        .with_min_len(grain)
        .enumerate()
        .map(|(k, pair)| {
            let (e3, e4) = pair[0].switch_targets(pair[1], directions[k]);
            let legal = table.status(k) == Status::Legal;
            if legal {
                pair[0] = e3;
                pair[1] = e4;
            }
            (legal, e3.is_loop() || e4.is_loop())
        })
        .collect();
    for (legal, looped) in outcomes {
        match (legal, looped) {
            (true, _) => counters.accepted += 1,
            (false, true) => counters.rejected_loop += 1,
            (false, false) => counters.rejected_existing += 1,
        }
    }
    GlobalStats { counters, rounds }
}
