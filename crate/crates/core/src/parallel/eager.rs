use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::WorkerPool;
use crate::chain::{es_superstep_len, Counters, SwitchDescriptor, SwitchOutcome};
use crate::edgeset::{ConcurrentEdgeSet, Ticket};
use crate::graph::{CanonicalEdge, EdgeList};
use crate::random::RandomStream;
use crate::source::{RandomSource, SwitchSource};
use crate::{Error, Result, DEFAULT_LAZY_PROBABILITY};

/// Upper bound on the randomized spin count after a failed lock.
pub const DEFAULT_BACKOFF_CAP: usize = 1024;

#[derive(Debug)]
struct Worker<S> {
    source: S,
    /// A drawn switch postponed to the next epoch for lack of fresh cells.
    pending: Option<SwitchDescriptor>,
    remaining: usize,
    backoff: RandomStream,
    counters: Counters,
}

enum Attempt {
    Done(SwitchOutcome),
    Deferred,
}

/// Lock-based parallel ES-MC.
///
/// Every worker draws its own switches and executes them directly against a
/// [`ConcurrentEdgeSet`]: it locks both source edges, locks or inserts both
/// targets and then either commits or rolls back. A worker that finds a lock
/// taken releases everything and retries the same switch after a short
/// randomized backoff.
///
/// With one thread this is exactly the sequential ES-MC. With more threads
/// the order in which conflicting switches take effect depends on the
/// scheduler, which biases the chain; results are then not reproducible.
#[derive(Debug)]
pub struct EagerEs<S> {
    nodes: usize,
    edges: Vec<AtomicU64>,
    set: ConcurrentEdgeSet,
    pool: Arc<WorkerPool>,
    workers: Vec<Mutex<Worker<S>>>,
    backoff_cap: usize,
    counters: Counters,
}

impl EagerEs<RandomSource> {
    /// Seeds one source per thread. With a single thread the source is
    /// seeded exactly like the sequential chain's.
    pub fn from_seed(graph: EdgeList, threads: usize, seed: u64) -> Result<Self> {
        Self::from_seed_with_pool(graph, Arc::new(WorkerPool::new(threads)?), seed)
    }

    pub fn from_seed_with_pool(graph: EdgeList, pool: Arc<WorkerPool>, seed: u64) -> Result<Self> {
        let threads = pool.threads();
        let sources = if threads == 1 {
            vec![RandomSource::new(seed, DEFAULT_LAZY_PROBABILITY)]
        } else {
            (0..threads)
                .map(|w| RandomSource::from_stream(RandomStream::derive(seed, w as u64), DEFAULT_LAZY_PROBABILITY))
                .collect()
        };
        Self::with_sources(graph, pool, sources)
    }
}

impl<S: SwitchSource + Send> EagerEs<S> {
    /// One source per pool thread.
    pub fn with_sources(graph: EdgeList, pool: Arc<WorkerPool>, sources: Vec<S>) -> Result<Self> {
        if let Some(why) = graph.simplicity_violation() {
            return Err(Error::NotSimple(why));
        }
        let threads = sources.len();
        if threads != pool.threads() {
            return Err(Error::InvalidParameter(format!(
                "{threads} sources for a pool of {} threads",
                pool.threads()
            )));
        }
        let nodes = graph.node_count();
        let edges = graph.into_edges();
        // Every worker must be able to claim two fresh cells after a rebuild.
        let set = ConcurrentEdgeSet::from_edges(&edges, 4 * threads);
        let workers = sources
            .into_iter()
            .enumerate()
            .map(|(w, source)| {
                Mutex::new(Worker {
                    source,
                    pending: None,
                    remaining: 0,
                    backoff: RandomStream::derive(0x0062_6163_6b6f_6666, w as u64),
                    counters: Counters::default(),
                })
            })
            .collect();
        Ok(EagerEs {
            nodes,
            edges: edges.iter().map(|e| AtomicU64::new(e.pack())).collect(),
            set,
            pool,
            workers,
            backoff_cap: DEFAULT_BACKOFF_CAP,
            counters: Counters::default(),
        })
    }

    pub fn with_backoff_cap(mut self, cap: usize) -> Self {
        self.backoff_cap = cap.max(1);
        self
    }

    pub fn threads(&self) -> usize {
        self.pool.threads()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn edges(&self) -> Vec<CanonicalEdge> {
        self.edges.iter().map(|c| CanonicalEdge::unpack(c.load(Ordering::Acquire))).collect()
    }

    pub fn graph(&self) -> EdgeList {
        EdgeList::new(self.nodes, self.edges()).expect("chain keeps node ids in range")
    }

    pub fn contains(&self, e: CanonicalEdge) -> bool {
        self.set.contains(e)
    }

    /// The concurrent set, for inspection at quiescent points.
    pub fn edge_set(&self) -> &ConcurrentEdgeSet {
        &self.set
    }

    /// One superstep of `⌈m/2⌉` attempts, split evenly over the workers.
    pub fn superstep(&mut self) -> Counters {
        self.run(es_superstep_len(self.edges.len()))
    }

    /// Performs `attempts` switch attempts. Each drawn switch counts once,
    /// however often it had to be retried.
    pub fn run(&mut self, attempts: usize) -> Counters {
        if self.edges.len() < 2 || attempts == 0 {
            return Counters::default();
        }
        let threads = self.workers.len();
        for (w, worker) in self.workers.iter_mut().enumerate() {
            let worker = worker.get_mut().expect("worker poisoned");
            worker.remaining += attempts / threads + usize::from(w < attempts % threads);
        }

        let before = self.counters;
        loop {
            let busy = self.workers.iter_mut().any(|w| {
                let w = w.get_mut().expect("worker poisoned");
                w.remaining > 0 || w.pending.is_some()
            });
            if !busy {
                break;
            }
            let mut budget = self.epoch_budget();
            if budget < 2 {
                self.rebuild();
                budget = self.epoch_budget();
                debug_assert!(budget >= 2);
            }
            let this = &*self;
            this.pool.broadcast(|tid| this.work(tid, budget));
            if self.set.tombstones() > self.set.live() {
                self.rebuild();
            }
        }

        let mut total = Counters::default();
        for w in &mut self.workers {
            total.merge(w.get_mut().expect("worker poisoned").counters);
        }
        self.counters = total;
        Counters {
            accepted: total.accepted - before.accepted,
            rejected_loop: total.rejected_loop - before.rejected_loop,
            rejected_existing: total.rejected_existing - before.rejected_existing,
        }
    }

    /// Fresh cells each worker may claim before the next quiescent point,
    /// keeping the table at most three quarters full.
    fn epoch_budget(&self) -> usize {
        let limit = self.set.capacity() / 4 * 3;
        limit.saturating_sub(self.set.used()) / self.workers.len()
    }

    fn rebuild(&mut self) {
        let edges = self.edges();
        self.set.rebuild(&edges);
    }

    fn work(&self, tid: usize, mut budget: usize) {
        let mut guard = self.workers[tid].lock().expect("worker poisoned");
        let worker = &mut *guard;
        let m = self.edges.len();
        while budget >= 2 {
            let s = match worker.pending.take() {
                Some(s) => s,
                None if worker.remaining > 0 => {
                    worker.remaining -= 1;
                    worker.source.next_switch(m)
                }
                None => break,
            };
            match self.attempt(s, tid, &mut budget, &mut worker.backoff) {
                Attempt::Done(outcome) => worker.counters.record(outcome),
                Attempt::Deferred => {
                    worker.pending = Some(s);
                    break;
                }
            }
        }
    }

    fn backoff(&self, rng: &mut RandomStream, limit: &mut usize) {
        for _ in 0..rng.index(*limit) {
            std::hint::spin_loop();
        }
        if *limit >= self.backoff_cap {
            std::thread::yield_now();
        }
        *limit = (*limit * 2).min(self.backoff_cap);
    }

    fn release_all(&self, tickets: impl IntoIterator<Item = Ticket>) {
        for t in tickets {
            self.set.release(t);
        }
    }

    fn attempt(&self, s: SwitchDescriptor, tid: usize, budget: &mut usize, rng: &mut RandomStream) -> Attempt {
        let mut limit = 1;
        loop {
            let e1 = CanonicalEdge::unpack(self.edges[s.i].load(Ordering::Acquire));
            let e2 = CanonicalEdge::unpack(self.edges[s.j].load(Ordering::Acquire));

            let Ok(t1) = self.set.lock_existing(e1, tid) else {
                self.backoff(rng, &mut limit);
                continue;
            };
            if self.edges[s.i].load(Ordering::Acquire) != e1.pack() {
                self.set.release(t1);
                continue;
            }
            let Ok(t2) = self.set.lock_existing(e2, tid) else {
                self.set.release(t1);
                self.backoff(rng, &mut limit);
                continue;
            };
            if self.edges[s.j].load(Ordering::Acquire) != e2.pack() {
                self.release_all([t1, t2]);
                continue;
            }

            let (e3, e4) = e1.switch_targets(e2, s.g);
            if e3.is_loop() || e4.is_loop() {
                self.release_all([t1, t2]);
                return Attempt::Done(SwitchOutcome::RejectedLoop);
            }
            // Targets equal to the sources would be locked by ourselves.
            if e3 == e1 || e3 == e2 {
                self.release_all([t1, t2]);
                return Attempt::Done(SwitchOutcome::RejectedExisting);
            }
            if *budget < 2 {
                self.release_all([t1, t2]);
                return Attempt::Deferred;
            }

            let Ok(mut t3) = self.set.lock_or_insert(e3, tid) else {
                self.release_all([t1, t2]);
                self.backoff(rng, &mut limit);
                continue;
            };
            if !t3.was_present() {
                *budget -= 1;
            }
            let Ok(mut t4) = self.set.lock_or_insert(e4, tid) else {
                self.release_all([t3, t1, t2]);
                self.backoff(rng, &mut limit);
                continue;
            };
            if !t4.was_present() {
                *budget -= 1;
            }

            if t3.was_present() || t4.was_present() {
                self.release_all([t3, t4, t1, t2]);
                return Attempt::Done(SwitchOutcome::RejectedExisting);
            }
            let finalized = self.set.finalize_insert(&mut t3) && self.set.finalize_insert(&mut t4);
            debug_assert!(finalized);
            self.edges[s.i].store(e3.pack(), Ordering::Release);
            self.edges[s.j].store(e4.pack(), Ordering::Release);
            self.set.erase_locked(t1);
            self.set.erase_locked(t2);
            self.release_all([t3, t4]);
            return Attempt::Done(SwitchOutcome::Accepted);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainState;
    use crate::source::ReplaySource;

    fn e(u: u32, v: u32) -> CanonicalEdge {
        CanonicalEdge::new(u, v)
    }

    #[test]
    fn self_target_is_rejected() {
        let g = EdgeList::new(3, vec![e(0, 1), e(1, 2)]).unwrap();
        let src = ReplaySource::switches(vec![SwitchDescriptor::new(0, 1, false)]);
        let pool = Arc::new(WorkerPool::new(1).unwrap());
        let mut eager = EagerEs::with_sources(g, pool, vec![src]).unwrap();
        let c = eager.run(1);
        assert_eq!(c.rejected_existing, 1);
        assert_eq!(eager.edges(), vec![e(0, 1), e(1, 2)]);
    }

    #[test]
    fn single_thread_matches_sequential() {
        let g = crate::graph::havel_hakimi(&[3, 3, 2, 2, 2, 1, 1]).unwrap();
        let mut seq = ChainState::new(g.clone()).unwrap();
        seq.run_es(500, &mut RandomSource::new(5, 0.01));
        let mut eager = EagerEs::from_seed(g, 1, 5).unwrap();
        eager.run(500);
        assert_eq!(eager.edges(), seq.edges());
        assert_eq!(eager.counters(), seq.counters());
    }

    #[test]
    fn many_attempts_trigger_rebuilds() {
        let g = crate::graph::havel_hakimi(&[2; 12]).unwrap();
        let degrees = g.degree_sequence();
        let mut eager = EagerEs::from_seed(g, 3, 8).unwrap();
        eager.run(5_000);
        let out = eager.graph();
        assert!(out.is_simple());
        assert_eq!(out.degree_sequence(), degrees);
        assert_eq!(eager.counters().attempts(), 5_000);
        let mut seen = out.sorted_edges();
        seen.dedup();
        assert!(seen.iter().all(|&x| eager.contains(x)));
    }
}
