//! Instance generators and checks shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use edgeswitch::chain::SwitchOutcome;
use edgeswitch::edgeset::{ConcurrentEdgeSet, LockError};
use edgeswitch::generate::gen_gnp;
use edgeswitch::graph::havel_hakimi;
use edgeswitch::parallel::{SteadyGlobalEs, WorkerPool};
use edgeswitch::random::{binomial, shuffle};
use edgeswitch::{CanonicalEdge, ChainState, EdgeList, GlobalSwitch, RandomStream, ReplaySource};

/// The Havel–Hakimi realization of the degrees of a random `G(n, p)` with
/// `2 <= n <= max_nodes`, so the degree sequence is graphical and random.
pub fn random_instance(rng: &mut RandomStream, max_nodes: usize) -> EdgeList {
    loop {
        let n = 2 + rng.index(max_nodes - 1);
        let p = 0.05 + 0.9 * rng.unit_f64();
        let g = gen_gnp(n, p, rng).expect("valid parameters");
        if g.edge_count() >= 2 {
            return havel_hakimi(&g.degree_sequence()).expect("degrees of a graph are graphical");
        }
    }
}

/// A uniform permutation, `ℓ ~ Binomial(⌊m/2⌋, 1 - pl)` and random bits.
pub fn random_global_switch(rng: &mut RandomStream, m: usize, pl: f64) -> GlobalSwitch {
    let mut order: Vec<usize> = (0..m).collect();
    shuffle(&mut order, rng);
    let len = binomial(rng, (m / 2) as u64, 1.0 - pl) as usize;
    let directions = (0..len).map(|_| rng.bit()).collect();
    GlobalSwitch { order, len, directions }
}

pub fn sorted(edges: &[CanonicalEdge]) -> Vec<CanonicalEdge> {
    let mut v = edges.to_vec();
    v.sort_unstable();
    v
}

/// The in-order sequential execution of `gs` on the arranged array.
pub fn oracle_global_switch(graph: &EdgeList, gs: &GlobalSwitch) -> (Vec<CanonicalEdge>, Vec<SwitchOutcome>) {
    let mut edges = graph.edges().to_vec();
    gs.arrange(&mut edges);
    let mut chain = ChainState::new(EdgeList::new(graph.node_count(), edges).unwrap()).unwrap();
    let outcomes = chain.execute_arranged(gs.len, &gs.directions);
    (chain.edges().to_vec(), outcomes)
}

/// Runs `globals` with the round-based chain on a pool of `threads`.
pub fn steady_run(graph: &EdgeList, globals: &[GlobalSwitch], threads: usize, grain: usize) -> SteadyGlobalEs {
    let pool = Arc::new(WorkerPool::new(threads).unwrap());
    let mut chain = SteadyGlobalEs::with_pool(graph.clone(), pool).unwrap().with_grain(grain);
    let mut source = ReplaySource::globals(globals.to_vec());
    chain.run(globals.len(), &mut source);
    chain
}

/// Result of [`concurrent_set_stress`].
pub struct StressReport {
    pub operations: usize,
    pub mismatches: usize,
    pub final_matches: bool,
}

/// Hammers one concurrent set from `threads` threads.
///
/// Each thread owns a key range and keeps a sequential shadow of it; every
/// insert, erase, aborted insert and lookup on its own keys must agree with
/// the shadow. Threads also lock and release keys of other ranges, which
/// creates contention without changing membership. At the end the set must
/// hold exactly the union of the shadows.
pub fn concurrent_set_stress(threads: usize, total_ops: usize, seed: u64) -> StressReport {
    const KEYS_PER_THREAD: u32 = 4096;
    let set = ConcurrentEdgeSet::with_capacity(4 * total_ops);
    let key = |t: usize, k: u32| CanonicalEdge::new(t as u32, threads as u32 + k);
    let per_thread = total_ops / threads;

    let results: Vec<(usize, BTreeSet<CanonicalEdge>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let set = &set;
                scope.spawn(move || {
                    let mut rng = RandomStream::derive(seed, t as u64);
                    let mut shadow = BTreeSet::new();
                    let mut mismatches = 0;
                    for _ in 0..per_thread {
                        let op = rng.index(100);
                        if op < 15 {
                            let other = rng.index(threads);
                            let e = key(other, rng.index(KEYS_PER_THREAD as usize) as u32);
                            if let Ok(ticket) = set.lock_existing(e, t) {
                                set.release(ticket);
                            }
                            continue;
                        }
                        let e = key(t, rng.index(KEYS_PER_THREAD as usize) as u32);
                        let present = shadow.contains(&e);
                        let ok = if op < 50 {
                            let mut ticket = retry(|| set.lock_or_insert(e, t).ok());
                            let fresh = set.finalize_insert(&mut ticket);
                            set.release(ticket);
                            shadow.insert(e);
                            fresh == !present
                        } else if op < 80 {
                            match retry(|| match set.lock_existing(e, t) {
                                Err(LockError::Busy) => None,
                                other => Some(other),
                            }) {
                                Ok(ticket) => {
                                    set.erase_locked(ticket);
                                    shadow.remove(&e)
                                }
                                Err(_) => !present,
                            }
                        } else if op < 90 {
                            let ticket = retry(|| set.lock_or_insert(e, t).ok());
                            let ok = ticket.was_present() == present;
                            set.release(ticket);
                            ok
                        } else {
                            // Only foreign lockers may hold our key; they never change membership.
                            set.contains(e) == present
                        };
                        mismatches += usize::from(!ok);
                    }
                    (mismatches, shadow)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("stress thread panicked")).collect()
    });

    let mut set = set;
    let mut expected = BTreeSet::new();
    let mut mismatches = 0;
    for (m, shadow) in results {
        mismatches += m;
        expected.extend(shadow);
    }
    let actual: BTreeSet<CanonicalEdge> = set.snapshot().into_iter().collect();
    StressReport { operations: per_thread * threads, mismatches, final_matches: actual == expected }
}

fn retry<T>(mut f: impl FnMut() -> Option<T>) -> T {
    loop {
        if let Some(x) = f() {
            return x;
        }
        std::thread::yield_now();
    }
}
