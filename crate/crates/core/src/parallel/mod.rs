//! Shared-memory parallel chains.
//!
//! [`EagerEs`] is the lock-based parallel ES-MC. With more than one thread its
//! transition probabilities depend on the scheduler, so it does not faithfully
//! implement ES-MC; it exists as a performance baseline.
//!
//! [`SteadyGlobalEs`] executes each global switch in rounds driven by a
//! [`DependencyTable`] and yields exactly the graph of the sequential
//! in-order execution, independent of the thread count.

mod deps;
mod eager;
mod steady;

pub use deps::{Decision, DependencyTable, DependencyTuple, Op, Status};
pub use eager::{EagerEs, DEFAULT_BACKOFF_CAP};
pub use steady::{GlobalStats, SteadyGlobalEs, DEFAULT_GRAIN};

use crate::{Error, Result, MAX_THREADS};

/// A fixed pool of worker threads.
#[derive(Debug)]
pub struct WorkerPool {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl WorkerPool {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 || threads > MAX_THREADS {
            return Err(Error::InvalidParameter(format!(
                "thread count {threads} outside 1..={MAX_THREADS}"
            )));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("edgeswitch-{i}"))
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        Ok(WorkerPool { pool, threads })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Runs `f` inside the pool so that nested rayon work uses its threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    /// Runs `f(worker)` once on every worker thread and waits for all.
    pub fn broadcast<R: Send>(&self, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
        self.pool.broadcast(|ctx| f(ctx.index()))
    }
}

/// Available hardware parallelism capped at [`MAX_THREADS`].
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get()).min(MAX_THREADS)
}
