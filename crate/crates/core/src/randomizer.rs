//! One front end over all four chains, driven superstep by superstep.

use std::borrow::Cow;
use std::sync::Arc;

use crate::chain::{ChainState, Counters};
use crate::graph::{CanonicalEdge, EdgeList};
use crate::parallel::{default_threads, EagerEs, SteadyGlobalEs, WorkerPool, DEFAULT_GRAIN};
use crate::source::RandomSource;
use crate::{Algorithm, Error, Result, DEFAULT_LAZY_PROBABILITY, MAX_THREADS};

/// Parameters shared by every chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub threads: usize,
    pub seed: u64,
    pub lazy_probability: f64,
    /// Minimum work per parallel task of the round-based chain.
    pub grain: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            threads: default_threads(),
            seed: 0,
            lazy_probability: DEFAULT_LAZY_PROBABILITY,
            grain: DEFAULT_GRAIN,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 || self.threads > MAX_THREADS {
            return Err(Error::InvalidParameter(format!(
                "thread count {} outside 1..={MAX_THREADS}",
                self.threads
            )));
        }
        if !(self.lazy_probability > 0.0 && self.lazy_probability < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lazy probability {} outside (0, 1)",
                self.lazy_probability
            )));
        }
        Ok(())
    }
}

/// Statistics of one superstep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub counters: Counters,
    /// Rounds of the global switch, for the round-based chain.
    pub rounds: Option<usize>,
}

/// A running chain of any algorithm.
#[derive(Debug)]
pub enum Randomizer {
    Es(ChainState, RandomSource),
    GlobalEs(ChainState, RandomSource),
    EagerEs(EagerEs<RandomSource>),
    SteadyGlobalEs(SteadyGlobalEs, RandomSource),
}

impl Randomizer {
    pub fn new(algo: Algorithm, graph: EdgeList, config: &RunConfig) -> Result<Self> {
        Self::with_pool(algo, graph, config, None)
    }

    /// Like [`Randomizer::new`], running the parallel chains on `pool`
    /// (whose size then overrides `config.threads`).
    pub fn with_pool(
        algo: Algorithm,
        graph: EdgeList,
        config: &RunConfig,
        pool: Option<Arc<WorkerPool>>,
    ) -> Result<Self> {
        config.validate()?;
        let source = || RandomSource::new(config.seed, config.lazy_probability);
        let pool = || pool.clone().map_or_else(|| WorkerPool::new(config.threads).map(Arc::new), Ok);
        Ok(match algo {
            Algorithm::Es => Randomizer::Es(ChainState::new(graph)?, source()),
            Algorithm::GlobalEs => Randomizer::GlobalEs(ChainState::new(graph)?, source()),
            Algorithm::EagerEs => Randomizer::EagerEs(EagerEs::from_seed_with_pool(graph, pool()?, config.seed)?),
            Algorithm::SteadyGlobalEs => Randomizer::SteadyGlobalEs(
                SteadyGlobalEs::with_pool(graph, pool()?)?.with_grain(config.grain),
                source(),
            ),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Randomizer::Es(..) => Algorithm::Es,
            Randomizer::GlobalEs(..) => Algorithm::GlobalEs,
            Randomizer::EagerEs(..) => Algorithm::EagerEs,
            Randomizer::SteadyGlobalEs(..) => Algorithm::SteadyGlobalEs,
        }
    }

    pub fn superstep(&mut self) -> StepStats {
        match self {
            Randomizer::Es(chain, source) => StepStats { counters: chain.es_superstep(source), rounds: None },
            Randomizer::GlobalEs(chain, source) => {
                StepStats { counters: chain.global_superstep(source), rounds: None }
            }
            Randomizer::EagerEs(chain) => StepStats { counters: chain.superstep(), rounds: None },
            Randomizer::SteadyGlobalEs(chain, source) => {
                let s = chain.superstep(source);
                StepStats { counters: s.counters, rounds: Some(s.rounds) }
            }
        }
    }

    pub fn run(&mut self, supersteps: usize) -> Vec<StepStats> {
        (0..supersteps).map(|_| self.superstep()).collect()
    }

    pub fn edges(&self) -> Cow<'_, [CanonicalEdge]> {
        match self {
            Randomizer::Es(chain, _) | Randomizer::GlobalEs(chain, _) => Cow::Borrowed(chain.edges()),
            Randomizer::EagerEs(chain) => Cow::Owned(chain.edges()),
            Randomizer::SteadyGlobalEs(chain, _) => Cow::Borrowed(chain.edges()),
        }
    }

    pub fn graph(&self) -> EdgeList {
        match self {
            Randomizer::Es(chain, _) | Randomizer::GlobalEs(chain, _) => chain.graph(),
            Randomizer::EagerEs(chain) => chain.graph(),
            Randomizer::SteadyGlobalEs(chain, _) => chain.graph(),
        }
    }
}
