//! Uniform randomization of simple undirected graphs with a fixed degree
//! sequence.
//!
//! The crate provides the edge switching Markov chain (ES-MC) and the global
//! edge switching Markov chain (G-ES-MC), each with a sequential reference
//! implementation and a shared-memory parallel one:
//!
//! * [`chain::ChainState`] runs ES-MC and G-ES-MC one switch at a time and is
//!   the correctness oracle for everything else.
//! * [`parallel::EagerEs`] is the lock-based parallel ES-MC baseline. It is
//!   fast but, for more than one thread, its transition probabilities depend
//!   on the scheduler.
//! * [`parallel::SteadyGlobalEs`] executes global switches in parallel rounds
//!   driven by a dependency table and reproduces the sequential G-ES-MC
//!   exactly, for any thread count.
//!
//! Supporting modules cover graph construction ([`graph`], [`generate`],
//! [`io`]), randomness ([`random`], [`source`]), hash sets over packed edges
//! ([`edgeset`]), a common front end ([`randomizer`]), the autocorrelation mixing diagnostic ([`mixing`]),
//! brute-force verification on tiny instances ([`verify`]), CSV reports
//! ([`report`]) and timing ([`bench`]).

pub mod bench;
pub mod chain;
pub mod edgeset;
pub mod generate;
pub mod graph;
pub mod io;
pub mod mixing;
pub mod parallel;
pub mod random;
pub mod randomizer;
pub mod report;
pub mod source;
pub mod verify;

mod error;

pub use chain::{ChainState, SwitchDescriptor, SwitchOutcome};
pub use error::{Error, Result};
pub use graph::{CanonicalEdge, DegreeSequence, EdgeList, NodeId};
pub use random::RandomStream;
pub use randomizer::{Randomizer, RunConfig, StepStats};
pub use source::{GlobalDraw, GlobalSwitch, RandomSource, ReplaySource, SwitchSource};

/// The randomization algorithms exposed by the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Sequential edge switching chain.
    Es,
    /// Sequential global edge switching chain.
    GlobalEs,
    /// Lock-based parallel ES-MC (scheduler dependent for more than one thread).
    EagerEs,
    /// Round-based parallel G-ES-MC.
    SteadyGlobalEs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Es,
        Algorithm::GlobalEs,
        Algorithm::EagerEs,
        Algorithm::SteadyGlobalEs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Es => "es",
            Algorithm::GlobalEs => "global-es",
            Algorithm::EagerEs => "eager-es",
            Algorithm::SteadyGlobalEs => "steady-global-es",
        }
    }

    /// True for the chains whose supersteps are global switches.
    pub fn is_global(self) -> bool {
        matches!(self, Algorithm::GlobalEs | Algorithm::SteadyGlobalEs)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

/// Lazy-rejection probability used when none is configured.
pub const DEFAULT_LAZY_PROBABILITY: f64 = 0.01;

/// Largest thread count supported by the lock byte of the concurrent edge set.
pub const MAX_THREADS: usize = 254;
