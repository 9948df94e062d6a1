//! Autocorrelation mixing diagnostic.
//!
//! Each tracked edge yields a binary existence series, one entry per
//! superstep. For every thinning value `k` the series is subsampled at
//! supersteps `k, 2k, ...` and its 2×2 transition counts are accumulated on
//! the fly. An edge counts as independent at `k` if a first-order Markov
//! model does not beat the independence model under BIC, which reduces to
//! `G² <= ln N` for `N` transitions.

use rayon::prelude::*;

use crate::edgeset::SequentialEdgeSet;
use crate::generate::gen_pld;
use crate::graph::{CanonicalEdge, EdgeList};
use crate::random::RandomStream;
use crate::randomizer::{Randomizer, RunConfig};
use crate::report::MixingRow;
use crate::{Algorithm, Error, Result};

/// Transitions required before an edge is classified.
pub const MIN_TRANSITIONS: u64 = 8;

/// Sorted, distinct, positive thinning values in supersteps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinningSchedule(Vec<u32>);

impl ThinningSchedule {
    pub fn new(mut values: Vec<u32>) -> Result<Self> {
        if values.is_empty() || values.contains(&0) {
            return Err(Error::InvalidParameter("thinning values must be positive".into()));
        }
        values.sort_unstable();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("thinning values must be distinct".into()));
        }
        Ok(ThinningSchedule(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn max(&self) -> u32 {
        *self.0.last().expect("schedule is non-empty")
    }
}

impl Default for ThinningSchedule {
    fn default() -> Self {
        ThinningSchedule(vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 32])
    }
}

impl std::fmt::Display for ThinningSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl std::str::FromStr for ThinningSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad thinning value `{v}`")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Self::new(values)
    }
}

/// 2×2 transition counts `n_ab` of a binary series, `a` the earlier state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TransitionCounts {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl TransitionCounts {
    pub fn new(n00: u64, n01: u64, n10: u64, n11: u64) -> Self {
        TransitionCounts { n00, n01, n10, n11 }
    }

    pub fn total(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    #[inline]
    pub fn record(&mut self, from: bool, to: bool) {
        match (from, to) {
            (false, false) => self.n00 += 1,
            (false, true) => self.n01 += 1,
            (true, false) => self.n10 += 1,
            (true, true) => self.n11 += 1,
        }
    }

    /// `G² = 2 Σ n_ab ln(n_ab / E_ab)` with `E_ab = row_a · col_b / N`;
    /// empty cells contribute nothing.
    pub fn g2(&self) -> f64 {
        let n = self.total() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let cells = [[self.n00, self.n01], [self.n10, self.n11]];
        let rows = [self.n00 + self.n01, self.n10 + self.n11];
        let cols = [self.n00 + self.n10, self.n01 + self.n11];
        let mut g2 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let observed = cells[a][b] as f64;
                if observed > 0.0 {
                    let expected = rows[a] as f64 * cols[b] as f64 / n;
                    g2 += observed * (observed / expected).ln();
                }
            }
        }
        (2.0 * g2).max(0.0)
    }

    /// True if the independence model is preferred under BIC.
    pub fn is_independent(&self) -> Result<bool> {
        let n = self.total();
        if n < MIN_TRANSITIONS {
            return Err(Error::InsufficientData(n));
        }
        Ok(self.g2() <= (n as f64).ln())
    }
}

/// A chain observed by the diagnostic.
pub trait Chain {
    fn superstep(&mut self);
    /// The current edges.
    fn current_edges(&self) -> Vec<CanonicalEdge>;
}

impl Chain for Randomizer {
    fn superstep(&mut self) {
        Randomizer::superstep(self);
    }

    fn current_edges(&self) -> Vec<CanonicalEdge> {
        self.edges().into_owned()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    last: Option<bool>,
    counts: TransitionCounts,
}

/// Per tracked edge and thinning value: the last thinned state and the
/// transition counts so far.
#[derive(Clone, Debug)]
pub struct EdgeTimeSeriesCounters {
    tracked: Vec<CanonicalEdge>,
    schedule: ThinningSchedule,
    observations: Vec<u64>,
    cells: Vec<Cell>,
}

impl EdgeTimeSeriesCounters {
    pub fn new(tracked: Vec<CanonicalEdge>, schedule: ThinningSchedule) -> Self {
        let width = schedule.values().len();
        EdgeTimeSeriesCounters {
            cells: vec![Cell::default(); tracked.len() * width],
            observations: vec![0; width],
            tracked,
            schedule,
        }
    }

    pub fn tracked(&self) -> &[CanonicalEdge] {
        &self.tracked
    }

    pub fn schedule(&self) -> &ThinningSchedule {
        &self.schedule
    }

    /// Observations folded so far at thinning index `ki`.
    pub fn observations(&self, ki: usize) -> u64 {
        self.observations[ki]
    }

    pub fn counts(&self, edge: usize, ki: usize) -> TransitionCounts {
        self.cells[edge * self.schedule.values().len() + ki].counts
    }

    /// Folds the state after superstep `t >= 1` into every `k` dividing `t`.
    pub fn fold(&mut self, t: u64, exists: impl Fn(CanonicalEdge) -> bool + Sync) {
        let due: Vec<usize> = self
            .schedule
            .values()
            .iter()
            .enumerate()
            .filter(|&(_, &k)| t.is_multiple_of(k as u64))
            .map(|(ki, _)| ki)
            .collect();
        if due.is_empty() {
            return;
        }
        for &ki in &due {
            self.observations[ki] += 1;
        }
        let width = self.schedule.values().len();
        self.cells
            .par_chunks_mut(width)
            .zip(self.tracked.par_iter())
            .with_min_len(256)
            .for_each(|(row, &e)| {
                let now = exists(e);
                for &ki in &due {
                    let cell = &mut row[ki];
                    if let Some(prev) = cell.last {
                        cell.counts.record(prev, now);
                    }
                    cell.last = Some(now);
                }
            });
    }

    /// Fraction of classified edges deemed non-independent at thinning index
    /// `ki`, with the number of edges left out for lack of data.
    pub fn non_independent_fraction(&self, ki: usize) -> (f64, u64) {
        let mut dependent = 0u64;
        let mut classified = 0u64;
        let mut insufficient = 0u64;
        for edge in 0..self.tracked.len() {
            match self.counts(edge, ki).is_independent() {
                Ok(independent) => {
                    classified += 1;
                    dependent += u64::from(!independent);
                }
                Err(_) => insufficient += 1,
            }
        }
        let fraction = if classified == 0 { 0.0 } else { dependent as f64 / classified as f64 };
        (fraction, insufficient)
    }
}

/// Runs `chain` for `supersteps` supersteps and records the existence series
/// of `tracked`.
pub fn track_run<C: Chain>(
    chain: &mut C,
    supersteps: u64,
    schedule: &ThinningSchedule,
    tracked: Vec<CanonicalEdge>,
) -> EdgeTimeSeriesCounters {
    let mut counters = EdgeTimeSeriesCounters::new(tracked, schedule.clone());
    for t in 1..=supersteps {
        chain.superstep();
        if schedule.values().iter().any(|&k| t % k as u64 == 0) {
            let set = SequentialEdgeSet::from_edges(&chain.current_edges());
            counters.fold(t, |e| set.contains(e));
        }
    }
    counters
}

/// All node pairs of an `n`-node graph, for tracking every potential edge.
pub fn all_pairs(n: usize) -> Vec<CanonicalEdge> {
    (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| CanonicalEdge::new(u, v))).collect()
}

/// Settings of a paired mixing experiment on power-law graphs.
#[derive(Clone, Debug)]
pub struct MixingExperiment {
    pub nodes: usize,
    pub gamma: f64,
    pub runs: usize,
    pub supersteps: u64,
    pub schedule: ThinningSchedule,
    pub seed: u64,
    pub lazy_probability: f64,
    pub track_all: bool,
}

/// Per-run fractions of one chain, indexed `[run][ki]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingReport {
    pub algo: Algorithm,
    pub schedule: ThinningSchedule,
    pub fractions: Vec<Vec<f64>>,
    pub edges_tracked: u64,
    pub edges_insufficient: Vec<u64>,
}

impl MixingReport {
    pub fn mean(&self, ki: usize) -> f64 {
        let n = self.fractions.len();
        if n == 0 {
            return 0.0;
        }
        self.fractions.iter().map(|f| f[ki]).sum::<f64>() / n as f64
    }

    /// Sample standard deviation over runs.
    pub fn stddev(&self, ki: usize) -> f64 {
        let n = self.fractions.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean(ki);
        let ss: f64 = self.fractions.iter().map(|f| (f[ki] - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn rows(&self) -> Vec<MixingRow> {
        self.schedule
            .values()
            .iter()
            .enumerate()
            .map(|(ki, &k)| MixingRow {
                algo: self.algo.name().to_string(),
                k,
                mean_fraction_non_independent: self.mean(ki),
                stddev: self.stddev(ki),
                runs: self.fractions.len() as u64,
                edges_tracked: self.edges_tracked,
                edges_insufficient: self.edges_insufficient[ki],
            })
            .collect()
    }
}

/// Runs `algo` on `experiment.runs` power-law graphs. Run `r` starts from a
/// graph drawn with a seed derived from `(seed, r)`, so two algorithms with
/// the same experiment see the same initial graphs.
pub fn mixing_report(algo: Algorithm, experiment: &MixingExperiment) -> Result<MixingReport> {
    if algo != Algorithm::Es && algo != Algorithm::GlobalEs {
        return Err(Error::InvalidParameter(format!("mixing analysis supports es and global-es, not {algo}")));
    }
    if experiment.track_all && experiment.nodes > 512 {
        return Err(Error::InvalidParameter("tracking all pairs needs at most 512 nodes".into()));
    }
    let width = experiment.schedule.values().len();
    let runs: Vec<(Vec<f64>, Vec<u64>, u64)> = (0..experiment.runs)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let mut graph_rng = RandomStream::derive(experiment.seed, 2 * r as u64);
            let graph: EdgeList = gen_pld(experiment.nodes, experiment.gamma, &mut graph_rng)?;
            let tracked = if experiment.track_all { all_pairs(graph.node_count()) } else { graph.edges().to_vec() };
            let config = RunConfig {
                threads: 1,
                seed: RandomStream::derive(experiment.seed, 2 * r as u64 + 1).seed(),
                lazy_probability: experiment.lazy_probability,
                ..RunConfig::default()
            };
            let mut chain = Randomizer::new(algo, graph, &config)?;
            let counters = track_run(&mut chain, experiment.supersteps, &experiment.schedule, tracked);
            let (fractions, insufficient) = (0..width).map(|ki| counters.non_independent_fraction(ki)).unzip();
            Ok((fractions, insufficient, counters.tracked().len() as u64))
        })
        .collect::<Result<_>>()?;

    let mut edges_insufficient = vec![0; width];
    let mut edges_tracked = 0;
    let mut fractions = Vec::with_capacity(runs.len());
    for (f, insufficient, tracked) in runs {
        edges_tracked += tracked;
        for (total, x) in edges_insufficient.iter_mut().zip(insufficient) {
            *total += x;
        }
        fractions.push(f);
    }
    Ok(MixingReport { algo, schedule: experiment.schedule.clone(), fractions, edges_tracked, edges_insufficient })
}

/// ES-MC and G-ES-MC reports on the same initial graphs.
pub fn compare_chains(experiment: &MixingExperiment) -> Result<(MixingReport, MixingReport)> {
    Ok((mixing_report(Algorithm::Es, experiment)?, mixing_report(Algorithm::GlobalEs, experiment)?))
}
