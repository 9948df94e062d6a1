//! Brute-force verification on tiny instances: enumeration of all graphs with
//! a degree sequence, exact ES-MC transition counts and chi-square tests of
//! sampled distributions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::chain::{ChainState, SwitchDescriptor};
use crate::graph::{havel_hakimi, CanonicalEdge, EdgeList};
use crate::parallel::WorkerPool;
use crate::random::RandomStream;
use crate::randomizer::{Randomizer, RunConfig};
use crate::report::HistogramRow;
use crate::{Algorithm, Error, Result};

/// Largest node count [`enumerate_graphs`] accepts.
pub const MAX_ENUMERATION_NODES: usize = 8;

/// A labeled simple graph as its sorted canonical edge list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalGraphKey(Vec<CanonicalEdge>);

impl CanonicalGraphKey {
    pub fn from_edges(edges: &[CanonicalEdge]) -> Self {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        CanonicalGraphKey(sorted)
    }

    pub fn edges(&self) -> &[CanonicalEdge] {
        &self.0
    }
}

impl std::fmt::Display for CanonicalGraphKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| format!("{}-{}", e.u(), e.v())).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Every labeled simple graph realizing a degree sequence.
#[derive(Clone, Debug)]
pub struct StateSpace {
    nodes: usize,
    states: Vec<CanonicalGraphKey>,
    index: HashMap<CanonicalGraphKey, usize>,
}

impl StateSpace {
    fn from_states(nodes: usize, mut states: Vec<CanonicalGraphKey>) -> Self {
        states.sort_unstable();
        let index = states.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        StateSpace { nodes, states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn states(&self) -> &[CanonicalGraphKey] {
        &self.states
    }

    pub fn index_of(&self, key: &CanonicalGraphKey) -> Option<usize> {
        self.index.get(key).copied()
    }
}

fn check_enumerable(degrees: &[u32]) -> Result<()> {
    let n = degrees.len();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge(format!("{n} nodes, at most {MAX_ENUMERATION_NODES} supported")));
    }
    Ok(())
}

fn node_pairs(n: usize) -> Vec<CanonicalEdge> {
    (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| CanonicalEdge::new(u, v))).collect()
}

/// All labeled simple graphs with exactly the given degrees, by
/// backtracking over node pairs in lexicographic order.
pub fn enumerate_graphs(degrees: &[u32]) -> Result<StateSpace> {
    check_enumerable(degrees)?;
    let n = degrees.len();
    let pairs = node_pairs(n);
    // last_pair[u]: index of the last pair touching u; afterwards u is final.
    let mut last_pair = vec![None; n];
    for (i, p) in pairs.iter().enumerate() {
        last_pair[p.u() as usize] = Some(i);
        last_pair[p.v() as usize] = Some(i);
    }
    let mut finishing: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    for (u, last) in last_pair.iter().enumerate() {
        if let Some(i) = last {
            finishing[*i].push(u);
        }
    }
    // A node without pairs (n = 1) must have degree zero.
    if n == 1 && degrees[0] != 0 {
        return Ok(StateSpace::from_states(n, Vec::new()));
    }

    struct Search<'a> {
        pairs: &'a [CanonicalEdge],
        finishing: &'a [Vec<usize>],
        residual: Vec<u32>,
        chosen: Vec<CanonicalEdge>,
        out: Vec<CanonicalGraphKey>,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize) {
            if i == self.pairs.len() {
                if self.residual.iter().all(|&r| r == 0) {
                    self.out.push(CanonicalGraphKey(self.chosen.clone()));
                }
                return;
            }
            let p = self.pairs[i];
            let (u, v) = (p.u() as usize, p.v() as usize);
            for take in [true, false] {
                if take {
                    if self.residual[u] == 0 || self.residual[v] == 0 {
                        continue;
                    }
                    self.residual[u] -= 1;
                    self.residual[v] -= 1;
                    self.chosen.push(p);
                }
                if self.finishing[i].iter().all(|&w| self.residual[w] == 0) {
                    self.go(i + 1);
                }
                if take {
                    self.chosen.pop();
                    self.residual[u] += 1;
                    self.residual[v] += 1;
                }
            }
        }
    }

    let mut search = Search {
        pairs: &pairs,
        finishing: &finishing,
        residual: degrees.to_vec(),
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.go(0);
    Ok(StateSpace::from_states(n, search.out))
}

/// The same state space by filtering every subset of node pairs. Exponential
/// in `n(n-1)/2`; the reference for [`enumerate_graphs`].
pub fn enumerate_graphs_brute_force(degrees: &[u32]) -> Result<StateSpace> {
    let n = degrees.len();
    if n > 6 {
        return Err(Error::TooLarge(format!("{n} nodes, brute force supports at most 6")));
    }
    let pairs = node_pairs(n);
    let states = (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let mut d = vec![0u32; n];
            let chosen: Vec<CanonicalEdge> = (0..pairs.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| pairs[b])
                .inspect(|e| {
                    d[e.u() as usize] += 1;
                    d[e.v() as usize] += 1;
                })
                .collect();
            (d == degrees).then_some(CanonicalGraphKey(chosen))
        })
        .collect();
    Ok(StateSpace::from_states(n, states))
}

/// For one state, how many ordered switch descriptors `(i, j, g)` with
/// `i != j` lead to each successor; rejected switches count for the state
/// itself. Edges are indexed in the key's sorted order.
pub fn exact_es_transition_counts(nodes: usize, state: &CanonicalGraphKey) -> Result<BTreeMap<CanonicalGraphKey, u64>> {
    let m = state.edges().len();
    let start = ChainState::new(EdgeList::new(nodes, state.edges().to_vec())?)?;
    let mut counts = BTreeMap::new();
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            for g in [false, true] {
                let mut chain = start.clone();
                chain.apply_switch(SwitchDescriptor::new(i, j, g));
                *counts.entry(CanonicalGraphKey::from_edges(chain.edges())).or_insert(0) += 1;
            }
        }
    }
    Ok(counts)
}

/// Transition counts between all states, `matrix[a][b]` from `a` to `b`.
pub fn transition_matrix(space: &StateSpace) -> Result<Vec<Vec<u64>>> {
    space
        .states()
        .iter()
        .map(|s| {
            let mut row = vec![0; space.len()];
            for (key, c) in exact_es_transition_counts(space.node_count(), s)? {
                row[space.index_of(&key).ok_or(Error::UnknownState)?] = c;
            }
            Ok(row)
        })
        .collect()
}

/// True if every state reaches every other one.
pub fn is_strongly_connected(matrix: &[Vec<u64>]) -> bool {
    let n = matrix.len();
    if n == 0 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                let edge = if forward { matrix[a][b] } else { matrix[b][a] };
                if edge > 0 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Sample counts aligned with a [`StateSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self, space: &StateSpace) -> Vec<HistogramRow> {
        self.counts
            .iter()
            .zip(space.states())
            .enumerate()
            .map(|(i, (&count, key))| HistogramRow { state: i as u64, edges: key.to_string(), count })
            .collect()
    }
}

/// Settings of [`sample_distribution`].
#[derive(Clone, Copy, Debug)]
pub struct SamplingConfig {
    pub supersteps: usize,
    pub samples: usize,
    pub seed: u64,
    /// Pool size for the parallel chains; samples also run on this pool.
    pub threads: usize,
    pub lazy_probability: f64,
}

/// Runs `samples` independent chains from the Havel–Hakimi realization of
/// `degrees` and counts the final states.
///
/// Sample `s` uses a seed derived from `(seed, s)`, so the histogram does not
/// depend on how samples are scheduled. Sequential chains run in parallel
/// over samples; the parallel chains run one sample at a time on a shared
/// pool, with a block size of one.
pub fn sample_distribution(algo: Algorithm, degrees: &[u32], space: &StateSpace, config: &SamplingConfig) -> Result<Histogram> {
    let start = havel_hakimi(degrees)?;
    let pool = Arc::new(WorkerPool::new(config.threads)?);
    let run_config = RunConfig {
        threads: config.threads,
        seed: 0,
        lazy_probability: config.lazy_probability,
        grain: 1,
    };
    let sample = |s: usize, pool: Option<Arc<WorkerPool>>| {
        let cfg = RunConfig { seed: RandomStream::derive(config.seed, s as u64).seed(), ..run_config };
        let mut chain = Randomizer::with_pool(algo, start.clone(), &cfg, pool)?;
        chain.run(config.supersteps);
        space.index_of(&CanonicalGraphKey::from_edges(&chain.edges())).ok_or(Error::UnknownState)
    };
    let indices: Vec<usize> = match algo {
        Algorithm::Es | Algorithm::GlobalEs => {
            pool.install(|| (0..config.samples).into_par_iter().map(|s| sample(s, None)).collect::<Result<_>>())?
        }
        // A parallel loop over these would let workers blocked inside a chain
        // steal further samples without bound. One sequential loop inside the
        // pool avoids both that and a hand-off per superstep.
        Algorithm::EagerEs | Algorithm::SteadyGlobalEs => pool.install(|| {
            (0..config.samples).map(|s| sample(s, Some(pool.clone()))).collect::<Result<_>>()
        })?,
    };
    let mut counts = vec![0; space.len()];
    for i in indices {
        counts[i] += 1;
    }
    Ok(Histogram { counts })
}

/// Pearson goodness of fit against the uniform distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    /// The `1 - alpha` quantile of χ²(dof).
    pub critical: f64,
    pub passed: bool,
}

pub fn chi_square_uniformity(hist: &Histogram, alpha: f64) -> Result<ChiSquareResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("significance level {alpha} outside (0, 1)")));
    }
    let states = hist.counts.len();
    if states == 0 {
        return Err(Error::InvalidParameter("empty state space".into()));
    }
    let dof = states - 1;
    let total = hist.total() as f64;
    if dof == 0 {
        return Ok(ChiSquareResult { statistic: 0.0, dof, critical: 0.0, passed: true });
    }
    let expected = total / states as f64;
    let statistic = if total == 0.0 {
        0.0
    } else {
        hist.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
    };
    let critical = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(1.0 - alpha);
    Ok(ChiSquareResult { statistic, dof, critical, passed: statistic <= critical })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_space_sizes() {
        assert_eq!(enumerate_graphs(&[2, 2, 2]).unwrap().len(), 1);
        assert_eq!(enumerate_graphs(&[1, 1, 1, 1]).unwrap().len(), 3);
        assert_eq!(enumerate_graphs(&[2, 2, 2, 2, 2]).unwrap().len(), 12);
        assert_eq!(enumerate_graphs(&[3, 1]).unwrap().len(), 0);
        assert!(matches!(enumerate_graphs(&[1; 9]), Err(Error::TooLarge(_))));
    }

    #[test]
    fn triangle_only_loops_back() {
        let space = enumerate_graphs(&[2, 2, 2]).unwrap();
        let counts = exact_es_transition_counts(3, &space.states()[0]).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts.values().sum::<u64>(), 12);
    }

    #[test]
    fn matching_transitions_are_balanced() {
        let space = enumerate_graphs(&[1, 1, 1, 1]).unwrap();
        let start = CanonicalGraphKey::from_edges(&[CanonicalEdge::new(0, 1), CanonicalEdge::new(2, 3)]);
        let counts = exact_es_transition_counts(4, &start).unwrap();
        let others: Vec<u64> = space.states().iter().filter(|s| **s != start).map(|s| counts[s]).collect();
        assert_eq!(others.len(), 2);
        assert!(others[0] > 0 && others[0] == others[1]);
    }

    #[test]
    fn chi_square_formula() {
        let uniform = Histogram { counts: vec![100; 12] };
        assert_eq!(chi_square_uniformity(&uniform, 0.001).unwrap().statistic, 0.0);
        let n: f64 = 1200.0;
        let mut counts = vec![0; 12];
        counts[3] = 1200;
        let r = chi_square_uniformity(&Histogram { counts }, 0.001).unwrap();
        let expected = 11.0 * n / 12.0 + (n - n / 12.0).powi(2) / (n / 12.0);
        assert!((r.statistic - expected).abs() < 1e-9);
        assert!(!r.passed);
        assert!((r.critical - 31.264).abs() < 0.01);
    }

    #[test]
    fn empty_sample() {
        let space = enumerate_graphs(&[1, 1, 1, 1]).unwrap();
        let cfg = SamplingConfig { supersteps: 3, samples: 0, seed: 1, threads: 1, lazy_probability: 0.01 };
        let h = sample_distribution(Algorithm::Es, &[1, 1, 1, 1], &space, &cfg).unwrap();
        assert_eq!(h.total(), 0);
    }
}
