//! Timing of initialization and supersteps.

use std::time::Instant;

use crate::graph::EdgeList;
use crate::randomizer::{Randomizer, RunConfig, StepStats};
use crate::random::RandomStream;
use crate::report::{BenchRow, SuperstepRecord};
use crate::{Algorithm, Result};

/// Rows and per-global-switch round counts of a benchmark.
#[derive(Clone, Debug, Default)]
pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    pub rounds: Vec<usize>,
}

/// Converts superstep statistics into report records.
pub fn superstep_records(stats: &[(StepStats, f64)]) -> Vec<SuperstepRecord> {
    stats
        .iter()
        .enumerate()
        .map(|(t, (s, seconds))| SuperstepRecord {
            superstep: t as u64 + 1,
            accepted: s.counters.accepted,
            rejected_loop: s.counters.rejected_loop,
            rejected_existing: s.counters.rejected_existing,
            rounds: s.rounds.map(|r| r as u64),
            seconds: *seconds,
        })
        .collect()
}

/// Runs `repetitions` independent randomizations of `graph` and times the
/// data-structure setup and the supersteps separately. Repetition `r` is
/// seeded from `(config.seed, r)`.
pub fn run_bench(
    algo: Algorithm,
    graph: &EdgeList,
    config: &RunConfig,
    supersteps: usize,
    repetitions: usize,
) -> Result<BenchOutcome> {
    let mut outcome = BenchOutcome::default();
    for rep in 0..repetitions {
        let cfg = RunConfig { seed: RandomStream::derive(config.seed, rep as u64).seed(), ..*config };
        let input = graph.clone();
        let started = Instant::now();
        let mut chain = Randomizer::new(algo, input, &cfg)?;
        let init = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let stats = chain.run(supersteps);
        let elapsed = started.elapsed().as_secs_f64();

        let rounds: Vec<usize> = stats.iter().filter_map(|s| s.rounds).collect();
        let (mean_rounds, max_rounds) = if rounds.is_empty() {
            (None, None)
        } else {
            (
                Some(rounds.iter().sum::<usize>() as f64 / rounds.len() as f64),
                rounds.iter().max().map(|&r| r as u64),
            )
        };
        outcome.rounds.extend(&rounds);
        let row = |phase: &str, steps: usize, seconds: f64, with_rounds: bool| BenchRow {
            algo: algo.name().to_string(),
            threads: cfg.threads as u64,
            edges: graph.edge_count() as u64,
            repetition: rep as u64,
            phase: phase.to_string(),
            supersteps: steps as u64,
            seconds,
            mean_rounds: if with_rounds { mean_rounds } else { None },
            max_rounds: if with_rounds { max_rounds } else { None },
        };
        outcome.rows.push(row("init", 0, init, false));
        outcome.rows.push(row("supersteps", supersteps, elapsed, true));
    }
    Ok(outcome)
}
