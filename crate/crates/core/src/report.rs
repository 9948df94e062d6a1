//! CSV records emitted by the tools, readable back with [`read_csv`].

use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Result;

/// Outcome tallies of one superstep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperstepRecord {
    pub superstep: u64,
    pub accepted: u64,
    pub rejected_loop: u64,
    pub rejected_existing: u64,
    /// Rounds of the global switch; only for the round-based chain.
    pub rounds: Option<u64>,
    pub seconds: f64,
}

/// One thinning value of a mixing report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingRow {
    pub algo: String,
    pub k: u32,
    pub mean_fraction_non_independent: f64,
    pub stddev: f64,
    pub runs: u64,
    pub edges_tracked: u64,
    pub edges_insufficient: u64,
}

/// Sample count of one state of an enumerated state space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub state: u64,
    /// The state's edges as `u-v` pairs separated by spaces.
    pub edges: String,
    pub count: u64,
}

/// One timed phase of a benchmark repetition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algo: String,
    pub threads: u64,
    pub edges: u64,
    pub repetition: u64,
    /// `init` or `supersteps`.
    pub phase: String,
    pub supersteps: u64,
    pub seconds: f64,
    /// Mean rounds per global switch; only for the round-based chain.
    pub mean_rounds: Option<f64>,
    pub max_rounds: Option<u64>,
}

/// How many global switches needed a given number of rounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundsRow {
    pub rounds: u64,
    pub count: u64,
}

pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|row| row.map_err(Into::into))
        .collect()
}

pub fn write_csv_file<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

pub fn read_csv_file<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    read_csv(std::fs::File::open(path)?)
}

/// Counts how often each round count occurs.
pub fn rounds_histogram(rounds: &[usize]) -> Vec<RoundsRow> {
    let max = rounds.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for &r in rounds {
        counts[r] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(r, count)| RoundsRow { rounds: r as u64, count })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superstep_records_roundtrip() {
        let rows = vec![
            SuperstepRecord { superstep: 1, accepted: 3, rejected_loop: 1, rejected_existing: 0, rounds: Some(2), seconds: 0.5 },
            SuperstepRecord { superstep: 2, accepted: 0, rejected_loop: 0, rejected_existing: 4, rounds: None, seconds: 0.25 },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let back: Vec<SuperstepRecord> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn histogram_of_rounds() {
        let h = rounds_histogram(&[2, 1, 2, 4]);
        assert_eq!(
            h,
            vec![
                RoundsRow { rounds: 1, count: 1 },
                RoundsRow { rounds: 2, count: 2 },
                RoundsRow { rounds: 4, count: 1 }
            ]
        );
        assert!(rounds_histogram(&[]).iter().all(|r| r.count > 0));
    }
}
