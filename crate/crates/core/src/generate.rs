//! Random graph generators: Erdős–Rényi `G(n, p)` and power-law degree
//! sequences realized by Havel–Hakimi.

use rayon::prelude::*;

use crate::graph::{havel_hakimi, is_graphical, CanonicalEdge, DegreeSequence, EdgeList, NodeId};
use crate::random::RandomStream;
use crate::{Error, Result};

/// Attempts [`sample_pld_degrees`] makes before giving up.
pub const PLD_RETRIES: usize = 1000;

fn check_node_count(n: usize) -> Result<()> {
    if n > NodeId::MAX as usize + 1 {
        return Err(Error::NodeIdOutOfRange(n as u64 - 1));
    }
    Ok(())
}

/// `G(n, p)`: every one of the `n(n-1)/2` node pairs is an edge independently
/// with probability `p`.
///
/// Rows are sampled in parallel by geometric skipping; row `u` uses its own
/// sub-stream, so the output does not depend on the thread count.
pub fn gen_gnp(n: usize, p: f64, rng: &mut RandomStream) -> Result<EdgeList> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    check_node_count(n)?;
    let key = rng.next_u64();
    let log_q = (1.0 - p).ln();
    let rows: Vec<Vec<CanonicalEdge>> = (0..n.saturating_sub(1))
        .into_par_iter()
        .with_min_len(64)
        .map(|u| {
            let mut out = Vec::new();
            if p == 0.0 {
                return out;
            }
            if p == 1.0 {
                out.extend((u + 1..n).map(|v| CanonicalEdge::new(u as u32, v as u32)));
                return out;
            }
            let mut stream = RandomStream::derive(key, u as u64);
            let mut v = u;
            loop {
                // number of skipped candidates ~ Geometric(p)
                let r = 1.0 - stream.unit_f64();
                let skip = (r.ln() / log_q).floor();
                if skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize + 1;
                if v >= n {
                    break;
                }
                out.push(CanonicalEdge::new(u as u32, v as u32));
            }
            out
        })
        .collect();
    EdgeList::new(n, rows.concat())
}

/// Largest degree of a power-law sequence on `n` nodes: `⌊n^{1/(γ-1)}⌋`,
/// never more than `n - 1` and never less than 1.
pub fn pld_max_degree(n: usize, gamma: f64) -> u32 {
    let delta = (n as f64).powf(1.0 / (gamma - 1.0)).floor();
    let cap = n.saturating_sub(1).max(1) as f64;
    delta.clamp(1.0, cap) as u32
}

/// `n` independent draws with `P[X = k] ∝ k^-γ` on `1..=Δ`, by inverse CDF.
/// No parity or graphicality adjustment.
pub fn sample_pld(n: usize, gamma: f64, rng: &mut RandomStream) -> Result<Vec<u32>> {
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::InvalidParameter(format!("power-law exponent {gamma} must exceed 1")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("power-law sample needs at least one node".into()));
    }
    check_node_count(n)?;
    let delta = pld_max_degree(n, gamma) as usize;
    let mut cdf = Vec::with_capacity(delta);
    let mut acc = 0.0;
    for k in 1..=delta {
        acc += (k as f64).powf(-gamma);
        cdf.push(acc);
    }
    Ok((0..n)
        .map(|_| {
            let u = rng.unit_f64() * acc;
            (cdf.partition_point(|&c| c <= u).min(delta - 1) + 1) as u32
        })
        .collect())
}

/// A graphical power-law degree sequence.
///
/// An odd degree sum is fixed by incrementing one uniformly chosen node of
/// degree below `Δ`. Samples that stay non-graphical are redrawn, up to
/// [`PLD_RETRIES`] times.
pub fn sample_pld_degrees(n: usize, gamma: f64, rng: &mut RandomStream) -> Result<DegreeSequence> {
    let delta = if n == 0 { 1 } else { pld_max_degree(n, gamma) };
    for _ in 0..PLD_RETRIES {
        let mut d = sample_pld(n, gamma, rng)?;
        if d.iter().map(|&x| x as u64).sum::<u64>() % 2 == 1 {
            let below: Vec<usize> = (0..n).filter(|&v| d[v] < delta).collect();
            if below.is_empty() {
                continue;
            }
            d[below[rng.index(below.len())]] += 1;
        }
        if is_graphical(&d) {
            return Ok(DegreeSequence::new(d));
        }
    }
    Err(Error::RetriesExhausted(PLD_RETRIES))
}

/// A power-law graph: a sampled degree sequence materialized by Havel–Hakimi.
pub fn gen_pld(n: usize, gamma: f64, rng: &mut RandomStream) -> Result<EdgeList> {
    havel_hakimi(&sample_pld_degrees(n, gamma, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let mut rng = RandomStream::new(1);
        assert_eq!(gen_gnp(4, 0.0, &mut rng).unwrap().edge_count(), 0);
        let k4 = gen_gnp(4, 1.0, &mut rng).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert!(k4.is_simple());
        assert!(gen_gnp(4, 1.5, &mut rng).is_err());
    }

    #[test]
    fn gnp_edge_count_within_four_sigma() {
        let mut rng = RandomStream::new(2);
        let g = gen_gnp(1000, 0.01, &mut rng).unwrap();
        let pairs = 1000.0 * 999.0 / 2.0;
        let mean = 0.01 * pairs;
        let sd = (pairs * 0.01 * 0.99f64).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() <= 4.0 * sd);
        assert!(g.is_simple());
    }

    #[test]
    fn gnp_does_not_depend_on_threads() {
        let a = gen_gnp(3000, 0.002, &mut RandomStream::new(3)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| gen_gnp(3000, 0.002, &mut RandomStream::new(3))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pld_single_node() {
        let mut rng = RandomStream::new(4);
        assert_eq!(sample_pld(1, 3.0, &mut rng).unwrap(), vec![1]);
        // (1) has an odd sum and no node below Δ = 1, so no graphical sample exists
        assert!(matches!(sample_pld_degrees(1, 3.0, &mut rng), Err(Error::RetriesExhausted(_))));
    }

    #[test]
    fn pld_max_degree_rule() {
        assert_eq!(pld_max_degree(10_000, 2.5), 464);
        assert_eq!(pld_max_degree(1, 3.0), 1);
        assert_eq!(pld_max_degree(10, 1.1), 9);
    }

    #[test]
    fn pld_degree_one_frequency() {
        let n = 10_000;
        let mut rng = RandomStream::new(5);
        let d = sample_pld(n, 2.5, &mut rng).unwrap();
        let delta = pld_max_degree(n, 2.5);
        let z: f64 = (1..=delta).map(|k| (k as f64).powf(-2.5)).sum();
        let p1 = 1.0 / z;
        let ones = d.iter().filter(|&&x| x == 1).count() as f64;
        let sd = (n as f64 * p1 * (1.0 - p1)).sqrt();
        assert!((ones - n as f64 * p1).abs() <= 3.0 * sd, "ones {ones}, expected {}", n as f64 * p1);
        assert!(d.iter().all(|&x| (1..=delta).contains(&x)));
    }

    #[test]
    fn pld_sequences_are_even_and_graphical() {
        let mut rng = RandomStream::new(6);
        for n in [2, 10, 128, 1000] {
            let d = sample_pld_degrees(n, 2.5, &mut rng).unwrap();
            assert_eq!(d.sum() % 2, 0);
            assert!(is_graphical(&d));
            let g = gen_pld(n, 2.5, &mut rng).unwrap();
            assert!(g.is_simple());
        }
    }
}
