use edgeswitch::bench::run_bench;
use edgeswitch::generate::{gen_gnp, gen_pld};
use edgeswitch::parallel::SteadyGlobalEs;
use edgeswitch::{Algorithm, RandomSource, RandomStream, RunConfig};

#[test]
fn power_law_graph_needs_few_rounds() {
    let g = gen_pld(100_000, 2.5, &mut RandomStream::new(21)).unwrap();
    assert!((90_000..=110_000).contains(&g.edge_count()), "m = {}", g.edge_count());
    let mut chain = SteadyGlobalEs::new(g, 2).unwrap();
    let rounds: Vec<usize> = chain.run(20, &mut RandomSource::new(21, 0.01)).iter().map(|s| s.rounds).collect();
    let mean = rounds.iter().sum::<usize>() as f64 / rounds.len() as f64;
    assert!(mean <= 4.0, "{rounds:?}");
}

#[test]
fn bench_rounds_stay_small() {
    let mut rng = RandomStream::new(22);
    for g in [gen_gnp(3_000, 0.004, &mut rng).unwrap(), gen_pld(20_000, 2.2, &mut rng).unwrap()] {
        let cfg = RunConfig { threads: 2, seed: 22, ..RunConfig::default() };
        let outcome = run_bench(Algorithm::SteadyGlobalEs, &g, &cfg, 10, 2).unwrap();
        assert_eq!(outcome.rounds.len(), 20);
        let mean = outcome.rounds.iter().sum::<usize>() as f64 / outcome.rounds.len() as f64;
        assert!(mean <= 10.0, "{:?}", outcome.rounds);
    }
}
