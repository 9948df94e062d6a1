mod common;

use common::{oracle_global_switch, random_global_switch, random_instance, sorted, steady_run};
use edgeswitch::chain::inverse_global_switch;
use edgeswitch::parallel::EagerEs;
use edgeswitch::source::RecordingSource;
use edgeswitch::{
    Algorithm, ChainState, RandomSource, RandomStream, Randomizer, ReplaySource, RunConfig, SwitchSource,
};
use proptest::prelude::*;

#[test]
fn steady_matches_the_sequential_oracle() {
    let mut rng = RandomStream::new(101);
    for _ in 0..200 {
        let g = random_instance(&mut rng, 40);
        let gs = random_global_switch(&mut rng, g.edge_count(), 0.1);
        let (expected, outcomes) = oracle_global_switch(&g, &gs);
        for threads in [1, 3] {
            let chain = steady_run(&g, std::slice::from_ref(&gs), threads, 1);
            assert_eq!(chain.edges(), &expected[..]);
            assert_eq!(chain.counters(), edgeswitch::chain::Counters::from_outcomes(&outcomes));
        }
    }
}

#[test]
fn steady_is_bit_identical_across_thread_counts() {
    let mut rng = RandomStream::new(202);
    for _ in 0..30 {
        let g = random_instance(&mut rng, 48);
        let globals: Vec<_> = (0..5).map(|_| random_global_switch(&mut rng, g.edge_count(), 0.01)).collect();
        let reference = steady_run(&g, &globals, 1, 1);
        for threads in [2, 4, 8] {
            let other = steady_run(&g, &globals, threads, 1);
            assert_eq!(other.edges(), reference.edges());
            assert_eq!(other.rounds_history(), reference.rounds_history());
        }
    }
}

#[test]
fn inverse_global_switch_round_trips() {
    let mut rng = RandomStream::new(303);
    for _ in 0..300 {
        let g = random_instance(&mut rng, 30);
        let gs = random_global_switch(&mut rng, g.edge_count(), 0.05);
        let mut chain = ChainState::new(g.clone()).unwrap();
        let outcomes = chain.apply_global_switch(&gs);
        let inverse = inverse_global_switch(&gs, &outcomes, g.edges());
        let back = chain.apply_global_switch(&inverse);
        assert_eq!(sorted(chain.edges()), sorted(g.edges()));
        assert_eq!(back, outcomes.iter().rev().copied().collect::<Vec<_>>());
    }
}

#[test]
fn recorded_randomness_replays_exactly() {
    let g = edgeswitch::graph::havel_hakimi(&[5, 4, 4, 3, 3, 3, 2, 2, 1, 1]).unwrap();
    let mut recorder = RecordingSource::new(RandomSource::new(9, 0.05));
    let mut live = ChainState::new(g.clone()).unwrap();
    live.run_global_es(10, &mut recorder);
    live.run_es(50, &mut recorder);

    let mut replay = recorder.replay();
    let mut again = ChainState::new(g).unwrap();
    again.run_global_es(10, &mut replay);
    again.run_es(50, &mut replay);
    assert_eq!(again.edges(), live.edges());
    assert_eq!(again.counters(), live.counters());
    assert_eq!(replay.remaining_switches() + replay.remaining_globals(), 0);
}

#[test]
fn global_and_steady_agree_on_real_sources() {
    let mut rng = RandomStream::new(404);
    for seed in 0..10 {
        let g = random_instance(&mut rng, 60);
        let config = RunConfig { threads: 4, seed, lazy_probability: 0.01, grain: 1 };
        let mut a = Randomizer::new(Algorithm::GlobalEs, g.clone(), &config).unwrap();
        let mut b = Randomizer::new(Algorithm::SteadyGlobalEs, g, &config).unwrap();
        a.run(8);
        b.run(8);
        assert_eq!(a.edges(), b.edges());
    }
}

#[test]
fn single_thread_eager_is_sequential_es() {
    let mut rng = RandomStream::new(505);
    for seed in 0..10 {
        let g = random_instance(&mut rng, 60);
        let mut seq = ChainState::new(g.clone()).unwrap();
        let mut source = RandomSource::new(seed, 0.01);
        let mut eager = EagerEs::from_seed(g, 1, seed).unwrap();
        for _ in 0..6 {
            seq.es_superstep(&mut source);
            eager.superstep();
            assert_eq!(eager.edges(), seq.edges());
        }
        assert_eq!(eager.counters(), seq.counters());
    }
}

#[test]
fn eager_replays_injected_switches() {
    let mut rng = RandomStream::new(606);
    let g = random_instance(&mut rng, 50);
    let mut source = RandomSource::new(1, 0.01);
    let switches: Vec<_> = (0..2_000).map(|_| source.next_switch(g.edge_count())).collect();
    let mut seq = ChainState::new(g.clone()).unwrap();
    seq.run_es(switches.len(), &mut ReplaySource::switches(switches.clone()));
    let pool = std::sync::Arc::new(edgeswitch::parallel::WorkerPool::new(1).unwrap());
    let mut eager = EagerEs::with_sources(g, pool, vec![ReplaySource::switches(switches)]).unwrap();
    eager.run(2_000);
    assert_eq!(eager.edges(), seq.edges());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_equivalence_property(seed in any::<u64>(), threads in 1usize..6, pl in 0.01f64..0.9) {
        let mut rng = RandomStream::new(seed);
        let g = random_instance(&mut rng, 24);
        let gs = random_global_switch(&mut rng, g.edge_count(), pl);
        let (expected, _) = oracle_global_switch(&g, &gs);
        let chain = steady_run(&g, std::slice::from_ref(&gs), threads, 1);
        prop_assert_eq!(chain.edges(), &expected[..]);
    }

    #[test]
    fn inverse_property(seed in any::<u64>()) {
        let mut rng = RandomStream::new(seed);
        let g = random_instance(&mut rng, 16);
        let gs = random_global_switch(&mut rng, g.edge_count(), 0.01);
        let mut chain = ChainState::new(g.clone()).unwrap();
        let outcomes = chain.apply_global_switch(&gs);
        chain.apply_global_switch(&inverse_global_switch(&gs, &outcomes, g.edges()));
        prop_assert_eq!(sorted(chain.edges()), sorted(g.edges()));
    }
}
