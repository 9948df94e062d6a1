mod common;

use common::random_instance;
use edgeswitch::graph::{havel_hakimi, is_graphical};
use edgeswitch::verify::{enumerate_graphs, enumerate_graphs_brute_force};
use edgeswitch::{Algorithm, RandomStream, Randomizer, RunConfig};
use proptest::prelude::*;

fn degrees_strategy(max_n: usize, max_d: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_d, 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_algorithm_preserves_degrees_and_simplicity(
        seed in any::<u64>(),
        algo in prop::sample::select(Algorithm::ALL.to_vec()),
        threads in 1usize..5,
        pl in 0.01f64..0.5,
    ) {
        let mut rng = RandomStream::new(seed);
        let g = random_instance(&mut rng, 40);
        let degrees = g.degree_sequence();
        let config = RunConfig { threads, seed, lazy_probability: pl, grain: 1 };
        let mut chain = Randomizer::new(algo, g, &config).unwrap();
        for _ in 0..6 {
            chain.superstep();
            let out = chain.graph();
            prop_assert!(out.is_simple());
            prop_assert_eq!(out.degree_sequence(), degrees.clone());
        }
    }

    #[test]
    fn havel_hakimi_realizes_graphical_sequences(degrees in degrees_strategy(30, 12)) {
        match havel_hakimi(&degrees) {
            Ok(g) => {
                prop_assert!(is_graphical(&degrees));
                prop_assert!(g.is_simple());
                prop_assert_eq!(g.degree_sequence().into_inner(), degrees);
            }
            Err(_) => prop_assert!(!is_graphical(&degrees)),
        }
    }

    #[test]
    fn graphicality_matches_brute_force(degrees in degrees_strategy(6, 5)) {
        let brute = enumerate_graphs_brute_force(&degrees).unwrap();
        prop_assert_eq!(is_graphical(&degrees), !brute.is_empty());
        let pruned = enumerate_graphs(&degrees).unwrap();
        prop_assert_eq!(pruned.states(), brute.states());
    }
}

#[test]
fn havel_hakimi_on_a_thousand_sequences() {
    let mut rng = RandomStream::new(17);
    let mut realized = 0;
    for _ in 0..1000 {
        let n = 1 + rng.index(60);
        let degrees: Vec<u32> = (0..n).map(|_| rng.index(n) as u32).collect();
        if let Ok(g) = havel_hakimi(&degrees) {
            realized += 1;
            assert!(g.is_simple());
            assert_eq!(g.degree_sequence().into_inner(), degrees);
        } else {
            assert!(!is_graphical(&degrees));
        }
    }
    assert!(realized > 0);
}
