//! Communicating-class analysis against the brute-force reachability oracle.

use morseflow::{communicating_classes, invariant_class_exists, validate_n_graph, DirectedGraph};
use morseflow_testkit::graph_oracle::{
    all_n_graphs, canonical_classes, classes_by_reachability, random_n_graph,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_against_oracle(g: &DirectedGraph) {
    let ours = communicating_classes(g).expect("input is an N-graph");
    assert_eq!(canonical_classes(&ours), classes_by_reachability(g));
    let invariant = invariant_class_exists(g).expect("theorem: at least one invariant class");
    assert!(ours.contains(&invariant));
}

#[test]
fn every_four_vertex_n_graph_matches_the_oracle() {
    let graphs = all_n_graphs(4);
    assert!(graphs.len() > 10_000);
    for g in &graphs {
        check_against_oracle(g);
    }
}

#[test]
fn five_hundred_random_graphs_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a72_6170_68);
    for i in 0..500 {
        let extra_p = [0.05, 0.15, 0.35][i % 3];
        let g = random_n_graph(&mut rng, 8, extra_p);
        assert!(validate_n_graph(&g).is_n_graph());
        check_against_oracle(&g);
    }
}

proptest! {
    #[test]
    fn classes_partition_the_recurrent_vertices(seed in any::<u64>(), dense in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_n_graph(&mut rng, 8, if dense { 0.4 } else { 0.1 });
        let classes = communicating_classes(&g).unwrap();
        let mut seen = vec![0usize; g.n_vertices()];
        for class in &classes {
            prop_assert!(!class.members.is_empty());
            prop_assert!(class.members.windows(2).all(|w| w[0] < w[1]));
            for &v in &class.members {
                seen[v] += 1;
            }
        }
        for counts in seen {
            prop_assert!(counts <= 1);
        }
        // Kinds restate the edge scan.
        for class in &classes {
            let leaves = g
                .edges()
                .any(|(a, b)| class.contains(a) && !class.contains(b));
            prop_assert_eq!(leaves, !class.is_invariant());
        }
        prop_assert!(classes.iter().any(|c| c.is_invariant()));
    }
}
