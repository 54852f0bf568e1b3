use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbmconn_core::mincut::{degree_one_shortcut, global_min_cut, min_cut_value_bruteforce, min_cut_within};
use sbmconn_core::{Graph, NodeSet};
use sbmconn_oracles as oracle;

fn connected(seed: u64, n: usize, p: f64) -> Graph {
    oracle::random_connected_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn stoer_wagner_matches_exhaustive(seed in any::<u64>(), n in 2..=12usize, p in 0.05..0.9f64) {
        let g = connected(seed, n, p);
        let cut = global_min_cut(&g).unwrap();
        prop_assert_eq!(cut.cut_size, oracle::min_cut_exhaustive(&g));
        prop_assert_eq!(cut.cut_size, min_cut_value_bruteforce(&g).unwrap());
    }

    #[test]
    fn removing_cut_edges_leaves_exactly_the_two_sides(seed in any::<u64>(), n in 2..=12usize, p in 0.05..0.9f64) {
        let g = connected(seed, n, p);
        let cut = global_min_cut(&g).unwrap();
        prop_assert!(cut.side_a.contains(0));
        prop_assert_eq!(cut.side_a.len() + cut.side_b.len(), n);
        let kept = g.edges().filter(|&(u, v)| cut.side_a.contains(u) == cut.side_a.contains(v));
        let h = Graph::from_edges(n, kept).unwrap();
        prop_assert_eq!(g.num_edges() - h.num_edges(), cut.cut_size);
        let mut parts = h.connected_components(&NodeSet::full(n)).unwrap();
        parts.sort();
        let mut sides = vec![cut.side_a.clone(), cut.side_b.clone()];
        sides.sort();
        prop_assert_eq!(parts, sides);
    }

    #[test]
    fn bounded_search_agrees_with_global(seed in any::<u64>(), n in 2..=12usize, p in 0.05..0.9f64, limit in 0..6usize) {
        let g = connected(seed, n, p);
        let exact = global_min_cut(&g).unwrap().cut_size;
        match min_cut_within(&g, limit).unwrap() {
            Some(cut) => {
                prop_assert!(exact <= limit);
                prop_assert_eq!(cut.cut_size, exact);
            }
            None => prop_assert!(exact > limit),
        }
    }

    #[test]
    fn leaf_shortcut_is_a_minimum(seed in any::<u64>(), n in 2..=12usize, p in 0.05..0.5f64) {
        let g = connected(seed, n, p);
        if let Some(cut) = degree_one_shortcut(&g).unwrap() {
            prop_assert_eq!(cut.cut_size, 1);
            prop_assert_eq!(oracle::min_cut_exhaustive(&g), 1);
            prop_assert_eq!(cut.balance(), 1);
        }
    }
}

#[test]
fn disconnected_inputs_are_rejected() {
    let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
    assert!(global_min_cut(&g).is_err());
    assert!(min_cut_within(&g, 3).is_err());
    assert!(degree_one_shortcut(&g).is_err());
}
