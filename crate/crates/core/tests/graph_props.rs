use std::io::Cursor;

use proptest::prelude::*;
use sbmconn_core::graph::{parse_edgelist, write_edgelist};
use sbmconn_core::{Graph, NodeSet};

fn graphs() -> impl Strategy<Value = Graph> {
    (1..30usize).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..80).prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

fn subsets(n: usize) -> impl Strategy<Value = NodeSet> {
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(|keep| keep.iter().enumerate().filter(|(_, k)| **k).map(|(v, _)| v).collect())
}

proptest! {
    #[test]
    fn reserialising_preserves_the_labelled_edge_set(g in graphs()) {
        let labelled = |g: &Graph| {
            let mut set: Vec<(String, String)> = g
                .edges()
                .map(|(u, v)| {
                    let (a, b) = (g.label(u).to_string(), g.label(v).to_string());
                    if a < b { (a, b) } else { (b, a) }
                })
                .collect();
            set.sort();
            set
        };
        let mut text = Vec::new();
        write_edgelist(&g, &mut text).unwrap();
        let once = parse_edgelist(Cursor::new(&text)).unwrap();
        prop_assert_eq!(labelled(&once), labelled(&g));
        let mut again = Vec::new();
        write_edgelist(&once, &mut again).unwrap();
        prop_assert_eq!(labelled(&parse_edgelist(Cursor::new(&again)).unwrap()), labelled(&g));
    }

    #[test]
    fn components_cover_the_subset((g, s) in graphs().prop_flat_map(|g| { let n = g.num_nodes(); (Just(g), subsets(n)) })) {
        let parts = g.connected_components(&s).unwrap();
        prop_assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), s.len());
        let mut all: Vec<usize> = parts.iter().flat_map(|p| p.iter()).collect();
        all.sort_unstable();
        prop_assert_eq!(all.as_slice(), s.as_slice());
        let internal = g.internal_edges(&s).unwrap();
        prop_assert!(internal <= g.num_edges());
        let sub = g.induced_subgraph(&s).unwrap();
        prop_assert_eq!(sub.graph.num_edges(), internal);
    }

    #[test]
    fn adjacency_is_symmetric_and_simple(g in graphs()) {
        let mut degree_sum = 0;
        for v in 0..g.num_nodes() {
            prop_assert!(!g.neighbors(v).contains(&v));
            for &u in g.neighbors(v) {
                prop_assert!(g.has_edge(u, v));
            }
            degree_sum += g.degree(v);
        }
        prop_assert_eq!(degree_sum, 2 * g.num_edges());
    }
}
