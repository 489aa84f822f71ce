use proptest::prelude::*;

use feedcent::centrality::{eigenvector_centrality, katz_centrality, katz_prestige, pagerank};
use feedcent::components::strongly_connected_components;
use feedcent::format::parse_graph;
use feedcent::generate::{generate, Family, GeneratorSpec};
use feedcent::process::{step, trajectory, ProcessKind, ProcessState};
use feedcent::transforms::{compute_impacts, edge_compensation, edge_multiplication, impact_balance};
use feedcent::{ExactGraph, FloatGraph, Graph, Rational, Scalar};

const GRID: [(i64, i64); 5] = [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = ExactGraph> {
    (1..=max_nodes).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..=GRID.len(), n),
            proptest::collection::vec((0..n, 0..n, 0..GRID.len()), 0..=2 * n * n / 2 + 1),
        )
            .prop_map(move |(weights, edges)| {
                let mut g = ExactGraph::new();
                for (i, w) in weights.iter().enumerate() {
                    let b = if *w == GRID.len() { q(0, 1) } else { q(GRID[*w].0, GRID[*w].1) };
                    g.add_node(&format!("n{i}"), b).unwrap();
                }
                for (u, v, w) in edges {
                    if !g.has_edge(u, v) {
                        g.add_edge(u, v, q(GRID[w].0, GRID[w].1)).unwrap();
                    }
                }
                g
            })
    })
}

fn family_graph(family: Family, max: usize, seed: u64) -> ExactGraph {
    let min = match family {
        Family::SumOfSccs { components } => components,
        _ => 1,
    };
    generate(&GeneratorSpec::new(family, min, max, seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn components_are_mutual_reachability(g in arb_graph(7)) {
        let p = strongly_connected_components(&g);
        for u in 0..g.node_count() {
            let su = g.successors(u);
            for v in 0..g.node_count() {
                let mutual = u == v || (su[v] && g.successors(v)[u]);
                prop_assert_eq!(p.same_component(u, v), mutual);
            }
        }
    }

    #[test]
    fn text_round_trip(g in arb_graph(7)) {
        prop_assert_eq!(parse_graph(&g.to_dg()).unwrap(), g.clone());
        let f: FloatGraph = Graph::from_exact(&g);
        let back: FloatGraph = Graph::from_exact(&parse_graph(&f.to_dg()).unwrap());
        prop_assert_eq!(back, f);
    }

    #[test]
    fn zero_decay_returns_node_weights(g in arb_graph(7)) {
        prop_assert_eq!(&pagerank(&g, &q(0, 1)).unwrap().values, g.node_weights());
        prop_assert_eq!(&katz_centrality(&g, &q(0, 1)).unwrap().values, g.node_weights());
    }

    #[test]
    fn edge_multiplication_keeps_pagerank(g in arb_graph(6), u in 0usize..6, k in 0..GRID.len()) {
        let u = u % g.node_count();
        let x = q(GRID[k].0, GRID[k].1);
        let h = edge_multiplication(&g, u, &x).unwrap();
        prop_assert_eq!(pagerank(&h, &q(1, 2)).unwrap().values, pagerank(&g, &q(1, 2)).unwrap().values);
    }

    #[test]
    fn edge_compensation_keeps_katz(g in arb_graph(6), u in 0usize..6, k in 0..GRID.len()) {
        let u = u % g.node_count();
        let x = q(GRID[k].0, GRID[k].1);
        let h = edge_compensation(&g, u, &x).unwrap();
        // Small enough that alpha·λ < 1 on every generated graph.
        let alpha = q(1, 64);
        let before = katz_centrality(&g, &alpha).unwrap().values;
        let after = katz_centrality(&h, &alpha).unwrap().values;
        for v in 0..g.node_count() {
            let scaled = if v == u { after[v].clone() * x.clone() } else { after[v].clone() };
            prop_assert_eq!(&scaled, &before[v]);
        }
    }

    #[test]
    fn prestige_total_is_node_weight_total(seed in any::<u64>(), k in 1usize..=3) {
        let g = family_graph(Family::SumOfSccs { components: k }, 8, seed);
        let kp = katz_prestige(&g).unwrap();
        prop_assert_eq!(kp.total(), g.total_node_weight());
    }

    #[test]
    fn edge_multiplication_keeps_prestige(seed in any::<u64>(), u in 0usize..8, k in 0..GRID.len()) {
        let g = family_graph(Family::SumOfSccs { components: 2 }, 8, seed);
        let u = u % g.node_count();
        let h = edge_multiplication(&g, u, &q(GRID[k].0, GRID[k].1)).unwrap();
        prop_assert_eq!(katz_prestige(&h).unwrap().values, katz_prestige(&g).unwrap().values);
    }

    #[test]
    fn impacts_balance(seed in any::<u64>()) {
        let g = family_graph(Family::StronglyConnected, 8, seed);
        let kp = katz_prestige(&g).unwrap();
        let impacts = compute_impacts(&g).unwrap();
        prop_assert!(impact_balance(&g, &impacts, &kp.values).is_ok());
    }

    #[test]
    fn eigenvector_equals_prestige_when_out_regular(seed in any::<u64>()) {
        let g: FloatGraph = generate(&GeneratorSpec::new(Family::OutRegular { strongly_connected: true }, 1, 15, seed)).unwrap();
        let ev = eigenvector_centrality(&g).unwrap();
        let kp = katz_prestige(&g).unwrap();
        for v in 0..g.node_count() {
            prop_assert!(ev.values[v].near(&kp.values[v], 1e-9), "{} vs {}", ev.values[v], kp.values[v]);
        }
    }

    #[test]
    fn distributed_matches_scaled_parallel_when_out_regular(seed in any::<u64>()) {
        let g = family_graph(Family::OutRegular { strongly_connected: false }, 6, seed);
        let x = g.is_out_regular().unwrap();
        let d = trajectory(&g, &ProcessKind::distributed(q(1, 1)), 8).unwrap();
        let p = trajectory(&g, &ProcessKind::parallel(q(1, 1) / x), 8).unwrap();
        prop_assert_eq!(d, p);
    }

    #[test]
    fn distributed_unit_decay_conserves_without_sinks(seed in any::<u64>()) {
        let g = family_graph(Family::StronglyConnected, 6, seed);
        let kind = ProcessKind::distributed(q(1, 1));
        let mut s = ProcessState::initial(&g);
        for _ in 0..20 {
            s = step(&g, &kind, &s).unwrap();
            prop_assert_eq!(s.total(), g.total_node_weight());
        }
    }
}
