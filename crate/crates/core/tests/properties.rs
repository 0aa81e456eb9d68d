mod common;

use proptest::prelude::*;
use vc_core::engine::select_max_degree;
use vc_core::ingest::{canonicalize, parse_edge_list, parse_graph, write_edge_list, Format};
use vc_core::node::{DegreeWidth, SearchNode};
use vc_core::oracle::{brute_force_mvc, greedy_cover};
use vc_core::reduce::{find_crown, reduce_to_fixpoint};
use vc_core::registry::ChildIdx;
use vc_core::{solve, SolverConfig, StaticGraph, Vertex};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = StaticGraph> {
    (1..=max_n, 0..4usize).prop_flat_map(|(n, density)| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(0..100u32, pairs).prop_map(move |rolls| {
            let threshold = [10, 30, 50, 80][density];
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if rolls[i] < threshold {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            StaticGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn mvc(g: &StaticGraph) -> u32 {
    brute_force_mvc(g).unwrap().0
}

/// Residual graph of a node, induced on its live vertices.
fn residual(g: &StaticGraph, node: &SearchNode<u32>) -> StaticGraph {
    let live: Vec<Vertex> = node.live_vertices().collect();
    g.induced_subgraph(&live).unwrap().0
}

fn det() -> SolverConfig {
    SolverConfig { deterministic: true, ..SolverConfig::mvc() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn csr_is_consistent(g in graph_strategy(30)) {
        let offsets = g.offsets();
        prop_assert_eq!(offsets.len(), g.num_vertices() + 1);
        let degree_sum: usize = (0..g.num_vertices() as Vertex).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.num_edges());
        prop_assert_eq!(g.edges().count(), g.num_edges());
        for v in 0..g.num_vertices() as Vertex {
            let nb = g.neighbors(v);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &u in nb {
                prop_assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn canonicalization_is_idempotent(
        n in 1..20u32,
        raw in proptest::collection::vec((0..20u32, 0..20u32), 0..60),
    ) {
        let mut text = String::new();
        for (u, v) in raw {
            text.push_str(&format!("{} {}\n", u % n, v % n));
        }
        let parsed = parse_edge_list(text.as_bytes()).unwrap();
        let (edges, count) = canonicalize(&parsed);
        prop_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(edges.iter().all(|&(u, v)| u < v));
        let g = StaticGraph::from_edges(count, &edges).unwrap();
        let mut out = Vec::new();
        write_edge_list(&g, &mut out).unwrap();
        prop_assert_eq!(parse_graph(&out, Format::EdgeList).unwrap(), g);
    }

    #[test]
    fn removals_keep_degree_array_consistent(
        g in graph_strategy(20),
        picks in proptest::collection::vec((0..20u32, any::<bool>()), 0..12),
    ) {
        let mut node = SearchNode::<u32>::root(&g, ChildIdx::ROOT).with_inclusion();
        for (v, into_cover) in picks {
            let v = v % g.num_vertices() as u32;
            if node.inclusion().unwrap().contains(v as usize) {
                continue;
            }
            node.remove_vertex(&g, v, into_cover);
            node.recompute_bounds();
            prop_assert!(node.check_invariants(&g).is_ok(), "{:?}", node.check_invariants(&g));
        }
    }

    #[test]
    fn reductions_preserve_the_optimum(g in graph_strategy(14)) {
        let opt = mvc(&g);
        let mut node = SearchNode::<u32>::root(&g, ChildIdx::ROOT);
        reduce_to_fixpoint(&mut node, &g, opt + 1);
        prop_assert!(node.check_invariants(&g).is_ok());
        prop_assert_eq!(node.solution_size() + mvc(&residual(&g, &node)), opt);
    }

    #[test]
    fn fixpoint_is_idempotent(g in graph_strategy(18), slack in 0..3u32) {
        let limit = greedy_cover(&g).len() as u32 + slack;
        let mut node = SearchNode::<u32>::root(&g, ChildIdx::ROOT);
        reduce_to_fixpoint(&mut node, &g, limit);
        let again = reduce_to_fixpoint(&mut node, &g, limit);
        prop_assert_eq!(again.vertices_forced, 0);
    }

    #[test]
    fn branching_on_max_degree_is_sound(g in graph_strategy(14)) {
        let root = SearchNode::<u32>::root(&g, ChildIdx::ROOT);
        if let Some(v) = select_max_degree(&root) {
            let without_v: Vec<Vertex> = (0..g.num_vertices() as Vertex).filter(|&u| u != v).collect();
            let closed: Vec<Vertex> = (0..g.num_vertices() as Vertex)
                .filter(|&u| u != v && !g.has_edge(u, v))
                .collect();
            let include = mvc(&g.induced_subgraph(&without_v).unwrap().0) + 1;
            let exclude = mvc(&g.induced_subgraph(&closed).unwrap().0) + g.degree(v) as u32;
            prop_assert_eq!(mvc(&g), include.min(exclude));
        }
    }

    #[test]
    fn components_add_up(a in graph_strategy(12), b in graph_strategy(12)) {
        let g = common::disjoint_union(&a, &b);
        let expected = mvc(&a) + mvc(&b);
        prop_assert_eq!(mvc(&g), expected);
        prop_assert_eq!(solve(&g, &det()).unwrap().cover_size, Some(expected));
        let cfg = SolverConfig { root_reduce: false, workers: 3, ..SolverConfig::mvc() };
        prop_assert_eq!(solve(&g, &cfg).unwrap().cover_size, Some(expected));
    }

    #[test]
    fn degree_width_does_not_change_the_search(g in graph_strategy(16)) {
        let runs: Vec<_> = DegreeWidth::ALL
            .iter()
            .map(|&w| solve(&g, &SolverConfig { width: Some(w), ..det() }).unwrap())
            .collect();
        for r in &runs[1..] {
            prop_assert_eq!(r.cover_size, runs[0].cover_size);
            prop_assert_eq!(r.stats.tree_nodes_visited, runs[0].stats.tree_nodes_visited);
            prop_assert_eq!(&r.stats.rule_counts, &runs[0].stats.rule_counts);
        }
    }

    #[test]
    fn crowns_are_valid_and_safe(g in graph_strategy(16)) {
        let mut node = SearchNode::<u32>::root(&g, ChildIdx::ROOT);
        if let Some(crown) = find_crown(&node, &g) {
            prop_assert!(crown.validate(&node, &g).is_ok(), "{:?}", crown.validate(&node, &g));
            crown.apply(&mut node, &g);
            prop_assert_eq!(crown.head.len() as u32 + mvc(&residual(&g, &node)), mvc(&g));
        }
    }

    #[test]
    fn pruning_never_changes_the_answer(g in graph_strategy(14)) {
        let pruned = solve(&g, &SolverConfig { root_reduce: false, ..det() }).unwrap();
        let full = solve(&g, &SolverConfig { root_reduce: false, prune: false, ..det() }).unwrap();
        prop_assert_eq!(pruned.cover_size, full.cover_size);
        prop_assert!(pruned.stats.tree_nodes_visited <= full.stats.tree_nodes_visited);
    }

    #[test]
    fn recorded_covers_are_valid(g in graph_strategy(18), workers in 1..4usize) {
        let cfg = SolverConfig { record_cover: true, workers, ..SolverConfig::mvc() };
        let r = solve(&g, &cfg).unwrap();
        let cover = r.cover.unwrap();
        prop_assert!(g.is_vertex_cover(&cover));
        prop_assert_eq!(Some(cover.len() as u32), r.cover_size);
        prop_assert_eq!(r.cover_size, Some(mvc(&g)));
    }

    #[test]
    fn pvc_agrees_with_the_minimum(g in graph_strategy(16), workers in 1..4usize) {
        let m = mvc(&g);
        let run = |k| solve(&g, &SolverConfig { workers, record_cover: true, ..SolverConfig::pvc(k) }).unwrap();
        let at = run(m);
        prop_assert!(at.found);
        let cover = at.cover.unwrap();
        prop_assert!(g.is_vertex_cover(&cover) && cover.len() as u32 <= m);
        if m > 0 {
            prop_assert!(!run(m - 1).found);
        }
    }

    #[test]
    fn histogram_matches_branch_count(g in graph_strategy(24)) {
        let r = solve(&g, &SolverConfig { root_reduce: false, ..det() }).unwrap();
        let total: u64 = r.stats.components_per_branch.values().sum();
        prop_assert_eq!(total, r.stats.component_branches);
        prop_assert!(r.stats.components_per_branch.keys().all(|&k| k >= 2));
        prop_assert!(r.audit.quiescent && r.audit.conserved);
    }
}
