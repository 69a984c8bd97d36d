use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;
use recourse_core::bounds::{allflip_bound, floor_log, sp_total_bound};
use recourse_core::gen::{arboricity_bounded, random_forest};
use recourse_core::step::check_prefix_sums;
use recourse_core::{
    AllFlipConfig, AllFlipOrienter, Error, FixingOrienter, GreedyOrienter, NodeId,
    OrientationState, ShortestPathOrienter, SpConfig,
};

/// Forest edges from a parent array: node i+1 hangs off parents[i] (taken mod i+1),
/// with ids scattered by a multiplier and the arrival order permuted.
fn forest_strategy(max_edges: usize) -> impl Strategy<Value = Vec<(NodeId, NodeId)>> {
    (1..=max_edges)
        .prop_flat_map(|m| {
            (
                proptest::collection::vec(any::<u32>(), m),
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(any::<bool>(), m),
                1u32..50,
            )
        })
        .prop_map(|(parents, order, swap, spread)| {
            let id = |x: u32| NodeId(x * spread + 7);
            order
                .into_iter()
                .map(|i| {
                    let child = i as u32 + 1;
                    let parent = parents[i] % child;
                    if swap[i] {
                        (id(child), id(parent))
                    } else {
                        (id(parent), id(child))
                    }
                })
                .collect()
        })
}

fn brute_in_degrees(state: &OrientationState) -> BTreeMap<NodeId, u32> {
    let mut d: BTreeMap<NodeId, u32> = state.nodes().map(|x| (x, 0)).collect();
    for e in state.edges() {
        *d.get_mut(&e.head).unwrap() += 1;
    }
    d
}

/// Length of a shortest directed path from any unsaturated node to `target`.
fn brute_distance(state: &OrientationState, target: NodeId) -> Option<usize> {
    let c = state.constraint();
    let degrees = brute_in_degrees(state);
    let mut dist: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (&x, &d) in &degrees {
        if d < c {
            dist.insert(x, 0);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for e in state.edges().iter().filter(|e| e.tail == x) {
            if !dist.contains_key(&e.head) {
                dist.insert(e.head, dist[&x] + 1);
                queue.push_back(e.head);
            }
        }
    }
    dist.get(&target).copied()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sp_keeps_degree_and_step_bounds(edges in forest_strategy(300), c in 2u32..6, seed in any::<u64>()) {
        for config in [SpConfig::new(c), SpConfig::random(c, seed)] {
            let mut alg = ShortestPathOrienter::new(config).unwrap();
            let mut steps = Vec::new();
            for (t, &(u, v)) in edges.iter().enumerate() {
                let s = alg.process_edge(u, v).unwrap();
                prop_assert!(s.flips <= floor_log(t as u64 + 1, c as u64));
                prop_assert!(s.max_in_degree <= c as u64);
                steps.push(s);
            }
            prop_assert!(check_prefix_sums(&steps).is_ok());
            prop_assert!(alg.cumulative_flips() <= sp_total_bound(edges.len() as u64, c));
            alg.state().check_invariants().unwrap();
            prop_assert_eq!(alg.state().recompute_in_degrees(), brute_in_degrees(alg.state()));
            prop_assert_eq!(alg.state().snapshot_in_degrees(), brute_in_degrees(alg.state()));
        }
    }

    #[test]
    fn fixing_variant_stays_within_constraint(edges in forest_strategy(200)) {
        let mut alg = FixingOrienter::new(SpConfig::new(2)).unwrap();
        for &(u, v) in &edges {
            let s = alg.process_edge(u, v).unwrap();
            prop_assert!(s.max_in_degree <= 2);
        }
        alg.state().check_invariants().unwrap();
    }

    #[test]
    fn nearest_unsaturated_is_a_shortest_path(edges in forest_strategy(250), c in 2u32..4) {
        let mut alg = ShortestPathOrienter::new(SpConfig::new(c)).unwrap();
        for &(u, v) in &edges {
            alg.process_edge(u, v).unwrap();
        }
        let state = alg.state();
        for x in state.nodes() {
            let path = state.nearest_unsaturated(x).unwrap();
            prop_assert_eq!(Some(path.len()), brute_distance(state, x));
            prop_assert_eq!(path.target(), x);
            prop_assert!(state.in_degree(path.source()) < c);
            for (i, &e) in path.edges.iter().enumerate() {
                let edge = state.edge(e).unwrap();
                prop_assert_eq!(edge.tail, path.nodes[i]);
                prop_assert_eq!(edge.head, path.nodes[i + 1]);
            }
        }
    }

    #[test]
    fn closing_a_cycle_is_rejected_without_side_effects(edges in forest_strategy(60), pick in any::<(usize, usize)>()) {
        let mut alg = ShortestPathOrienter::new(SpConfig::new(2)).unwrap();
        for &(u, v) in &edges {
            alg.process_edge(u, v).unwrap();
        }
        let nodes: Vec<NodeId> = alg.state().nodes().collect();
        let a = nodes[pick.0 % nodes.len()];
        let b = nodes[pick.1 % nodes.len()];
        prop_assume!(a != b);
        let before = alg.state().snapshot_in_degrees();
        let err = alg.process_edge(a, b).unwrap_err();
        let rejected = matches!(err, Error::AcyclicityViolation { .. });
        prop_assert!(rejected);
        prop_assert_eq!(alg.state().snapshot_in_degrees(), before);
        prop_assert_eq!(alg.state().edge_count(), edges.len());
    }

    /// Random inserts and reversals keep the cached degree data in step with a recount.
    #[test]
    fn cached_in_degrees_survive_arbitrary_reversals(
        ops in proptest::collection::vec((0u32..12, 0u32..12, any::<bool>(), any::<usize>()), 1..120)
    ) {
        let mut s = OrientationState::new(2).unwrap();
        for (a, b, toward_a, pick) in ops {
            if a != b {
                let head = if toward_a { NodeId(a) } else { NodeId(b) };
                s.insert_edge(NodeId(a), NodeId(b), head).unwrap();
            }
            if s.edge_count() > 0 {
                s.reverse_edge(pick % s.edge_count()).unwrap();
            }
            let brute = brute_in_degrees(&s);
            prop_assert_eq!(s.snapshot_in_degrees(), brute.clone());
            prop_assert_eq!(s.max_in_degree(), brute.values().copied().max().unwrap_or(0));
            s.check_invariants().unwrap();
        }
    }

    #[test]
    fn greedy_never_flips(edges in forest_strategy(200)) {
        let mut alg = GreedyOrienter::new();
        for &(u, v) in &edges {
            prop_assert_eq!(alg.process_edge(u, v).unwrap().flips, 0);
        }
        let n = edges.len() as u64;
        prop_assert!(alg.state().max_in_degree() as u64 <= floor_log(n + 1, 2));
    }

    #[test]
    fn allflip_respects_its_bounds(nodes in 4u32..40, forests in 1u32..4, slack in 0u32..3, seed in any::<u64>()) {
        let inst = arboricity_bounded(nodes, forests, seed).unwrap();
        let big = 2 * forests + slack;
        let mut alg = AllFlipOrienter::new(AllFlipConfig::new(forests, big).unwrap()).unwrap();
        for &(u, v) in &inst.edges {
            let s = alg.process_edge(u, v).unwrap();
            prop_assert!(s.max_in_degree <= big as u64);
        }
        let n = inst.edges.len() as u64;
        prop_assert!(alg.cumulative_flips() <= allflip_bound(n, forests, big));
        alg.state().check_invariants().unwrap();
    }
}

#[test]
fn generated_forests_are_forests_with_valid_witnesses() {
    for seed in 0..40 {
        let f = random_forest(500 + seed as usize * 37, seed);
        assert_eq!(f.edges.len(), 500 + seed as usize * 37);
        let mut seen = BTreeSet::new();
        let mut indeg: BTreeMap<NodeId, u32> = BTreeMap::new();
        for (&(u, v), &h) in f.edges.iter().zip(&f.heads) {
            assert!(h == u || h == v);
            assert!(seen.insert((u.min(v), u.max(v))));
            *indeg.entry(h).or_default() += 1;
        }
        assert!(indeg.values().all(|&d| d <= 1));
        let mut alg = ShortestPathOrienter::new(SpConfig::new(2)).unwrap();
        for &(u, v) in &f.edges {
            alg.process_edge(u, v).unwrap();
        }
    }
}
