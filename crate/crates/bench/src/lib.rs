//! Fixed workloads shared by the benchmarks.

use recourse_core::adversary::SingleEdgeMode;
use recourse_core::gen::{arboricity_bounded, bmatch_feasible, random_forest};
use recourse_core::{Adversary, NodeId, ShortestPathOrienter, SpConfig};

pub type Edges = Vec<(NodeId, NodeId)>;

pub fn forest(n: usize) -> Edges {
    random_forest(n, 0xbe_4c4).edges
}

/// The edges the robust single-edge construction emits against the default
/// orienter with `rounds` rounds. Replaying them flips one edge `rounds` times.
pub fn single_edge_sequence(rounds: u32) -> Edges {
    let mut alg = ShortestPathOrienter::new(SpConfig::new(2)).expect("c = 2 is valid");
    let mut adv = Adversary::new(&mut alg);
    adv.single_edge_flips(rounds, SingleEdgeMode::Robust)
        .expect("construction runs against the default orienter");
    adv.into_recording().edges
}

/// Union of `forests` random spanning trees on `nodes` nodes.
pub fn bounded_arboricity(nodes: u32, forests: u32) -> Edges {
    arboricity_bounded(nodes, forests, 0xa4b0)
        .expect("parameters are valid")
        .edges
}

pub fn arrivals(n: usize, promised: u32) -> Vec<Vec<NodeId>> {
    bmatch_feasible(n, promised, 0xb3a7)
        .expect("K is positive")
        .arrivals
}
