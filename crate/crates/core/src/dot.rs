//! Graphviz export of orientation and matching states.

use std::fmt::Write as _;

use crate::bmatch::BMatchState;
use crate::graph::OrientationState;

/// Directed edges as oriented; saturated nodes are filled.
pub fn orientation_dot(state: &OrientationState) -> String {
    let mut out = String::from("digraph orientation {\n");
    let mut nodes: Vec<_> = state.nodes().collect();
    nodes.sort_unstable();
    for x in nodes {
        if state.is_saturated(x) {
            writeln!(out, "  \"{x}\" [style=filled, fillcolor=gray];").unwrap();
        } else {
            writeln!(out, "  \"{x}\";").unwrap();
        }
    }
    for e in state.edges() {
        writeln!(out, "  \"{}\" -> \"{}\";", e.tail, e.head).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Residual view: non-matching edges point left to right (dashed), matching
/// edges right to left (bold). Saturated right nodes are filled.
pub fn bmatch_dot(state: &BMatchState) -> String {
    let cap = state.config().capacity();
    let mut out = String::from("digraph bmatching {\n");
    for x in 0..state.left_count() as u32 {
        writeln!(out, "  \"L{x}\" [shape=box];").unwrap();
    }
    for y in state.right_nodes() {
        if state.load(y) >= cap {
            writeln!(out, "  \"R{y}\" [style=filled, fillcolor=gray];").unwrap();
        } else {
            writeln!(out, "  \"R{y}\";").unwrap();
        }
    }
    for x in 0..state.left_count() as u32 {
        let m = state.match_of(x).expect("arrived node is matched");
        for y in state.neighbors(x) {
            if y == m {
                writeln!(out, "  \"R{y}\" -> \"L{x}\" [style=bold];").unwrap();
            } else {
                writeln!(out, "  \"L{x}\" -> \"R{y}\" [style=dashed];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
