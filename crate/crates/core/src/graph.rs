//! Oriented-graph state shared by the orientation algorithms.
//!
//! Nodes appear implicitly the first time an edge mentions them. Every edge
//! points from its tail to its head and contributes one to the head's
//! in-degree. Connectivity is tracked with a union-find that only ever merges,
//! since the graph only grows and flips never change components.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap as HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Position of an edge in the arrival sequence (0-based).
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub id: EdgeId,
    pub tail: NodeId,
    pub head: NodeId,
    pub flip_count: u32,
}

impl OrientedEdge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.tail {
            self.head
        } else {
            self.tail
        }
    }
}

/// A directed path `first -> ... -> last` along current edge orientations in
/// which only the first node is unsaturated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathToUnsaturated {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl PathToUnsaturated {
    pub fn trivial(u: NodeId) -> Self {
        PathToUnsaturated {
            nodes: vec![u],
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The unsaturated start of the path.
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    /// The node the path was searched from.
    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("path has at least one node")
    }
}

#[derive(Debug, Clone, Default)]
struct NodeSlot {
    id: NodeId,
    // Inline room for in-degree 3: a saturated c = 2 node plus one pending edge.
    in_edges: SmallVec<[EdgeId; 3]>,
    out_degree: u32,
}

#[derive(Debug, Clone)]
pub struct OrientationState {
    constraint: u32,
    index: HashMap<NodeId, u32>,
    nodes: Vec<NodeSlot>,
    edges: Vec<OrientedEdge>,
    components: UnionFind,
    // histogram[d] = number of nodes whose in-degree is d
    histogram: Vec<usize>,
    max_in_degree: u32,
}

impl OrientationState {
    pub fn new(constraint: u32) -> Result<Self> {
        if constraint < 2 {
            return Err(Error::RejectedInput(format!(
                "in-degree constraint must be at least 2, got {constraint}"
            )));
        }
        Ok(OrientationState {
            constraint,
            index: HashMap::default(),
            nodes: Vec::new(),
            edges: Vec::new(),
            components: UnionFind::new(),
            histogram: vec![0],
            max_in_degree: 0,
        })
    }

    pub fn constraint(&self) -> u32 {
        self.constraint
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    /// Node ids in order of first appearance.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn max_node_id(&self) -> Option<NodeId> {
        self.nodes.iter().map(|n| n.id).max()
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Option<&OrientedEdge> {
        self.edges.get(e)
    }

    fn slot(&self, id: NodeId) -> Option<&NodeSlot> {
        self.index.get(&id).map(|&i| &self.nodes[i as usize])
    }

    pub fn in_degree(&self, id: NodeId) -> u32 {
        self.slot(id).map_or(0, |s| s.in_edges.len() as u32)
    }

    pub fn out_degree(&self, id: NodeId) -> u32 {
        self.slot(id).map_or(0, |s| s.out_degree)
    }

    pub fn in_edges(&self, id: NodeId) -> &[EdgeId] {
        self.slot(id).map_or(&[], |s| s.in_edges.as_slice())
    }

    /// In-neighbors of `id`, one entry per incoming edge.
    pub fn in_neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.in_edges(id).iter().map(|&e| self.edges[e].tail)
    }

    pub fn is_saturated(&self, id: NodeId) -> bool {
        self.in_degree(id) >= self.constraint
    }

    fn ensure_node(&mut self, id: NodeId) -> u32 {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.components.push();
        debug_assert_eq!(i as usize, self.nodes.len());
        self.nodes.push(NodeSlot {
            id,
            ..NodeSlot::default()
        });
        self.index.insert(id, i);
        self.histogram[0] += 1;
        i
    }

    fn bump_degree(&mut self, old: u32, new: u32) {
        self.histogram[old as usize] -= 1;
        if self.histogram.len() <= new as usize {
            self.histogram.resize(new as usize + 1, 0);
        }
        self.histogram[new as usize] += 1;
        if new > self.max_in_degree {
            self.max_in_degree = new;
        }
        while self.max_in_degree > 0 && self.histogram[self.max_in_degree as usize] == 0 {
            self.max_in_degree -= 1;
        }
    }

    /// Appends edge `{u, v}` oriented toward `head` and merges the endpoints' components.
    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, head: NodeId) -> Result<EdgeId> {
        if u == v {
            return Err(Error::RejectedInput(format!("self-loop at node {u}")));
        }
        if head != u && head != v {
            return Err(Error::ContractViolation(format!(
                "head {head} is not an endpoint of ({u}, {v})"
            )));
        }
        let tail = if head == u { v } else { u };
        let ti = self.ensure_node(tail);
        let hi = self.ensure_node(head);
        let id = self.edges.len();
        self.edges.push(OrientedEdge {
            id,
            tail,
            head,
            flip_count: 0,
        });
        let old = self.nodes[hi as usize].in_edges.len() as u32;
        self.nodes[hi as usize].in_edges.push(id);
        self.nodes[ti as usize].out_degree += 1;
        self.bump_degree(old, old + 1);
        self.components.union(ti, hi);
        Ok(id)
    }

    /// Exchanges the tail and head of edge `e`.
    pub fn reverse_edge(&mut self, e: EdgeId) -> Result<()> {
        let edge = *self
            .edges
            .get(e)
            .ok_or_else(|| Error::ContractViolation(format!("unknown edge {e}")))?;
        let hi = self.index[&edge.head] as usize;
        let ti = self.index[&edge.tail] as usize;
        let pos = self.nodes[hi]
            .in_edges
            .iter()
            .position(|&x| x == e)
            .ok_or_else(|| {
                Error::InternalConsistency(format!("edge {e} missing from in-list of its head"))
            })?;
        self.nodes[hi].in_edges.swap_remove(pos);
        let head_old = self.nodes[hi].in_edges.len() as u32 + 1;
        self.nodes[hi].out_degree += 1;
        let tail_old = self.nodes[ti].in_edges.len() as u32;
        self.nodes[ti].in_edges.push(e);
        self.nodes[ti].out_degree -= 1;
        // Raise first so the cached maximum never drops below a live degree.
        self.bump_degree(tail_old, tail_old + 1);
        self.bump_degree(head_old, head_old - 1);
        let edge = &mut self.edges[e];
        std::mem::swap(&mut edge.tail, &mut edge.head);
        edge.flip_count += 1;
        Ok(())
    }

    /// Reverses every edge of `path`; returns the number of flips.
    pub fn flip_path(&mut self, path: &PathToUnsaturated) -> Result<usize> {
        if path.nodes.len() != path.edges.len() + 1 {
            return Err(Error::InternalConsistency(
                "path node and edge counts disagree".into(),
            ));
        }
        for (i, &e) in path.edges.iter().enumerate() {
            let edge = self.edges.get(e).ok_or_else(|| {
                Error::InternalConsistency(format!("path names unknown edge {e}"))
            })?;
            if edge.tail != path.nodes[i] || edge.head != path.nodes[i + 1] {
                return Err(Error::InternalConsistency(format!(
                    "stale path: edge {e} is {} -> {}, expected {} -> {}",
                    edge.tail,
                    edge.head,
                    path.nodes[i],
                    path.nodes[i + 1]
                )));
            }
        }
        for &e in &path.edges {
            self.reverse_edge(e)?;
        }
        Ok(path.len())
    }

    /// Shortest path from an unsaturated node to `u`, searching backwards over
    /// in-edges. Layers are expanded in ascending node-id order and the
    /// smallest-id unsaturated node of the first layer that has one wins.
    pub fn nearest_unsaturated(&self, u: NodeId) -> Result<PathToUnsaturated> {
        let start = *self
            .index
            .get(&u)
            .ok_or_else(|| Error::ContractViolation(format!("unknown node {u}")))?;
        if !self.is_saturated(u) {
            return Ok(PathToUnsaturated::trivial(u));
        }
        // parent[x] = (node x was discovered from, edge x -> parent)
        let mut parent: HashMap<u32, (u32, EdgeId)> = HashMap::default();
        parent.insert(start, (start, usize::MAX));
        let mut frontier = vec![start];
        loop {
            let mut next: Vec<u32> = Vec::new();
            for &x in &frontier {
                let mut incoming: SmallVec<[(NodeId, EdgeId); 4]> = self.nodes[x as usize]
                    .in_edges
                    .iter()
                    .map(|&e| (self.edges[e].tail, e))
                    .collect();
                incoming.sort_unstable();
                for (tail, e) in incoming {
                    let ti = self.index[&tail];
                    if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(ti) {
                        slot.insert((x, e));
                        next.push(ti);
                    }
                }
            }
            if next.is_empty() {
                return Err(Error::Infeasible(format!(
                    "no unsaturated node can reach {u} (cyclic input?)"
                )));
            }
            next.sort_unstable_by_key(|&i| self.nodes[i as usize].id);
            if let Some(&found) = next
                .iter()
                .find(|&&i| (self.nodes[i as usize].in_edges.len() as u32) < self.constraint)
            {
                let mut nodes = vec![self.nodes[found as usize].id];
                let mut edges = Vec::new();
                let mut cur = found;
                while cur != start {
                    let (p, e) = parent[&cur];
                    edges.push(e);
                    nodes.push(self.nodes[p as usize].id);
                    cur = p;
                }
                return Ok(PathToUnsaturated { nodes, edges });
            }
            frontier = next;
        }
    }

    /// True iff `u` and `v` are in one connected component. Unknown nodes are singletons.
    pub fn same_tree(&self, u: NodeId, v: NodeId) -> bool {
        if u == v {
            return true;
        }
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&a), Some(&b)) => self.components.same(a, b),
            _ => false,
        }
    }

    pub fn component_size(&self, u: NodeId) -> usize {
        self.index
            .get(&u)
            .map_or(1, |&i| self.components.set_size(i) as usize)
    }

    /// Cached maximum in-degree, O(1).
    pub fn max_in_degree(&self) -> u32 {
        self.max_in_degree
    }

    /// Maximum in-degree recomputed from the per-node lists.
    pub fn recompute_max_in_degree(&self) -> u32 {
        self.nodes
            .iter()
            .map(|n| n.in_edges.len() as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn snapshot_in_degrees(&self) -> BTreeMap<NodeId, u32> {
        self.nodes
            .iter()
            .map(|n| (n.id, n.in_edges.len() as u32))
            .collect()
    }

    /// In-degrees counted directly from the edge list.
    pub fn recompute_in_degrees(&self) -> BTreeMap<NodeId, u32> {
        let mut deg: BTreeMap<NodeId, u32> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for e in &self.edges {
            *deg.entry(e.head).or_default() += 1;
        }
        deg
    }

    /// Cross-checks every cached structure against the edge list.
    pub fn check_invariants(&self) -> Result<()> {
        if self.recompute_in_degrees() != self.snapshot_in_degrees() {
            return Err(Error::InternalConsistency(
                "cached in-degrees differ from edge list".into(),
            ));
        }
        if self.recompute_max_in_degree() != self.max_in_degree {
            return Err(Error::InternalConsistency(format!(
                "cached max in-degree {} differs from recomputed {}",
                self.max_in_degree,
                self.recompute_max_in_degree()
            )));
        }
        let mut out: HashMap<NodeId, u32> = HashMap::default();
        for e in &self.edges {
            if e.tail == e.head {
                return Err(Error::InternalConsistency(format!(
                    "edge {} is a loop",
                    e.id
                )));
            }
            if !self.in_edges(e.head).contains(&e.id) {
                return Err(Error::InternalConsistency(format!(
                    "edge {} missing from head in-list",
                    e.id
                )));
            }
            *out.entry(e.tail).or_default() += 1;
            if !self.same_tree(e.tail, e.head) {
                return Err(Error::InternalConsistency(format!(
                    "endpoints of edge {} in different components",
                    e.id
                )));
            }
        }
        for n in &self.nodes {
            if out.get(&n.id).copied().unwrap_or(0) != n.out_degree {
                return Err(Error::InternalConsistency(format!(
                    "out-degree of {} is stale",
                    n.id
                )));
            }
        }
        Ok(())
    }
}
