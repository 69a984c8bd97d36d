//! Seeded instance generators whose promises hold by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::union_find::UnionFind;

/// An edge sequence with an orientation of in-degree at most `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationInstance {
    pub edges: Vec<(NodeId, NodeId)>,
    /// Head of every edge in a witness orientation.
    pub heads: Vec<NodeId>,
    pub bound: u32,
}

/// Arrivals with a hidden assignment of load at most `promised`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingInstance {
    pub arrivals: Vec<Vec<NodeId>>,
    pub assignment: Vec<NodeId>,
    pub promised: u32,
}

/// A forest with exactly `n` edges.
///
/// Each instance draws an attachment window, so some come out path-like,
/// some star-like and some bushy. A share of edges joins two existing trees
/// instead of adding a leaf.
pub fn random_forest(n: usize, seed: u64) -> OrientationInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = *[1usize, 2, 4, 16, usize::MAX]
        .choose(&mut rng)
        .expect("nonempty");
    let join_share = rng.gen_range(0.0..0.3);
    let mut uf = UnionFind::new();
    let mut edges = Vec::with_capacity(n);
    while edges.len() < n {
        let existing = uf.len();
        let mut joined = false;
        if existing >= 4 && rng.gen_bool(join_share) {
            for _ in 0..8 {
                let a = rng.gen_range(0..existing) as u32;
                let b = rng.gen_range(0..existing) as u32;
                if uf.union(a, b) {
                    edges.push((a, b));
                    joined = true;
                    break;
                }
            }
        }
        if joined {
            continue;
        }
        let v = uf.push();
        let u = if existing == 0 || rng.gen_bool(0.02) {
            uf.push()
        } else {
            let lo = existing.saturating_sub(window);
            rng.gen_range(lo..existing) as u32
        };
        uf.union(u, v);
        edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
    }
    let edges: Vec<(NodeId, NodeId)> = edges
        .into_iter()
        .map(|(u, v)| (NodeId(u), NodeId(v)))
        .collect();
    let heads = forest_heads(&edges);
    OrientationInstance {
        edges,
        heads,
        bound: 1,
    }
}

/// Root-away heads for an acyclic edge list: each tree hangs from its
/// first-seen node in arrival order, which gives in-degree at most one.
fn forest_heads(edges: &[(NodeId, NodeId)]) -> Vec<NodeId> {
    use rustc_hash::FxHashMap;
    // Dense indices in first-seen order, then a flat adjacency array.
    let mut index: FxHashMap<NodeId, u32> = FxHashMap::default();
    let mut ids = Vec::new();
    let mut ends = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        let mut dense = |x: NodeId| {
            *index.entry(x).or_insert_with(|| {
                ids.push(x);
                ids.len() as u32 - 1
            })
        };
        ends.push((dense(u), dense(v)));
    }
    let mut start = vec![0usize; ids.len() + 1];
    for &(a, b) in &ends {
        start[a as usize + 1] += 1;
        start[b as usize + 1] += 1;
    }
    for i in 0..ids.len() {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut adj = vec![(0u32, 0usize); 2 * ends.len()];
    for (e, &(a, b)) in ends.iter().enumerate() {
        adj[fill[a as usize]] = (b, e);
        fill[a as usize] += 1;
        adj[fill[b as usize]] = (a, e);
        fill[b as usize] += 1;
    }
    let mut heads = vec![NodeId(0); edges.len()];
    let mut seen = vec![false; ids.len()];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..ids.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root as u32);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &adj[start[x as usize]..start[x as usize + 1]] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    heads[e] = ids[y as usize];
                    queue.push_back(y);
                }
            }
        }
    }
    heads
}

/// Union of `forests` random spanning trees on `nodes` nodes, duplicates
/// removed and arrival order shuffled. Each tree oriented away from its root
/// contributes at most one in-edge per node, so the witness has in-degree at
/// most `forests`.
pub fn arboricity_bounded(nodes: u32, forests: u32, seed: u64) -> Result<OrientationInstance> {
    if nodes < 2 || forests == 0 {
        return Err(Error::RejectedInput(format!(
            "need at least 2 nodes and 1 forest, got {nodes} nodes and {forests} forests"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut oriented = Vec::new();
    for _ in 0..forests {
        let mut perm: Vec<u32> = (0..nodes).collect();
        perm.shuffle(&mut rng);
        for i in 1..perm.len() {
            if rng.gen_bool(0.1) {
                continue;
            }
            let parent = perm[rng.gen_range(0..i)];
            let child = perm[i];
            let key = (parent.min(child), parent.max(child));
            if seen.insert(key) {
                oriented.push((parent, child));
            }
        }
    }
    oriented.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(oriented.len());
    let mut heads = Vec::with_capacity(oriented.len());
    for (parent, child) in oriented {
        edges.push(if rng.gen_bool(0.5) {
            (NodeId(parent), NodeId(child))
        } else {
            (NodeId(child), NodeId(parent))
        });
        heads.push(NodeId(child));
    }
    Ok(OrientationInstance {
        edges,
        heads,
        bound: forests,
    })
}

/// `n` arrivals over ⌈n/K⌉ right nodes (at least two). A hidden assignment
/// fills the right side to load K. Each arrival then gets one to three extra
/// neighbors: some near its hidden partner, some anywhere, and many from a
/// small hot set that saturates early and forces augmenting paths.
pub fn bmatch_feasible(n: usize, promised: u32, seed: u64) -> Result<MatchingInstance> {
    if promised == 0 {
        return Err(Error::RejectedInput("K must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rights = n.div_ceil(promised as usize).max(2);
    let hot = (rights / 16).max(1) as u32;
    let mut slots: Vec<u32> = (0..n).map(|i| (i / promised as usize) as u32).collect();
    slots.shuffle(&mut rng);
    let mut arrivals = Vec::with_capacity(n);
    for &w in &slots {
        let extra = rng.gen_range(1..=3usize).min(rights - 1);
        let mut list = vec![w];
        while list.len() < extra + 1 {
            let roll: f64 = rng.gen();
            let y = if roll < 0.4 {
                rng.gen_range(0..hot)
            } else if roll < 0.75 {
                let off = rng.gen_range(1..=3) as i64 * if rng.gen_bool(0.5) { 1 } else { -1 };
                (w as i64 + off).rem_euclid(rights as i64) as u32
            } else {
                rng.gen_range(0..rights as u32)
            };
            if !list.contains(&y) {
                list.push(y);
            }
        }
        list.shuffle(&mut rng);
        arrivals.push(list.into_iter().map(NodeId).collect());
    }
    Ok(MatchingInstance {
        arrivals,
        assignment: slots.into_iter().map(NodeId).collect(),
        promised,
    })
}
