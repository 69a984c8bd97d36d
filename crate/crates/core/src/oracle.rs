//! Offline optima for small instances: minimum maximum in-degree over all
//! orientations, minimum maximum load over all assignments, and arboricity.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::union_find::UnionFind;

pub const EXHAUSTIVE_EDGE_LIMIT: usize = 22;
pub const EXHAUSTIVE_LEFT_LIMIT: usize = 8;
pub const ARBORICITY_NODE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MinMaxIndegree,
    MinMaxLoad,
    Arboricity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Forest shortcut when it applies, otherwise exhaustive within limits and feasibility beyond.
    Auto,
    Exhaustive,
    Feasibility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Head of every edge, in input order.
    Orientation(Vec<NodeId>),
    /// Right node of every left node, in arrival order.
    Assignment(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub instance_id: String,
    pub metric: Metric,
    #[serde(serialize_with = "ratio_text")]
    pub value: Ratio<u64>,
    pub ceiling: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

fn ratio_text<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *r.denom() == 1 {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

impl OracleReport {
    fn integer(instance_id: String, metric: Metric, value: u64, witness: Option<Witness>) -> Self {
        OracleReport {
            instance_id,
            metric,
            value: Ratio::from_integer(value),
            ceiling: value,
            witness,
        }
    }
}

/// 64-bit FNV-1a of the canonical text of an edge list.
pub fn edges_instance_id(edges: &[(NodeId, NodeId)]) -> String {
    let mut h = Fnv::new();
    for (u, v) in edges {
        h.write(format!("{u} {v}\n").as_bytes());
    }
    h.hex()
}

/// 64-bit FNV-1a of the canonical text of a b-matching instance.
pub fn arrivals_instance_id(arrivals: &[Vec<NodeId>]) -> String {
    let mut h = Fnv::new();
    for (i, a) in arrivals.iter().enumerate() {
        h.write(i.to_string().as_bytes());
        for y in a {
            h.write(format!(" {y}").as_bytes());
        }
        h.write(b"\n");
    }
    h.hex()
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn hex(&self) -> String {
        format!("{:016x}", self.0)
    }
}

struct Compact {
    index: HashMap<NodeId, u32>,
    ids: Vec<NodeId>,
}

impl Compact {
    fn new() -> Self {
        Compact {
            index: HashMap::new(),
            ids: Vec::new(),
        }
    }

    fn get(&mut self, x: NodeId) -> u32 {
        *self.index.entry(x).or_insert_with(|| {
            self.ids.push(x);
            self.ids.len() as u32 - 1
        })
    }
}

fn compact_edges(edges: &[(NodeId, NodeId)]) -> Result<(Compact, Vec<(u32, u32)>)> {
    let mut c = Compact::new();
    let mut out = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            return Err(Error::RejectedInput(format!("self-loop at node {u}")));
        }
        out.push((c.get(u), c.get(v)));
    }
    Ok((c, out))
}

fn is_forest(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut uf = UnionFind::new();
    for _ in 0..n {
        uf.push();
    }
    edges.iter().all(|&(u, v)| uf.union(u, v))
}

/// Orients every tree away from its smallest node id.
fn root_away_heads(c: &Compact, edges: &[(u32, u32)]) -> Vec<NodeId> {
    let n = c.ids.len();
    let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u as usize].push((v, e));
        adj[v as usize].push((u, e));
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by_key(|&x| c.ids[x as usize]);
    let mut seen = vec![false; n];
    let mut heads = vec![NodeId(0); edges.len()];
    for root in order {
        if seen[root as usize] {
            continue;
        }
        seen[root as usize] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    heads[e] = c.ids[y as usize];
                    queue.push_back(y);
                }
            }
        }
    }
    heads
}

/// Assigns each item to one of its allowed slots with at most `cap` items per
/// slot, by augmenting paths. Returns the chosen slot for every item.
pub fn capacitated_assignment(choices: &[Vec<u32>], slots: usize, cap: u32) -> Option<Vec<u32>> {
    const NONE: u32 = u32::MAX;
    let mut load = vec![0u32; slots];
    let mut holders: Vec<Vec<u32>> = vec![Vec::new(); slots];
    let mut assigned = vec![NONE; choices.len()];
    let mut pending = Vec::new();
    for (i, opts) in choices.iter().enumerate() {
        if opts.is_empty() {
            return None;
        }
        match opts
            .iter()
            .copied()
            .filter(|&s| load[s as usize] < cap)
            .min_by_key(|&s| load[s as usize])
        {
            Some(s) => {
                load[s as usize] += 1;
                holders[s as usize].push(i as u32);
                assigned[i] = s;
            }
            None => pending.push(i),
        }
    }
    let mut from = vec![(NONE, NONE); slots];
    let mut visited = vec![false; slots];
    let mut touched = Vec::new();
    for i in pending {
        for &s in &touched {
            visited[s as usize] = false;
        }
        touched.clear();
        let mut queue = VecDeque::new();
        for &s in &choices[i] {
            if !visited[s as usize] {
                visited[s as usize] = true;
                touched.push(s);
                from[s as usize] = (NONE, i as u32);
                queue.push_back(s);
            }
        }
        let mut free = None;
        while let Some(s) = queue.pop_front() {
            if load[s as usize] < cap {
                free = Some(s);
                break;
            }
            for &j in &holders[s as usize] {
                for &t in &choices[j as usize] {
                    if !visited[t as usize] {
                        visited[t as usize] = true;
                        touched.push(t);
                        from[t as usize] = (s, j);
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut t = free?;
        load[t as usize] += 1;
        loop {
            let (s, j) = from[t as usize];
            holders[t as usize].push(j);
            assigned[j as usize] = t;
            if s == NONE {
                break;
            }
            let pos = holders[s as usize]
                .iter()
                .position(|&h| h == j)
                .expect("holder recorded");
            holders[s as usize].swap_remove(pos);
            t = s;
        }
    }
    Some(assigned)
}

/// Smallest possible maximum in-degree over all orientations of `edges`.
pub fn min_max_indegree(edges: &[(NodeId, NodeId)], mode: OracleMode) -> Result<OracleReport> {
    let id = edges_instance_id(edges);
    let (c, compact) = compact_edges(edges)?;
    let n = c.ids.len();
    if mode == OracleMode::Auto && is_forest(n, &compact) {
        let value = u64::from(!edges.is_empty());
        let heads = root_away_heads(&c, &compact);
        return Ok(OracleReport::integer(
            id,
            Metric::MinMaxIndegree,
            value,
            Some(Witness::Orientation(heads)),
        ));
    }
    let exhaustive = match mode {
        OracleMode::Exhaustive => {
            if edges.len() > EXHAUSTIVE_EDGE_LIMIT {
                return Err(Error::Capacity(format!(
                    "exhaustive orientation search is limited to {EXHAUSTIVE_EDGE_LIMIT} edges, got {}",
                    edges.len()
                )));
            }
            true
        }
        OracleMode::Feasibility => false,
        OracleMode::Auto => edges.len() <= EXHAUSTIVE_EDGE_LIMIT,
    };
    let (value, heads) = if exhaustive {
        exhaustive_orientation(n, &compact)
    } else {
        feasibility_orientation(n, &compact)
    };
    let heads = heads.into_iter().map(|h| c.ids[h as usize]).collect();
    Ok(OracleReport::integer(
        id,
        Metric::MinMaxIndegree,
        value,
        Some(Witness::Orientation(heads)),
    ))
}

fn exhaustive_orientation(n: usize, edges: &[(u32, u32)]) -> (u64, Vec<u32>) {
    struct Search<'a> {
        edges: &'a [(u32, u32)],
        indeg: Vec<u32>,
        current: Vec<u32>,
        best: u32,
        best_heads: Vec<u32>,
    }
    impl Search<'_> {
        fn go(&mut self, e: usize, cur_max: u32) {
            if cur_max >= self.best {
                return;
            }
            if e == self.edges.len() {
                self.best = cur_max;
                self.best_heads = self.current.clone();
                return;
            }
            let (u, v) = self.edges[e];
            let (first, second) = if self.indeg[u as usize] <= self.indeg[v as usize] {
                (u, v)
            } else {
                (v, u)
            };
            for h in [first, second] {
                self.indeg[h as usize] += 1;
                self.current.push(h);
                let m = cur_max.max(self.indeg[h as usize]);
                self.go(e + 1, m);
                self.current.pop();
                self.indeg[h as usize] -= 1;
            }
        }
    }
    let mut s = Search {
        edges,
        indeg: vec![0; n],
        current: Vec::with_capacity(edges.len()),
        best: edges.len() as u32 + 1,
        best_heads: Vec::new(),
    };
    s.go(0, 0);
    (s.best.min(edges.len() as u32) as u64, s.best_heads)
}

fn feasibility_orientation(n: usize, edges: &[(u32, u32)]) -> (u64, Vec<u32>) {
    if edges.is_empty() {
        return (0, Vec::new());
    }
    let choices: Vec<Vec<u32>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();
    let (mut lo, mut hi) = (1u32, edges.len() as u32);
    let mut best = capacitated_assignment(&choices, n, hi).expect("every edge fits at capacity m");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match capacitated_assignment(&choices, n, mid) {
            Some(a) => {
                hi = mid;
                best = a;
            }
            None => lo = mid + 1,
        }
    }
    (lo as u64, best)
}

/// Smallest b such that every left node can be assigned to a neighbor with
/// all right loads at most b.
pub fn min_max_load(arrivals: &[Vec<NodeId>], mode: OracleMode) -> Result<OracleReport> {
    let id = arrivals_instance_id(arrivals);
    let mut c = Compact::new();
    let mut choices = Vec::with_capacity(arrivals.len());
    for (i, a) in arrivals.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::RejectedInput(format!(
                "left node {i} has no neighbors"
            )));
        }
        let mut opts: Vec<u32> = a.iter().map(|&y| c.get(y)).collect();
        opts.sort_unstable();
        opts.dedup();
        choices.push(opts);
    }
    if arrivals.is_empty() {
        return Ok(OracleReport::integer(id, Metric::MinMaxLoad, 0, None));
    }
    let (value, assignment) = match mode {
        OracleMode::Exhaustive => {
            if arrivals.len() > EXHAUSTIVE_LEFT_LIMIT {
                return Err(Error::Capacity(format!(
                    "exhaustive assignment search is limited to {EXHAUSTIVE_LEFT_LIMIT} left nodes, got {}",
                    arrivals.len()
                )));
            }
            exhaustive_assignment(c.ids.len(), &choices)
        }
        OracleMode::Auto | OracleMode::Feasibility => {
            let slots = c.ids.len();
            let (mut lo, mut hi) = (1u32, arrivals.len() as u32);
            let mut best =
                capacitated_assignment(&choices, slots, hi).expect("fits at capacity |L|");
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                match capacitated_assignment(&choices, slots, mid) {
                    Some(a) => {
                        hi = mid;
                        best = a;
                    }
                    None => lo = mid + 1,
                }
            }
            (lo as u64, best)
        }
    };
    let witness = assignment.into_iter().map(|s| c.ids[s as usize]).collect();
    Ok(OracleReport::integer(
        id,
        Metric::MinMaxLoad,
        value,
        Some(Witness::Assignment(witness)),
    ))
}

fn exhaustive_assignment(slots: usize, choices: &[Vec<u32>]) -> (u64, Vec<u32>) {
    let mut load = vec![0u32; slots];
    let mut current = Vec::with_capacity(choices.len());
    let mut best = (u32::MAX, Vec::new());
    fn go(
        i: usize,
        choices: &[Vec<u32>],
        load: &mut [u32],
        current: &mut Vec<u32>,
        cur_max: u32,
        best: &mut (u32, Vec<u32>),
    ) {
        if i == choices.len() {
            if cur_max < best.0 {
                *best = (cur_max, current.clone());
            }
            return;
        }
        for &s in &choices[i] {
            load[s as usize] += 1;
            current.push(s);
            go(
                i + 1,
                choices,
                load,
                current,
                cur_max.max(load[s as usize]),
                best,
            );
            current.pop();
            load[s as usize] -= 1;
        }
    }
    go(0, choices, &mut load, &mut current, 0, &mut best);
    (best.0 as u64, best.1)
}

/// Hall's condition for K: every set S of left nodes has |N(S)| ≥ |S|/K.
/// Enumerates all subsets, so only for small instances.
pub fn hall_condition(arrivals: &[Vec<NodeId>], k: u32) -> Result<bool> {
    if arrivals.len() > EXHAUSTIVE_LEFT_LIMIT * 2 {
        return Err(Error::Capacity(format!(
            "subset enumeration is limited to {} left nodes",
            EXHAUSTIVE_LEFT_LIMIT * 2
        )));
    }
    let n = arrivals.len();
    for mask in 1u32..(1 << n) {
        let mut nb: Vec<NodeId> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .flat_map(|i| arrivals[i].iter().copied())
            .collect();
        nb.sort_unstable();
        nb.dedup();
        if (nb.len() as u64) * (k as u64) < u64::from(mask.count_ones()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Maximum over node subsets J with at least two nodes of |E(J)| / (|V(J)| − 1).
pub fn arboricity(edges: &[(NodeId, NodeId)]) -> Result<OracleReport> {
    let id = edges_instance_id(edges);
    let (c, compact) = compact_edges(edges)?;
    let n = c.ids.len();
    if is_forest(n, &compact) {
        let value = u64::from(!edges.is_empty());
        return Ok(OracleReport::integer(id, Metric::Arboricity, value, None));
    }
    if n > ARBORICITY_NODE_LIMIT {
        return Err(Error::Capacity(format!(
            "arboricity search is limited to {ARBORICITY_NODE_LIMIT} nodes, got {n}"
        )));
    }
    let masks: Vec<u32> = compact.iter().map(|&(u, v)| (1 << u) | (1 << v)).collect();
    let mut best = Ratio::from_integer(0u64);
    for subset in 1u32..(1 << n) {
        let size = subset.count_ones() as u64;
        if size < 2 {
            continue;
        }
        let inside = masks.iter().filter(|&&m| m & subset == m).count() as u64;
        let r = Ratio::new(inside, size - 1);
        if r > best {
            best = r;
        }
    }
    Ok(OracleReport {
        instance_id: id,
        metric: Metric::Arboricity,
        ceiling: best.ceil().to_integer(),
        value: best,
        witness: None,
    })
}

/// Maximum in-degree reached by a candidate orientation, per node.
pub fn indegrees_of(heads: &[NodeId]) -> BTreeMap<NodeId, u32> {
    let mut m = BTreeMap::new();
    for &h in heads {
        *m.entry(h).or_insert(0) += 1;
    }
    m
}
