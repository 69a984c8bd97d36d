//! Online bipartite b-matching by shortest augmenting paths.
//!
//! Left nodes arrive one at a time with their neighbor sets and are named by
//! arrival index. Right nodes are named by the ids in those sets. Every left
//! node stays matched to one neighbor and every right node carries at most
//! C·K matched left nodes.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::step::StepRecord;

mod tracker;

pub use tracker::{HeightChange, HeightNode, HeightTracker};

/// Which unsaturated neighbor a new arrival takes when it has several.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickPolicy {
    LowestLoadThenId,
    FirstListed,
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BMatchConfig {
    /// K: the load an offline assignment is promised to achieve.
    pub promised: u32,
    /// C: the relaxation factor, so the capacity is C·K.
    pub factor: u32,
    pub pick: PickPolicy,
}

impl BMatchConfig {
    pub fn new(promised: u32, factor: u32) -> Result<Self> {
        let cfg = BMatchConfig {
            promised,
            factor,
            pick: PickPolicy::LowestLoadThenId,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_pick(mut self, pick: PickPolicy) -> Self {
        self.pick = pick;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.promised == 0 {
            return Err(Error::RejectedInput("K must be at least 1".into()));
        }
        if self.factor < 2 {
            return Err(Error::RejectedInput(format!(
                "C must be at least 2, got {}",
                self.factor
            )));
        }
        Ok(())
    }

    pub fn capacity(&self) -> u32 {
        self.factor * self.promised
    }
}

/// A right node changing partners during one augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapEvent {
    pub right: NodeId,
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone)]
struct LeftSlot {
    neighbors: Vec<u32>,
    matched: u32,
}

#[derive(Debug, Clone)]
struct RightSlot {
    id: NodeId,
    matched: BTreeSet<u32>,
    adjacent: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct BMatchState {
    config: BMatchConfig,
    left: Vec<LeftSlot>,
    right_index: HashMap<NodeId, u32>,
    right: Vec<RightSlot>,
    max_load: u32,
    cumulative: u64,
    rng: Option<ChaCha8Rng>,
    last_swaps: Vec<SwapEvent>,
}

impl BMatchState {
    pub fn new(config: BMatchConfig) -> Result<Self> {
        config.validate()?;
        let rng = match config.pick {
            PickPolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Ok(BMatchState {
            config,
            left: Vec::new(),
            right_index: HashMap::new(),
            right: Vec::new(),
            max_load: 0,
            cumulative: 0,
            rng,
            last_swaps: Vec::new(),
        })
    }

    pub fn config(&self) -> &BMatchConfig {
        &self.config
    }

    pub fn left_count(&self) -> usize {
        self.left.len()
    }

    pub fn right_count(&self) -> usize {
        self.right.len()
    }

    pub fn cumulative_swaps(&self) -> u64 {
        self.cumulative
    }

    pub fn max_load(&self) -> u32 {
        self.max_load
    }

    pub fn load(&self, y: NodeId) -> u32 {
        self.right_index
            .get(&y)
            .map_or(0, |&r| self.right[r as usize].matched.len() as u32)
    }

    /// Current partner of left node `x`.
    pub fn match_of(&self, x: u32) -> Option<NodeId> {
        self.left
            .get(x as usize)
            .map(|l| self.right[l.matched as usize].id)
    }

    pub fn neighbors(&self, x: u32) -> impl Iterator<Item = NodeId> + '_ {
        self.left
            .get(x as usize)
            .into_iter()
            .flat_map(|l| l.neighbors.iter().map(|&r| self.right[r as usize].id))
    }

    /// Right nodes in increasing id order.
    pub fn right_nodes(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.right.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        ids
    }

    /// Swaps made by the most recent arrival.
    pub fn last_swaps(&self) -> &[SwapEvent] {
        &self.last_swaps
    }

    fn saturated(&self, r: u32) -> bool {
        self.right[r as usize].matched.len() as u32 >= self.config.capacity()
    }

    fn intern(&mut self, y: NodeId) -> u32 {
        if let Some(&r) = self.right_index.get(&y) {
            return r;
        }
        let r = self.right.len() as u32;
        self.right.push(RightSlot {
            id: y,
            matched: BTreeSet::new(),
            adjacent: Vec::new(),
        });
        self.right_index.insert(y, r);
        r
    }

    /// Matches a new left node, augmenting along a shortest residual path if
    /// all its neighbors are saturated. On error the state is unchanged.
    pub fn process_arrival(&mut self, neighbors: &[NodeId]) -> Result<StepRecord> {
        if neighbors.is_empty() {
            return Err(Error::RejectedInput("arrival has no neighbors".into()));
        }
        let mut ids: Vec<NodeId> = neighbors.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let cap = self.config.capacity();
        let known: Vec<Option<u32>> = ids
            .iter()
            .map(|y| self.right_index.get(y).copied())
            .collect();

        let unsaturated: Vec<usize> = known
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none_or(|r| (self.right[r as usize].matched.len() as u32) < cap))
            .map(|(i, _)| i)
            .collect();

        let x0 = self.left.len() as u32;
        self.last_swaps.clear();
        let (chosen, path_len, swaps) = if !unsaturated.is_empty() {
            let pick = self.pick_unsaturated(neighbors, &ids, &known, &unsaturated);
            (pick, 1u64, Vec::new())
        } else {
            let in_set: Vec<u32> = known
                .iter()
                .map(|r| r.expect("saturated nodes are known"))
                .collect();
            let path = self.augmenting_path(&in_set).ok_or_else(|| {
                Error::Infeasible(format!(
                    "arrival {x0} cannot be matched: the input does not admit a {}-matching",
                    self.config.promised
                ))
            })?;
            (None, path.len() as u64 * 2 - 1, path)
        };

        let adj: Vec<u32> = ids.iter().map(|&y| self.intern(y)).collect();
        for &r in &adj {
            self.right[r as usize].adjacent.push(x0);
        }
        let target = match chosen {
            Some(i) => adj[i],
            None => {
                // path holds (y_1, x_1), (y_2, x_2), ..., (y_k, _) with x_i the current partner of y_i.
                let k = swaps.len();
                let mut prev = x0;
                for &(y, x) in &swaps[..k - 1] {
                    self.last_swaps.push(SwapEvent {
                        right: self.right[y as usize].id,
                        from: x,
                        to: prev,
                    });
                    prev = x;
                }
                for i in (1..k).rev() {
                    let (yi, xi) = swaps[i - 1];
                    let (ynext, _) = swaps[i];
                    self.right[yi as usize].matched.remove(&xi);
                    self.right[ynext as usize].matched.insert(xi);
                    self.left[xi as usize].matched = ynext;
                }
                swaps[0].0
            }
        };
        self.right[target as usize].matched.insert(x0);
        self.left.push(LeftSlot {
            neighbors: adj,
            matched: target,
        });
        // Loads only grow at the end of a path, so the maximum is monotone.
        let end = match chosen {
            Some(_) => target,
            None => swaps.last().expect("nonempty path").0,
        };
        self.max_load = self
            .max_load
            .max(self.right[end as usize].matched.len() as u32);
        let step_swaps = self.last_swaps.len() as u64;
        self.cumulative += step_swaps;
        Ok(StepRecord {
            step: x0 as usize,
            flips: step_swaps,
            cumulative_flips: self.cumulative,
            max_in_degree: self.max_load as u64,
            path_length_used: path_len,
        })
    }

    fn pick_unsaturated(
        &mut self,
        listed: &[NodeId],
        ids: &[NodeId],
        known: &[Option<u32>],
        unsaturated: &[usize],
    ) -> Option<usize> {
        let load = |i: usize| known[i].map_or(0, |r| self.right[r as usize].matched.len());
        let i = match self.config.pick {
            PickPolicy::LowestLoadThenId => *unsaturated
                .iter()
                .min_by_key(|&&i| (load(i), ids[i]))
                .expect("nonempty"),
            PickPolicy::FirstListed => {
                let first = listed
                    .iter()
                    .find(|y| {
                        let i = ids.binary_search(y).expect("listed id is present");
                        unsaturated.contains(&i)
                    })
                    .expect("an unsaturated neighbor exists");
                ids.binary_search(first).expect("present")
            }
            PickPolicy::Random { .. } => {
                let rng = self.rng.as_mut().expect("random policy owns an rng");
                unsaturated[rng.gen_range(0..unsaturated.len())]
            }
        };
        Some(i)
    }

    /// Layered BFS over residual arcs from a virtual left node adjacent to
    /// `start` (all saturated). Returns the right nodes on the path with the
    /// left node currently matched to each, the last entry being unsaturated.
    fn augmenting_path(&self, start: &[u32]) -> Option<Vec<(u32, u32)>> {
        const NONE: u32 = u32::MAX;
        let mut parent_right = vec![NONE; self.right.len()];
        let mut via_left = vec![NONE; self.right.len()];
        let mut left_seen = vec![false; self.left.len()];
        let mut right_seen = vec![false; self.right.len()];
        let mut layer: Vec<u32> = start.to_vec();
        layer.sort_unstable_by_key(|&r| self.right[r as usize].id);
        for &r in &layer {
            right_seen[r as usize] = true;
        }
        let found = loop {
            if layer.is_empty() {
                return None;
            }
            if let Some(&r) = layer.iter().find(|&&r| !self.saturated(r)) {
                break r;
            }
            let mut next = Vec::new();
            for &y in &layer {
                for &x in &self.right[y as usize].matched {
                    if left_seen[x as usize] {
                        continue;
                    }
                    left_seen[x as usize] = true;
                    for &z in &self.left[x as usize].neighbors {
                        if z == y || right_seen[z as usize] {
                            continue;
                        }
                        right_seen[z as usize] = true;
                        parent_right[z as usize] = y;
                        via_left[z as usize] = x;
                        next.push(z);
                    }
                }
            }
            next.sort_unstable_by_key(|&r| self.right[r as usize].id);
            layer = next;
        };
        let mut rev = vec![(found, NONE)];
        let mut cur = found;
        while parent_right[cur as usize] != NONE {
            let x = via_left[cur as usize];
            cur = parent_right[cur as usize];
            rev.push((cur, x));
        }
        rev.reverse();
        Some(rev)
    }

    /// Residual distances to the nearest unsaturated right node.
    pub fn heights(&self) -> HeightReport {
        const INF: u32 = u32::MAX;
        let mut hl = vec![INF; self.left.len()];
        let mut hr = vec![INF; self.right.len()];
        let mut queue = std::collections::VecDeque::new();
        for r in 0..self.right.len() as u32 {
            if !self.saturated(r) {
                hr[r as usize] = 0;
                queue.push_back((true, r));
            }
        }
        while let Some((is_right, v)) = queue.pop_front() {
            if is_right {
                let d = hr[v as usize];
                for &x in &self.right[v as usize].adjacent {
                    if self.left[x as usize].matched != v && hl[x as usize] == INF {
                        hl[x as usize] = d + 1;
                        queue.push_back((false, x));
                    }
                }
            } else {
                let d = hl[v as usize];
                let y = self.left[v as usize].matched;
                if hr[y as usize] == INF {
                    hr[y as usize] = d + 1;
                    queue.push_back((true, y));
                }
            }
        }
        let finite = |h: u32| (h != INF).then_some(h);
        let left: Vec<Option<u32>> = hl.into_iter().map(finite).collect();
        let right: Vec<(NodeId, Option<u32>)> = self
            .right
            .iter()
            .zip(hr)
            .map(|(slot, h)| (slot.id, finite(h)))
            .collect();
        HeightReport::from_parts(left, right)
    }

    /// Recomputes loads from the matching and checks every stored invariant.
    pub fn check_invariants(&self) -> Result<()> {
        let cap = self.config.capacity();
        let mut loads = vec![0u32; self.right.len()];
        for (x, slot) in self.left.iter().enumerate() {
            if !slot.neighbors.contains(&slot.matched) {
                return Err(Error::InternalConsistency(format!(
                    "left node {x} matched outside its neighbor set"
                )));
            }
            loads[slot.matched as usize] += 1;
            if !self.right[slot.matched as usize]
                .matched
                .contains(&(x as u32))
            {
                return Err(Error::InternalConsistency(format!(
                    "left node {x} missing from its partner's list"
                )));
            }
        }
        for (r, slot) in self.right.iter().enumerate() {
            if slot.matched.len() as u32 != loads[r] {
                return Err(Error::InternalConsistency(format!(
                    "right node {} stores load {} but recount gives {}",
                    slot.id,
                    slot.matched.len(),
                    loads[r]
                )));
            }
            if loads[r] > cap {
                return Err(Error::InternalConsistency(format!(
                    "right node {} has load {} above capacity {cap}",
                    slot.id, loads[r]
                )));
            }
        }
        Ok(())
    }
}

/// Heights of every node plus the derived potential and tail counts.
///
/// Left nodes whose only neighbor is their partner have no residual arcs
/// and therefore infinite height; they are counted separately and left out
/// of the potential and the tail counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightReport {
    pub left: Vec<Option<u32>>,
    /// Right nodes in first-seen order, which only ever grows at the end.
    pub right: Vec<(NodeId, Option<u32>)>,
    /// Sum of (height − 1)/2 over left nodes of finite height.
    pub phi: u64,
    /// Entry h counts left nodes with finite height at least 2h + 1.
    pub tail_counts: Vec<u64>,
    pub infinite_left: usize,
}

impl HeightReport {
    fn from_parts(left: Vec<Option<u32>>, right: Vec<(NodeId, Option<u32>)>) -> Self {
        let mut phi = 0u64;
        let mut infinite_left = 0;
        let mut by_height: Vec<u64> = Vec::new();
        for h in &left {
            match h {
                Some(h) => {
                    phi += (*h as u64).saturating_sub(1) / 2;
                    let bucket = (*h as usize).saturating_sub(1) / 2;
                    if by_height.len() <= bucket {
                        by_height.resize(bucket + 1, 0);
                    }
                    by_height[bucket] += 1;
                }
                None => infinite_left += 1,
            }
        }
        let mut tail_counts = by_height;
        for h in (0..tail_counts.len().saturating_sub(1)).rev() {
            tail_counts[h] += tail_counts[h + 1];
        }
        HeightReport {
            left,
            right,
            phi,
            tail_counts,
            infinite_left,
        }
    }

    /// Finite heights with the wrong parity, as (is_left, index or id).
    pub fn parity_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (x, h) in self.left.iter().enumerate() {
            if matches!(h, Some(h) if h % 2 == 0) {
                bad.push(format!("left {x}"));
            }
        }
        for (y, h) in &self.right {
            if matches!(h, Some(h) if h % 2 == 1) {
                bad.push(format!("right {y}"));
            }
        }
        bad
    }

    /// First h with tail_counts[h] · base^h > |L|, if any.
    pub fn tail_violation(&self, base: u64) -> Option<usize> {
        first_tail_violation(&self.tail_counts, self.left.len(), base)
    }
}

fn first_tail_violation(tail_counts: &[u64], left: usize, base: u64) -> Option<usize> {
    let mut scale = 1u128;
    for (h, &count) in tail_counts.iter().enumerate() {
        if count as u128 * scale > left as u128 {
            return Some(h);
        }
        scale = scale.saturating_mul(base as u128);
    }
    None
}

/// Which height property failed during an audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditFailure {
    HeightDecreased {
        node: String,
        before: Option<u32>,
        after: Option<u32>,
    },
    SwapGap {
        swap: SwapEvent,
        before: Option<u32>,
        after: Option<u32>,
    },
    /// The arriving node ended at finite height but the potential grew by
    /// less than the number of swaps.
    PotentialGrowth { before: u64, after: u64, swaps: u64 },
    /// The potential fell below the swaps made so far.
    PotentialBelowSwaps { phi: u64, swaps: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditViolation {
    pub step: usize,
    pub failure: AuditFailure,
}

/// Streaming check of the height properties over consecutive reports.
#[derive(Debug, Default)]
pub struct HeightAudit {
    steps: usize,
    swaps: u64,
    violations: Vec<AuditViolation>,
}

fn not_below(after: Option<u32>, before: Option<u32>) -> bool {
    match (before, after) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(b), Some(a)) => a >= b,
    }
}

/// A left node that takes over a swapped right node sits at least two
/// levels above where the one it replaced stood.
fn swap_gap_holds(before: Option<u32>, after: Option<u32>) -> bool {
    match (before, after) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(b), Some(a)) => a >= b + 2,
    }
}

impl HeightAudit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Compares the reports taken just before and just after one arrival.
    pub fn observe(&mut self, before: &HeightReport, after: &HeightReport, swaps: &[SwapEvent]) {
        let step = self.steps;
        self.steps += 1;
        for (x, &b) in before.left.iter().enumerate() {
            let a = after.left[x];
            if !not_below(a, b) {
                self.violations.push(AuditViolation {
                    step,
                    failure: AuditFailure::HeightDecreased {
                        node: format!("left {x}"),
                        before: b,
                        after: a,
                    },
                });
            }
        }
        for (i, &(y, b)) in before.right.iter().enumerate() {
            let a = after.right.get(i).and_then(|&(_, h)| h);
            if !not_below(a, b) {
                self.violations.push(AuditViolation {
                    step,
                    failure: AuditFailure::HeightDecreased {
                        node: format!("right {y}"),
                        before: b,
                        after: a,
                    },
                });
            }
        }
        for &swap in swaps {
            let b = before.left.get(swap.from as usize).copied().flatten();
            let a = after.left.get(swap.to as usize).copied().flatten();
            if !swap_gap_holds(b, a) {
                self.violations.push(AuditViolation {
                    step,
                    failure: AuditFailure::SwapGap {
                        swap,
                        before: b,
                        after: a,
                    },
                });
            }
        }
        let arrived = after.left.last().copied().flatten();
        self.check_potential(step, before.phi, after.phi, arrived, swaps.len() as u64);
    }

    /// The arriving node sits at least two levels per swap above the end of
    /// its path, so the potential grows by at least the swap count unless
    /// that node has no residual arcs and drops out of the sum.
    fn check_potential(
        &mut self,
        step: usize,
        before: u64,
        after: u64,
        arrived: Option<u32>,
        swaps: u64,
    ) {
        self.swaps += swaps;
        if arrived.is_some() && after < before + swaps {
            self.violations.push(AuditViolation {
                step,
                failure: AuditFailure::PotentialGrowth {
                    before,
                    after,
                    swaps,
                },
            });
        }
        if after < self.swaps {
            self.violations.push(AuditViolation {
                step,
                failure: AuditFailure::PotentialBelowSwaps {
                    phi: after,
                    swaps: self.swaps,
                },
            });
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn violations(&self) -> &[AuditViolation] {
        &self.violations
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs a full sequence and audits heights before and after every arrival.
pub fn bm_check_monotonicity(
    config: BMatchConfig,
    arrivals: &[Vec<NodeId>],
) -> Result<HeightAudit> {
    let mut state = BMatchState::new(config)?;
    let mut audit = HeightAudit::new();
    let mut before = state.heights();
    for (i, arrival) in arrivals.iter().enumerate() {
        state.process_arrival(arrival).map_err(|e| e.at_step(i))?;
        let after = state.heights();
        audit.observe(&before, &after, state.last_swaps());
        before = after;
    }
    Ok(audit)
}

pub fn bm_run_sequence(config: BMatchConfig, arrivals: &[Vec<NodeId>]) -> Result<Vec<StepRecord>> {
    let mut state = BMatchState::new(config)?;
    arrivals
        .iter()
        .enumerate()
        .map(|(i, a)| state.process_arrival(a).map_err(|e| e.at_step(i)))
        .collect()
}
