//! Residual heights kept current across arrivals.
//!
//! An arrival only rewires the nodes on its augmenting path plus the new
//! left node, so instead of a fresh BFS per step the tracker repairs the
//! distances around those nodes: first it finds every node whose old height
//! lost all support, then it reruns a bucketed relaxation over that region.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{
    first_tail_violation, not_below, swap_gap_holds, AuditFailure, AuditViolation, BMatchState,
    HeightAudit, HeightReport,
};
use crate::error::{Error, Result};
use crate::graph::NodeId;

const INF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Left(u32),
    Right(u32),
}

/// A node whose height changed, named the way callers know it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightNode {
    Left(u32),
    Right(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeightChange {
    pub node: HeightNode,
    pub before: Option<u32>,
    pub after: Option<u32>,
}

fn finite(h: u32) -> Option<u32> {
    (h != INF).then_some(h)
}

#[derive(Debug, Clone, Default)]
pub struct HeightTracker {
    left: Vec<u32>,
    right: Vec<u32>,
    /// Finite left heights bucketed by (h − 1)/2.
    buckets: Vec<u64>,
    phi: u64,
    previous_phi: u64,
    infinite_left: usize,
    changes: Vec<HeightChange>,
    left_before: HashMap<u32, Option<u32>>,
    fresh_left: usize,
    fresh_right: usize,
    // Scratch space, stamped per update so it never needs clearing.
    epoch: u32,
    left_stamp: Vec<u32>,
    right_stamp: Vec<u32>,
    left_affected: Vec<u32>,
    right_affected: Vec<u32>,
    written: Vec<(Slot, u32)>,
}

impl HeightTracker {
    /// Starts from a full computation on `state`.
    pub fn new(state: &BMatchState) -> Self {
        let report = state.heights();
        let mut t = HeightTracker {
            left: report.left.iter().map(|h| h.unwrap_or(INF)).collect(),
            right: report
                .right
                .iter()
                .map(|&(_, h)| h.unwrap_or(INF))
                .collect(),
            ..Self::default()
        };
        for i in 0..t.left.len() {
            t.account(t.left[i], true);
        }
        t.previous_phi = t.phi;
        t.left_stamp = vec![0; t.left.len()];
        t.right_stamp = vec![0; t.right.len()];
        t.left_affected = vec![0; t.left.len()];
        t.right_affected = vec![0; t.right.len()];
        t
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn previous_phi(&self) -> u64 {
        self.previous_phi
    }

    pub fn infinite_left(&self) -> usize {
        self.infinite_left
    }

    /// Nodes that existed before the last update and changed height in it.
    pub fn changes(&self) -> &[HeightChange] {
        &self.changes
    }

    pub fn left_height(&self, x: u32) -> Option<u32> {
        self.left.get(x as usize).copied().and_then(finite)
    }

    /// Height of left node `x` before the last update; `None` also for
    /// infinite heights and for the node that just arrived.
    pub fn left_height_before(&self, x: u32) -> Option<u32> {
        if x as usize >= self.left.len() - self.fresh_left {
            return None;
        }
        match self.left_before.get(&x) {
            Some(&h) => h,
            None => self.left_height(x),
        }
    }

    /// Entry h counts left nodes with finite height at least 2h + 1.
    pub fn tail_counts(&self) -> Vec<u64> {
        let mut tails = self.buckets.clone();
        while tails.last() == Some(&0) {
            tails.pop();
        }
        for h in (0..tails.len().saturating_sub(1)).rev() {
            tails[h] += tails[h + 1];
        }
        tails
    }

    pub fn tail_violation(&self, base: u64) -> Option<usize> {
        first_tail_violation(&self.tail_counts(), self.left.len(), base)
    }

    /// Wrong-parity heights among nodes created or changed by the last update.
    /// Unchanged nodes were checked when they last changed.
    pub fn parity_violations(&self, state: &BMatchState) -> Vec<String> {
        let mut bad = Vec::new();
        let odd_left = |h: Option<u32>| matches!(h, Some(h) if h % 2 == 0);
        let even_right = |h: Option<u32>| matches!(h, Some(h) if h % 2 == 1);
        for c in &self.changes {
            match c.node {
                HeightNode::Left(x) if odd_left(c.after) => bad.push(format!("left {x}")),
                HeightNode::Right(y) if even_right(c.after) => bad.push(format!("right {y}")),
                _ => {}
            }
        }
        for x in self.left.len() - self.fresh_left..self.left.len() {
            if odd_left(finite(self.left[x])) {
                bad.push(format!("left {x}"));
            }
        }
        for r in self.right.len() - self.fresh_right..self.right.len() {
            if even_right(finite(self.right[r])) {
                bad.push(format!("right {}", state.right[r].id));
            }
        }
        bad
    }

    /// The same report a full recomputation would produce.
    pub fn report(&self, state: &BMatchState) -> HeightReport {
        HeightReport::from_parts(
            self.left.iter().map(|&h| finite(h)).collect(),
            state
                .right
                .iter()
                .zip(&self.right)
                .map(|(slot, &h)| (slot.id, finite(h)))
                .collect(),
        )
    }

    fn account(&mut self, h: u32, add: bool) {
        if h == INF {
            if add {
                self.infinite_left += 1;
            } else {
                self.infinite_left -= 1;
            }
            return;
        }
        let bucket = (h as usize).saturating_sub(1) / 2;
        if self.buckets.len() <= bucket {
            self.buckets.resize(bucket + 1, 0);
        }
        let phi = (h as u64).saturating_sub(1) / 2;
        if add {
            self.buckets[bucket] += 1;
            self.phi += phi;
        } else {
            self.buckets[bucket] -= 1;
            self.phi -= phi;
        }
    }

    fn get(&self, v: Slot) -> u32 {
        match v {
            Slot::Left(x) => self.left[x as usize],
            Slot::Right(r) => self.right[r as usize],
        }
    }

    fn set(&mut self, v: Slot, h: u32) {
        let (stamp, cell) = match v {
            Slot::Left(x) => (&mut self.left_stamp[x as usize], &mut self.left[x as usize]),
            Slot::Right(r) => (
                &mut self.right_stamp[r as usize],
                &mut self.right[r as usize],
            ),
        };
        if *stamp != self.epoch {
            *stamp = self.epoch;
            self.written.push((v, *cell));
        }
        *cell = h;
    }

    fn affected(&self, v: Slot) -> bool {
        match v {
            Slot::Left(x) => self.left_affected[x as usize] == self.epoch,
            Slot::Right(r) => self.right_affected[r as usize] == self.epoch,
        }
    }

    fn mark_affected(&mut self, v: Slot) {
        match v {
            Slot::Left(x) => self.left_affected[x as usize] = self.epoch,
            Slot::Right(r) => self.right_affected[r as usize] = self.epoch,
        }
    }

    /// Brings the heights up to date after exactly one more arrival.
    pub fn update(&mut self, state: &BMatchState) -> Result<()> {
        let (old_left, old_right) = (self.left.len(), self.right.len());
        if state.left.len() != old_left + 1 {
            return Err(Error::ContractViolation(format!(
                "height tracker saw {old_left} arrivals, state has {}",
                state.left.len()
            )));
        }
        self.epoch += 1;
        self.previous_phi = self.phi;
        self.changes.clear();
        self.left_before.clear();
        self.written.clear();
        self.fresh_left = 1;
        self.fresh_right = state.right.len() - old_right;
        self.left.resize(state.left.len(), INF);
        self.right.resize(state.right.len(), INF);
        for v in [&mut self.left_stamp, &mut self.left_affected] {
            v.resize(state.left.len(), 0);
        }
        for v in [&mut self.right_stamp, &mut self.right_affected] {
            v.resize(state.right.len(), 0);
        }

        // Nodes whose outgoing residual arcs or source status changed.
        let x0 = old_left as u32;
        let mut dirty: Vec<Slot> = vec![Slot::Left(x0)];
        for s in state.last_swaps() {
            dirty.push(Slot::Left(s.from));
            dirty.push(Slot::Left(s.to));
            dirty.push(Slot::Right(state.right_index[&s.right]));
        }
        let partners: Vec<Slot> = dirty
            .iter()
            .filter_map(|&v| match v {
                Slot::Left(x) => Some(Slot::Right(state.left[x as usize].matched)),
                Slot::Right(_) => None,
            })
            .collect();
        dirty.extend(partners);
        dirty.extend((old_right..state.right.len()).map(|r| Slot::Right(r as u32)));
        dirty.sort_unstable();
        dirty.dedup();

        // Phase one: in order of old height, drop every node whose height is
        // no longer backed by an out-neighbour one level lower.
        let mut suspects: BinaryHeap<Reverse<(u32, Slot)>> = dirty
            .iter()
            .filter(|&&v| self.get(v) != INF)
            .map(|&v| Reverse((self.get(v), v)))
            .collect();
        let mut lost = Vec::new();
        while let Some(Reverse((h, v))) = suspects.pop() {
            if self.affected(v) || self.get(v) != h || self.supported(state, v, h) {
                continue;
            }
            self.mark_affected(v);
            lost.push(v);
            self.for_each_in_neighbor(state, v, |u, hu| {
                if hu == h + 1 {
                    suspects.push(Reverse((hu, u)));
                }
            });
        }
        for &v in &lost {
            self.set(v, INF);
        }

        // Phase two: bucketed relaxation seeded from the lost and dirty nodes.
        let mut queue: BinaryHeap<Reverse<(u32, Slot)>> = BinaryHeap::new();
        for &v in lost.iter().chain(&dirty) {
            let t = self.tentative(state, v);
            if t < self.get(v) {
                self.set(v, t);
                queue.push(Reverse((t, v)));
            }
        }
        while let Some(Reverse((d, v))) = queue.pop() {
            if d != self.get(v) {
                continue;
            }
            let mut better = Vec::new();
            self.for_each_in_neighbor(state, v, |u, hu| {
                if d + 1 < hu {
                    better.push(u);
                }
            });
            for u in better {
                if d + 1 < self.get(u) {
                    self.set(u, d + 1);
                    queue.push(Reverse((d + 1, u)));
                }
            }
        }

        let written = std::mem::take(&mut self.written);
        for &(v, before) in &written {
            let after = self.get(v);
            match v {
                Slot::Left(x) if (x as usize) < old_left => {
                    if before != after {
                        self.account(before, false);
                        self.account(after, true);
                        self.left_before.insert(x, finite(before));
                        self.changes.push(HeightChange {
                            node: HeightNode::Left(x),
                            before: finite(before),
                            after: finite(after),
                        });
                    }
                }
                Slot::Right(r) if (r as usize) < old_right && before != after => {
                    self.changes.push(HeightChange {
                        node: HeightNode::Right(state.right[r as usize].id),
                        before: finite(before),
                        after: finite(after),
                    });
                }
                _ => {}
            }
        }
        self.written = written;
        self.account(self.left[x0 as usize], true);
        Ok(())
    }

    fn supported(&self, state: &BMatchState, v: Slot, h: u32) -> bool {
        match v {
            Slot::Right(r) => {
                if !state.saturated(r) {
                    return h == 0;
                }
                h > 0
                    && state.right[r as usize]
                        .matched
                        .iter()
                        .any(|&x| !self.affected(Slot::Left(x)) && self.left[x as usize] == h - 1)
            }
            Slot::Left(x) => {
                let slot = &state.left[x as usize];
                h > 0
                    && slot.neighbors.iter().any(|&r| {
                        r != slot.matched
                            && !self.affected(Slot::Right(r))
                            && self.right[r as usize] == h - 1
                    })
            }
        }
    }

    /// Best height reachable in one residual step from current values.
    fn tentative(&self, state: &BMatchState, v: Slot) -> u32 {
        let best = match v {
            Slot::Right(r) => {
                if !state.saturated(r) {
                    return 0;
                }
                state.right[r as usize]
                    .matched
                    .iter()
                    .map(|&x| self.left[x as usize])
                    .min()
            }
            Slot::Left(x) => {
                let slot = &state.left[x as usize];
                slot.neighbors
                    .iter()
                    .filter(|&&r| r != slot.matched)
                    .map(|&r| self.right[r as usize])
                    .min()
            }
        };
        match best {
            Some(h) if h != INF => h + 1,
            _ => INF,
        }
    }

    /// Calls `f(u, height(u))` for every residual arc u → v.
    fn for_each_in_neighbor(&self, state: &BMatchState, v: Slot, mut f: impl FnMut(Slot, u32)) {
        match v {
            Slot::Left(x) => {
                let r = state.left[x as usize].matched;
                f(Slot::Right(r), self.right[r as usize]);
            }
            Slot::Right(r) => {
                for &x in &state.right[r as usize].adjacent {
                    if state.left[x as usize].matched != r {
                        f(Slot::Left(x), self.left[x as usize]);
                    }
                }
            }
        }
    }
}

impl HeightAudit {
    /// Audits the arrival `tracker` was just updated for, looking only at
    /// the nodes whose heights moved.
    pub fn observe_tracked(&mut self, tracker: &HeightTracker, state: &BMatchState) {
        let step = self.steps;
        self.steps += 1;
        for c in tracker.changes() {
            if !not_below(c.after, c.before) {
                let node = match c.node {
                    HeightNode::Left(x) => format!("left {x}"),
                    HeightNode::Right(y) => format!("right {y}"),
                };
                self.violations.push(AuditViolation {
                    step,
                    failure: AuditFailure::HeightDecreased {
                        node,
                        before: c.before,
                        after: c.after,
                    },
                });
            }
        }
        for &swap in state.last_swaps() {
            let b = tracker.left_height_before(swap.from);
            let a = tracker.left_height(swap.to);
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
        let arrived = tracker.left_height(tracker.left.len() as u32 - 1);
        self.check_potential(
            step,
            tracker.previous_phi(),
            tracker.phi(),
            arrived,
            state.last_swaps().len() as u64,
        );
    }
}
