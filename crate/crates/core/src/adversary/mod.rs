//! Adaptive adversaries against shortest-path orientation variants.
//!
//! An adversary owns a mutable handle to a driver, emits one edge at a time
//! and inspects the resulting orientation through the driver's read-only view
//! before choosing the next edge. Everything it emits is recorded so a run
//! can be replayed later without the adaptive machinery.

mod pairing;
mod single_edge;
mod tm;
mod two_flip;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, OrientationState};
use crate::orient_sp::{FixingOrienter, GreedyOrienter, ShortestPathOrienter};
use crate::step::StepRecord;

pub use pairing::pairing_norecourse;
pub use single_edge::{
    faithful_single_edge_budget, robust_single_edge_budget, SingleEdgeMode, SingleEdgeOutcome,
};
pub use tm::{tm_size, LinearOutcome, SingleStepOutcome, TmHandle};
pub use two_flip::TwoFlipOutcome;

/// An online orientation algorithm as seen by an adversary.
pub trait OrientationDriver {
    fn process(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord>;
    fn view(&self) -> &OrientationState;
}

impl OrientationDriver for ShortestPathOrienter {
    fn process(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        self.process_edge(u, v)
    }

    fn view(&self) -> &OrientationState {
        self.state()
    }
}

impl OrientationDriver for FixingOrienter {
    fn process(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        self.process_edge(u, v)
    }

    fn view(&self) -> &OrientationState {
        self.state()
    }
}

impl OrientationDriver for GreedyOrienter {
    fn process(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        self.process_edge(u, v)
    }

    fn view(&self) -> &OrientationState {
        self.state()
    }
}

/// How fresh node ids are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdAllocation {
    /// Consecutive ids above everything the driver has seen.
    Sequential,
    /// Random unused ids below 2^30; changes id-based tie-breaking inside the driver.
    Scattered { seed: u64 },
}

struct NodeAllocator {
    next: u32,
    rng: Option<ChaCha8Rng>,
    used: HashSet<u32>,
}

impl NodeAllocator {
    fn new(mode: IdAllocation, view: &OrientationState) -> Self {
        let next = view.max_node_id().map_or(0, |m| m.0 + 1);
        let rng = match mode {
            IdAllocation::Sequential => None,
            IdAllocation::Scattered { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        NodeAllocator {
            next,
            rng,
            used: HashSet::new(),
        }
    }

    fn fresh(&mut self, view: &OrientationState) -> NodeId {
        match self.rng.as_mut() {
            None => {
                while view.contains(NodeId(self.next)) {
                    self.next += 1;
                }
                self.next += 1;
                NodeId(self.next - 1)
            }
            Some(rng) => loop {
                let x = rng.gen_range(0..1u32 << 30);
                if !view.contains(NodeId(x)) && self.used.insert(x) {
                    return NodeId(x);
                }
            },
        }
    }
}

/// Edges an adversary emitted together with the driver's responses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Recording {
    pub edges: Vec<(NodeId, NodeId)>,
    pub trace: Vec<StepRecord>,
}

pub struct Adversary<'d, D: OrientationDriver> {
    driver: &'d mut D,
    alloc: NodeAllocator,
    recording: Recording,
}

impl<'d, D: OrientationDriver> Adversary<'d, D> {
    pub fn new(driver: &'d mut D) -> Self {
        Self::with_ids(driver, IdAllocation::Sequential)
    }

    pub fn with_ids(driver: &'d mut D, ids: IdAllocation) -> Self {
        let alloc = NodeAllocator::new(ids, driver.view());
        Adversary {
            driver,
            alloc,
            recording: Recording::default(),
        }
    }

    pub fn view(&self) -> &OrientationState {
        self.driver.view()
    }

    pub fn recording(&self) -> &Recording {
        &self.recording
    }

    pub fn into_recording(self) -> Recording {
        self.recording
    }

    pub fn emitted(&self) -> usize {
        self.recording.edges.len()
    }

    fn fresh(&mut self) -> NodeId {
        self.alloc.fresh(self.driver.view())
    }

    fn emit(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        if self.view().same_tree(u, v) {
            return Err(Error::InternalConsistency(format!(
                "adversary tried to emit cyclic edge ({u}, {v})"
            )));
        }
        let index = self.recording.edges.len();
        let rec = self.driver.process(u, v).map_err(|e| e.at_step(index))?;
        self.recording.edges.push((u, v));
        self.recording.trace.push(rec);
        Ok(rec)
    }

    /// Current head of the most recently emitted edge.
    fn last_head(&self) -> NodeId {
        self.view()
            .edges()
            .last()
            .expect("an edge was emitted")
            .head
    }

    fn last_edge(&self) -> EdgeId {
        self.view().edge_count() - 1
    }

    fn distance(&self, x: NodeId) -> Result<usize> {
        Ok(self.view().nearest_unsaturated(x)?.len())
    }

    fn require_binary_constraint(&self) -> Result<()> {
        if self.view().constraint() != 2 {
            return Err(Error::RejectedInput(format!(
                "constructions assume in-degree constraint 2, driver uses {}",
                self.view().constraint()
            )));
        }
        Ok(())
    }
}
