//! All-flip orientation for inputs that admit a low in-degree orientation.
//!
//! A new edge gets an arbitrary orientation. Whenever some node exceeds the
//! maintained bound, all of its incoming edges are reversed; overfull nodes are
//! processed in FIFO order until none remain. Cyclic inputs are fine as long
//! as the promised orientation exists; if it does not, the cascade runs into
//! the flip budget and aborts.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, OrientationState};
use crate::step::StepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialOrientation {
    TowardFirst,
    TowardSecond,
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllFlipConfig {
    /// In-degree bound some orientation of the input is promised to meet (δ).
    pub promised: u32,
    /// In-degree bound the algorithm maintains (Δ ≥ 2δ).
    pub maintained: u32,
    pub initial: InitialOrientation,
}

impl AllFlipConfig {
    pub fn new(promised: u32, maintained: u32) -> Result<Self> {
        let cfg = AllFlipConfig {
            promised,
            maintained,
            initial: InitialOrientation::TowardSecond,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial(mut self, initial: InitialOrientation) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.promised < 1 {
            return Err(Error::RejectedInput(
                "promised bound must be at least 1".into(),
            ));
        }
        if self.maintained < 2 * self.promised {
            return Err(Error::RejectedInput(format!(
                "maintained bound {} is below twice the promised bound {}",
                self.maintained, self.promised
            )));
        }
        Ok(())
    }

    /// Per-unit slack Δ + 1 − 2δ of one all-flip.
    fn slack(&self) -> u64 {
        (self.maintained + 1 - 2 * self.promised) as u64
    }
}

/// Events reported to an observer while an arrival is processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeEvent<'a> {
    Inserted { edge: EdgeId },
    BeforeAllFlip { node: NodeId },
    AfterAllFlip { node: NodeId, flipped: &'a [EdgeId] },
}

pub struct AllFlipOrienter {
    state: OrientationState,
    config: AllFlipConfig,
    rng: Option<ChaCha8Rng>,
    cumulative: u64,
    all_flips: u64,
}

impl AllFlipOrienter {
    pub fn new(config: AllFlipConfig) -> Result<Self> {
        config.validate()?;
        let rng = match config.initial {
            InitialOrientation::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Ok(AllFlipOrienter {
            state: OrientationState::new(config.maintained)?,
            config,
            rng,
            cumulative: 0,
            all_flips: 0,
        })
    }

    pub fn state(&self) -> &OrientationState {
        &self.state
    }

    pub fn config(&self) -> &AllFlipConfig {
        &self.config
    }

    pub fn cumulative_flips(&self) -> u64 {
        self.cumulative
    }

    pub fn all_flip_count(&self) -> u64 {
        self.all_flips
    }

    /// Flip budget n(Δ+1)/(Δ+1−2δ) + Δ + 1 for `n` edges, compared without division.
    fn over_budget(&self, flips: u64, n: u64) -> bool {
        let d1 = self.config.maintained as u64 + 1;
        flips * self.config.slack() > n * d1 + d1 * self.config.slack()
    }

    pub fn process_edge(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        self.process_edge_observed(u, v, &mut |_, _| {})
    }

    pub fn process_edge_observed(
        &mut self,
        u: NodeId,
        v: NodeId,
        observer: &mut dyn FnMut(CascadeEvent<'_>, &OrientationState),
    ) -> Result<StepRecord> {
        if u == v {
            return Err(Error::RejectedInput(format!("self-loop at node {u}")));
        }
        let head = match self.config.initial {
            InitialOrientation::TowardFirst => u,
            InitialOrientation::TowardSecond => v,
            InitialOrientation::Random { .. } => {
                if self.rng.as_mut().expect("seeded").gen::<bool>() {
                    u
                } else {
                    v
                }
            }
        };
        let step = self.state.edge_count();
        let edge = self.state.insert_edge(u, v, head)?;
        observer(CascadeEvent::Inserted { edge }, &self.state);

        let limit = self.config.maintained;
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        let mut queued: HashMap<NodeId, bool> = HashMap::new();
        if self.state.in_degree(head) > limit {
            queue.push_back(head);
            queued.insert(head, true);
        }
        let mut flips = 0u64;
        let n = self.state.edge_count() as u64;
        while let Some(x) = queue.pop_front() {
            queued.insert(x, false);
            if self.state.in_degree(x) <= limit {
                continue;
            }
            observer(CascadeEvent::BeforeAllFlip { node: x }, &self.state);
            let incoming: Vec<EdgeId> = self.state.in_edges(x).to_vec();
            for &e in &incoming {
                self.state.reverse_edge(e)?;
                let w = self.state.edges()[e].head;
                if self.state.in_degree(w) > limit && !queued.get(&w).copied().unwrap_or(false) {
                    queue.push_back(w);
                    queued.insert(w, true);
                }
            }
            flips += incoming.len() as u64;
            self.all_flips += 1;
            observer(
                CascadeEvent::AfterAllFlip {
                    node: x,
                    flipped: &incoming,
                },
                &self.state,
            );
            if self.over_budget(self.cumulative + flips, n) {
                let d1 = limit as u64 + 1;
                return Err(Error::ArboricityPromiseViolated {
                    flips: self.cumulative + flips,
                    budget: (n * d1).div_ceil(self.config.slack()) + d1,
                });
            }
        }
        self.cumulative += flips;
        let max = self.state.max_in_degree();
        if max > limit {
            return Err(Error::InternalConsistency(format!(
                "cascade ended with in-degree {max} above {limit}"
            )));
        }
        Ok(StepRecord {
            step,
            flips,
            cumulative_flips: self.cumulative,
            max_in_degree: max as u64,
            path_length_used: 0,
        })
    }
}

pub fn af_run_sequence(
    config: AllFlipConfig,
    edges: &[(NodeId, NodeId)],
) -> Result<Vec<StepRecord>> {
    let mut alg = AllFlipOrienter::new(config)?;
    edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| alg.process_edge(u, v).map_err(|e| e.at_step(i)))
        .collect()
}

/// A fixed orientation of the arrival sequence: `heads[e]` is the head of edge `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceOrientation {
    pub heads: Vec<NodeId>,
}

impl ReferenceOrientation {
    /// Orients every tree of a forest away from its smallest node id.
    pub fn root_away(edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut adj: HashMap<NodeId, Vec<(NodeId, EdgeId)>> = HashMap::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::RejectedInput(format!("self-loop at node {u}")));
            }
            adj.entry(u).or_default().push((v, i));
            adj.entry(v).or_default().push((u, i));
        }
        let mut roots: Vec<NodeId> = adj.keys().copied().collect();
        roots.sort_unstable();
        let mut heads: Vec<Option<NodeId>> = vec![None; edges.len()];
        let mut seen: HashMap<NodeId, ()> = HashMap::new();
        for root in roots {
            if seen.contains_key(&root) {
                continue;
            }
            seen.insert(root, ());
            let mut stack = vec![root];
            while let Some(x) = stack.pop() {
                for &(y, e) in &adj[&x] {
                    if heads[e].is_some() {
                        continue;
                    }
                    if seen.contains_key(&y) {
                        return Err(Error::RejectedInput(format!(
                            "edge {e} closes a cycle; root-away reference needs a forest"
                        )));
                    }
                    heads[e] = Some(y);
                    seen.insert(y, ());
                    stack.push(y);
                }
            }
        }
        Ok(ReferenceOrientation {
            heads: heads
                .into_iter()
                .map(|h| h.expect("every edge visited"))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialDiagnostic {
    /// Number of current edges whose head disagrees with the reference.
    pub psi: u64,
}

/// Counts edges oriented differently from `reference`.
///
/// The reference may extend past the current edges (later arrivals are
/// ignored), but restricted to the current edges it must be a valid
/// orientation with in-degree at most `promised`.
pub fn af_potential(
    state: &OrientationState,
    reference: &ReferenceOrientation,
    promised: u32,
) -> Result<PotentialDiagnostic> {
    let m = state.edge_count();
    if reference.heads.len() < m {
        return Err(Error::ContractViolation(format!(
            "reference covers {} edges, state has {m}",
            reference.heads.len()
        )));
    }
    let mut load: HashMap<NodeId, u32> = HashMap::new();
    let mut psi = 0;
    for e in state.edges() {
        let rh = reference.heads[e.id];
        if rh != e.head && rh != e.tail {
            return Err(Error::ContractViolation(format!(
                "reference head {rh} is not an endpoint of edge {}",
                e.id
            )));
        }
        let l = load.entry(rh).or_default();
        *l += 1;
        if *l > promised {
            return Err(Error::ContractViolation(format!(
                "reference gives {rh} in-degree above {promised}"
            )));
        }
        if rh != e.head {
            psi += 1;
        }
    }
    Ok(PotentialDiagnostic { psi })
}
