//! Shortest-path edge orientation for acyclic arrival sequences.
//!
//! Every node is kept at in-degree at most `c`. When a new edge joins two
//! saturated nodes, the algorithm points it at the endpoint whose nearest
//! unsaturated node is closer and reverses that path, so the violation is
//! pushed to the unsaturated node at its start.
//!
//! Also provides the no-recourse greedy baseline and a "fixing" variant that
//! spends one unforced flip per step breaking saturated roots.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, OrientationState, PathToUnsaturated};
use crate::step::StepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// What a tie callback gets to look at.
pub struct TieContext<'a> {
    pub state: &'a OrientationState,
    pub first: NodeId,
    pub second: NodeId,
    /// Common path length for path ties; `None` when both endpoints are unsaturated.
    pub path_length: Option<usize>,
}

pub type TieCallback = Arc<dyn Fn(&TieContext<'_>) -> Side + Send + Sync>;

/// Orientation of an edge whose endpoints are both unsaturated.
#[derive(Clone)]
pub enum UnsaturatedTiePolicy {
    TowardFirst,
    TowardSecond,
    Random { seed: u64 },
    Callback(TieCallback),
}

/// Choice between two equally short paths.
#[derive(Clone)]
pub enum PathTiePolicy {
    FirstEndpoint,
    SecondEndpoint,
    Random { seed: u64 },
    Callback(TieCallback),
}

impl fmt::Debug for UnsaturatedTiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TowardFirst => write!(f, "TowardFirst"),
            Self::TowardSecond => write!(f, "TowardSecond"),
            Self::Random { seed } => write!(f, "Random {{ seed: {seed} }}"),
            Self::Callback(_) => write!(f, "Callback"),
        }
    }
}

impl fmt::Debug for PathTiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FirstEndpoint => write!(f, "FirstEndpoint"),
            Self::SecondEndpoint => write!(f, "SecondEndpoint"),
            Self::Random { seed } => write!(f, "Random {{ seed: {seed} }}"),
            Self::Callback(_) => write!(f, "Callback"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpConfig {
    pub constraint: u32,
    pub unsaturated_tie: UnsaturatedTiePolicy,
    pub path_tie: PathTiePolicy,
}

impl SpConfig {
    pub fn new(constraint: u32) -> Self {
        SpConfig {
            constraint,
            unsaturated_tie: UnsaturatedTiePolicy::TowardSecond,
            path_tie: PathTiePolicy::SecondEndpoint,
        }
    }

    pub fn with_ties(mut self, unsaturated: UnsaturatedTiePolicy, path: PathTiePolicy) -> Self {
        self.unsaturated_tie = unsaturated;
        self.path_tie = path;
        self
    }

    /// Both ties resolved by independent streams derived from `seed`.
    pub fn random(constraint: u32, seed: u64) -> Self {
        SpConfig::new(constraint).with_ties(
            UnsaturatedTiePolicy::Random { seed },
            PathTiePolicy::Random {
                seed: seed ^ 0x9e37_79b9_7f4a_7c15,
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.constraint < 2 {
            return Err(Error::RejectedInput(format!(
                "in-degree constraint must be at least 2, got {}",
                self.constraint
            )));
        }
        Ok(())
    }
}

struct TieBreaker {
    fixed: Option<Side>,
    rng: Option<ChaCha8Rng>,
    callback: Option<TieCallback>,
}

impl TieBreaker {
    fn fixed(side: Side) -> Self {
        TieBreaker {
            fixed: Some(side),
            rng: None,
            callback: None,
        }
    }

    fn random(seed: u64) -> Self {
        TieBreaker {
            fixed: None,
            rng: Some(ChaCha8Rng::seed_from_u64(seed)),
            callback: None,
        }
    }

    fn callback(cb: TieCallback) -> Self {
        TieBreaker {
            fixed: None,
            rng: None,
            callback: Some(cb),
        }
    }

    fn decide(&mut self, ctx: &TieContext<'_>) -> Side {
        if let Some(side) = self.fixed {
            return side;
        }
        if let Some(rng) = self.rng.as_mut() {
            return if rng.gen::<bool>() {
                Side::First
            } else {
                Side::Second
            };
        }
        (self.callback.as_ref().expect("tie breaker has a mode"))(ctx)
    }
}

impl From<&UnsaturatedTiePolicy> for TieBreaker {
    fn from(p: &UnsaturatedTiePolicy) -> Self {
        match p {
            UnsaturatedTiePolicy::TowardFirst => TieBreaker::fixed(Side::First),
            UnsaturatedTiePolicy::TowardSecond => TieBreaker::fixed(Side::Second),
            UnsaturatedTiePolicy::Random { seed } => TieBreaker::random(*seed),
            UnsaturatedTiePolicy::Callback(cb) => TieBreaker::callback(cb.clone()),
        }
    }
}

impl From<&PathTiePolicy> for TieBreaker {
    fn from(p: &PathTiePolicy) -> Self {
        match p {
            PathTiePolicy::FirstEndpoint => TieBreaker::fixed(Side::First),
            PathTiePolicy::SecondEndpoint => TieBreaker::fixed(Side::Second),
            PathTiePolicy::Random { seed } => TieBreaker::random(*seed),
            PathTiePolicy::Callback(cb) => TieBreaker::callback(cb.clone()),
        }
    }
}

pub struct ShortestPathOrienter {
    pub(crate) state: OrientationState,
    config: SpConfig,
    unsaturated_tie: TieBreaker,
    path_tie: TieBreaker,
    cumulative: u64,
}

impl ShortestPathOrienter {
    pub fn new(config: SpConfig) -> Result<Self> {
        config.validate()?;
        Ok(ShortestPathOrienter {
            state: OrientationState::new(config.constraint)?,
            unsaturated_tie: TieBreaker::from(&config.unsaturated_tie),
            path_tie: TieBreaker::from(&config.path_tie),
            config,
            cumulative: 0,
        })
    }

    pub fn state(&self) -> &OrientationState {
        &self.state
    }

    pub fn config(&self) -> &SpConfig {
        &self.config
    }

    pub fn cumulative_flips(&self) -> u64 {
        self.cumulative
    }

    pub fn process_edge(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        if u == v {
            return Err(Error::RejectedInput(format!("self-loop at node {u}")));
        }
        if self.state.same_tree(u, v) {
            return Err(Error::AcyclicityViolation { u, v });
        }
        let step = self.state.edge_count();
        let (head, path): (NodeId, Option<PathToUnsaturated>) =
            match (self.state.is_saturated(u), self.state.is_saturated(v)) {
                (false, false) => {
                    let ctx = TieContext {
                        state: &self.state,
                        first: u,
                        second: v,
                        path_length: None,
                    };
                    match self.unsaturated_tie.decide(&ctx) {
                        Side::First => (u, None),
                        Side::Second => (v, None),
                    }
                }
                (false, true) => (u, None),
                (true, false) => (v, None),
                (true, true) => {
                    let pu = self.state.nearest_unsaturated(u)?;
                    let pv = self.state.nearest_unsaturated(v)?;
                    let side = match pu.len().cmp(&pv.len()) {
                        std::cmp::Ordering::Less => Side::First,
                        std::cmp::Ordering::Greater => Side::Second,
                        std::cmp::Ordering::Equal => {
                            let ctx = TieContext {
                                state: &self.state,
                                first: u,
                                second: v,
                                path_length: Some(pu.len()),
                            };
                            self.path_tie.decide(&ctx)
                        }
                    };
                    match side {
                        Side::First => (u, Some(pu)),
                        Side::Second => (v, Some(pv)),
                    }
                }
            };
        self.state.insert_edge(u, v, head)?;
        let flips = match &path {
            Some(p) => self.state.flip_path(p)? as u64,
            None => 0,
        };
        self.cumulative += flips;
        let max = self.state.max_in_degree();
        if max > self.config.constraint {
            return Err(Error::InternalConsistency(format!(
                "in-degree {max} exceeds constraint {} after step {step}",
                self.config.constraint
            )));
        }
        Ok(StepRecord {
            step,
            flips,
            cumulative_flips: self.cumulative,
            max_in_degree: max as u64,
            path_length_used: flips,
        })
    }
}

/// Runs the shortest-path algorithm over a whole sequence.
pub fn sp_run_sequence(config: SpConfig, edges: &[(NodeId, NodeId)]) -> Result<Vec<StepRecord>> {
    let mut alg = ShortestPathOrienter::new(config)?;
    edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| alg.process_edge(u, v).map_err(|e| e.at_step(i)))
        .collect()
}

/// Orients each edge toward the endpoint with smaller in-degree, never flipping.
/// Ties go to the smaller node id. Cyclic inputs are accepted.
pub struct GreedyOrienter {
    state: OrientationState,
}

impl Default for GreedyOrienter {
    fn default() -> Self {
        Self::new()
    }
}

impl GreedyOrienter {
    pub fn new() -> Self {
        GreedyOrienter {
            state: OrientationState::new(2).expect("2 is a valid constraint"),
        }
    }

    pub fn state(&self) -> &OrientationState {
        &self.state
    }

    pub fn process_edge(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        if u == v {
            return Err(Error::RejectedInput(format!("self-loop at node {u}")));
        }
        let (du, dv) = (self.state.in_degree(u), self.state.in_degree(v));
        let head = match du.cmp(&dv) {
            std::cmp::Ordering::Less => u,
            std::cmp::Ordering::Greater => v,
            std::cmp::Ordering::Equal => u.min(v),
        };
        let step = self.state.edge_count();
        self.state.insert_edge(u, v, head)?;
        Ok(StepRecord {
            step,
            flips: 0,
            cumulative_flips: 0,
            max_in_degree: self.state.max_in_degree() as u64,
            path_length_used: 0,
        })
    }
}

pub fn greedy_run_sequence(edges: &[(NodeId, NodeId)]) -> Result<Vec<StepRecord>> {
    let mut alg = GreedyOrienter::new();
    edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| alg.process_edge(u, v).map_err(|e| e.at_step(i)))
        .collect()
}

/// Shortest-path variant that may spend one unforced flip after each arrival.
///
/// The free flip reverses an edge `w -> r` into a saturated node `r` when `w`
/// stays unsaturated afterwards, which removes a saturated root without
/// creating a new one. Nodes are scanned in ascending id order, O(V) per step.
/// `path_length_used` reports only the forced flips.
pub struct FixingOrienter {
    inner: ShortestPathOrienter,
    cumulative: u64,
    free_flips: u64,
}

impl FixingOrienter {
    pub fn new(config: SpConfig) -> Result<Self> {
        Ok(FixingOrienter {
            inner: ShortestPathOrienter::new(config)?,
            cumulative: 0,
            free_flips: 0,
        })
    }

    pub fn state(&self) -> &OrientationState {
        self.inner.state()
    }

    pub fn free_flips(&self) -> u64 {
        self.free_flips
    }

    fn breakable_edge(&self) -> Option<usize> {
        let s = self.inner.state();
        let c = s.constraint();
        let mut best: Option<(NodeId, NodeId, usize)> = None;
        for r in s.nodes() {
            if !s.is_saturated(r) {
                continue;
            }
            for &e in s.in_edges(r) {
                let w = s.edges()[e].tail;
                if s.in_degree(w) + 2 <= c {
                    let cand = (r, w, e);
                    if best.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                        best = Some(cand);
                    }
                }
            }
        }
        best.map(|b| b.2)
    }

    pub fn process_edge(&mut self, u: NodeId, v: NodeId) -> Result<StepRecord> {
        let mut rec = self.inner.process_edge(u, v)?;
        if let Some(e) = self.breakable_edge() {
            self.inner.state.reverse_edge(e)?;
            self.free_flips += 1;
            rec.flips += 1;
        }
        self.cumulative += rec.flips;
        rec.cumulative_flips = self.cumulative;
        rec.max_in_degree = self.inner.state().max_in_degree() as u64;
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u32) -> NodeId {
        NodeId(x)
    }

    #[test]
    fn fresh_edge_follows_unsaturated_policy() {
        let cfg = SpConfig::new(2).with_ties(
            UnsaturatedTiePolicy::TowardSecond,
            PathTiePolicy::FirstEndpoint,
        );
        let mut alg = ShortestPathOrienter::new(cfg).unwrap();
        let rec = alg.process_edge(n(0), n(1)).unwrap();
        assert_eq!(alg.state().edges()[0].head, n(1));
        assert_eq!(rec.flips, 0);

        let cfg = SpConfig::new(2).with_ties(
            UnsaturatedTiePolicy::TowardFirst,
            PathTiePolicy::FirstEndpoint,
        );
        let mut alg = ShortestPathOrienter::new(cfg).unwrap();
        alg.process_edge(n(0), n(1)).unwrap();
        assert_eq!(alg.state().edges()[0].head, n(0));
    }

    #[test]
    fn orients_toward_the_unsaturated_endpoint() {
        let mut alg = ShortestPathOrienter::new(SpConfig::new(2)).unwrap();
        alg.process_edge(n(0), n(1)).unwrap();
        alg.process_edge(n(2), n(1)).unwrap();
        assert!(alg.state().is_saturated(n(1)));
        let rec = alg.process_edge(n(1), n(3)).unwrap();
        assert_eq!(rec.flips, 0);
        assert_eq!(alg.state().edges()[2].head, n(3));
    }

    #[test]
    fn rejects_cycles_and_loops() {
        let mut alg = ShortestPathOrienter::new(SpConfig::new(2)).unwrap();
        alg.process_edge(n(0), n(1)).unwrap();
        alg.process_edge(n(1), n(2)).unwrap();
        assert_eq!(
            alg.process_edge(n(2), n(0)),
            Err(Error::AcyclicityViolation { u: n(2), v: n(0) })
        );
        assert!(matches!(
            alg.process_edge(n(5), n(5)),
            Err(Error::RejectedInput(_))
        ));
        assert_eq!(alg.state().edge_count(), 2);
    }

    #[test]
    fn sequence_errors_carry_step() {
        let err = sp_run_sequence(SpConfig::new(2), &[(n(0), n(1)), (n(1), n(0))]).unwrap_err();
        assert!(matches!(err, Error::AtStep { step: 1, .. }));
    }

    #[test]
    fn single_edge_sequence() {
        let trace = sp_run_sequence(SpConfig::new(2), &[(n(0), n(1))]).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].cumulative_flips, 0);
        assert_eq!(trace[0].max_in_degree, 1);
    }

    #[test]
    fn rejects_small_constraint() {
        assert!(ShortestPathOrienter::new(SpConfig::new(1)).is_err());
    }

    #[test]
    fn greedy_ties_go_to_smaller_id() {
        let mut g = GreedyOrienter::new();
        g.process_edge(n(7), n(3)).unwrap();
        assert_eq!(g.state().edges()[0].head, n(3));
        g.process_edge(n(3), n(9)).unwrap();
        assert_eq!(g.state().edges()[1].head, n(9));
    }

    #[test]
    fn callback_policy_sees_both_endpoints() {
        let cb: TieCallback = Arc::new(|ctx: &TieContext<'_>| {
            if ctx.first > ctx.second {
                Side::First
            } else {
                Side::Second
            }
        });
        let cfg = SpConfig::new(2).with_ties(
            UnsaturatedTiePolicy::Callback(cb.clone()),
            PathTiePolicy::Callback(cb),
        );
        let mut alg = ShortestPathOrienter::new(cfg).unwrap();
        alg.process_edge(n(4), n(2)).unwrap();
        assert_eq!(alg.state().edges()[0].head, n(4));
    }

    #[test]
    fn fixing_variant_breaks_a_shallow_root() {
        // a->b, c->d, then (b, d) saturates d; c has in-degree 0 so (c, d) is flipped for free
        let mut alg = FixingOrienter::new(SpConfig::new(2)).unwrap();
        alg.process_edge(n(0), n(1)).unwrap();
        alg.process_edge(n(2), n(3)).unwrap();
        let rec = alg.process_edge(n(1), n(3)).unwrap();
        assert_eq!(rec.flips, 1);
        assert_eq!(rec.path_length_used, 0);
        assert_eq!(alg.free_flips(), 1);
        assert_eq!(alg.state().max_in_degree(), 1);
        alg.state().check_invariants().unwrap();
    }
}
