use super::{Adversary, OrientationDriver};
use crate::error::{Error, Result};
use crate::graph::EdgeId;

/// How tree depths are chosen in each round of the single-edge construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleEdgeMode {
    /// Round m attaches two t_(2m−1) to the head of the watched edge. From
    /// round two on the final attachment is a tie, so the watched edge only
    /// flips when the driver breaks that tie toward the head.
    Faithful,
    /// Each round picks depth dist(tail) + 2, which makes the second
    /// attachment strictly favour the path through the watched edge.
    Robust,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleEdgeOutcome {
    pub red: EdgeId,
    pub red_flips: u64,
    pub rounds: usize,
    /// Rounds (1-based) in which the watched edge did not flip.
    pub rounds_without_flip: Vec<usize>,
    pub edges_used: u64,
    pub max_depth: u32,
}

/// Edge budget of `k` faithful rounds: 1 + (10/3)(4^k − 1) − 2k.
pub fn faithful_single_edge_budget(k: u32) -> u64 {
    1 + 10 * (4u64.pow(k) - 1) / 3 - 2 * k as u64
}

/// Edge budget of `k` robust rounds: 1 + (20/7)(8^k − 1) − 2k.
pub fn robust_single_edge_budget(k: u32) -> u64 {
    1 + 20 * (8u64.pow(k) - 1) / 7 - 2 * k as u64
}

impl<D: OrientationDriver> Adversary<'_, D> {
    /// Emits one watched edge and then `k` rounds of tree attachments aimed at
    /// flipping it once per round.
    pub fn single_edge_flips(&mut self, k: u32, mode: SingleEdgeMode) -> Result<SingleEdgeOutcome> {
        if k == 0 {
            return Err(Error::RejectedInput("need at least one round".into()));
        }
        self.require_binary_constraint()?;
        let start = self.emitted();
        let (a, b) = (self.fresh(), self.fresh());
        self.emit(a, b)?;
        let red = self.last_edge();
        let flips_of = |adv: &Self| adv.view().edge(red).map_or(0, |e| e.flip_count);

        let mut rounds_without_flip = Vec::new();
        let mut max_depth = 0;
        for round in 1..=k {
            let before = flips_of(self);
            let head = self.view().edge(red).expect("watched edge exists").head;
            let tail = self.view().edge(red).expect("watched edge exists").tail;
            let depth = match mode {
                SingleEdgeMode::Faithful => 2 * round - 1,
                SingleEdgeMode::Robust => self.distance(tail)? as u32 + 2,
            };
            max_depth = max_depth.max(depth);

            let t = self.build_tm(depth)?;
            self.emit(head, t.root)?;
            let flipped_early = flips_of(self) > before;
            if !(flipped_early && mode == SingleEdgeMode::Robust) {
                let t = self.build_tm(depth)?;
                self.emit(head, t.root)?;
            }

            if flips_of(self) == before {
                match mode {
                    SingleEdgeMode::Faithful => rounds_without_flip.push(round as usize),
                    SingleEdgeMode::Robust => {
                        return Err(Error::AdversaryDesync(format!(
                            "watched edge did not flip in round {round}"
                        )))
                    }
                }
            }
        }
        Ok(SingleEdgeOutcome {
            red,
            red_flips: flips_of(self) as u64,
            rounds: k as usize,
            rounds_without_flip,
            edges_used: (self.emitted() - start) as u64,
            max_depth,
        })
    }
}
