use super::{Adversary, OrientationDriver};
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Edge count of the forced t_m construction: 5·2^(m−1) − 2.
pub fn tm_size(m: u32) -> u64 {
    5 * (1u64 << (m - 1)) - 2
}

/// A tree whose root is saturated and whose nearest unsaturated node is `m` flips away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TmHandle {
    pub root: NodeId,
    pub m: u32,
    pub edges_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleStepOutcome {
    pub final_flips: u64,
    pub edges_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearOutcome {
    pub k: u64,
    pub forced_flips: u64,
    pub edges_used: u64,
}

impl<D: OrientationDriver> Adversary<'_, D> {
    /// Forces a t_m on fresh nodes.
    ///
    /// Base case: two single edges, then an edge between their heads; whichever
    /// way it is oriented, its head is saturated one flip from an unsaturated
    /// node. Inductive case: two t_(m−1) roots both pointed at a fresh node,
    /// which the algorithm must accept without flipping.
    pub fn build_tm(&mut self, m: u32) -> Result<TmHandle> {
        if m == 0 {
            return Err(Error::RejectedInput("t_m needs m >= 1".into()));
        }
        self.require_binary_constraint()?;
        let start = self.emitted();
        let root = if m == 1 {
            let (a, b, c, d) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
            self.emit(a, b)?;
            let h1 = self.last_head();
            self.emit(c, d)?;
            let h2 = self.last_head();
            self.emit(h1, h2)?;
            self.last_head()
        } else {
            let left = self.build_tm(m - 1)?;
            let right = self.build_tm(m - 1)?;
            let c = self.fresh();
            for r in [left.root, right.root] {
                self.emit(r, c)?;
                if self.last_head() != c {
                    return Err(Error::AdversaryDesync(format!(
                        "edge from saturated root {r} to fresh {c} was not oriented toward {c}"
                    )));
                }
            }
            c
        };
        let edges_used = (self.emitted() - start) as u64;
        if !self.view().is_saturated(root) {
            return Err(Error::AdversaryDesync(format!(
                "t_{m} root {root} is not saturated"
            )));
        }
        let d = self.distance(root)?;
        if d != m as usize {
            return Err(Error::AdversaryDesync(format!(
                "t_{m} root {root} has shortest path {d}"
            )));
        }
        Ok(TmHandle {
            root,
            m,
            edges_used,
        })
    }

    /// Builds two t_(log2 m) and joins their roots; the joining step flips log2 m edges.
    pub fn single_step_log_flips(&mut self, m: u64) -> Result<SingleStepOutcome> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::RejectedInput(format!(
                "m must be a power of two >= 2, got {m}"
            )));
        }
        let j = m.trailing_zeros();
        let start = self.emitted();
        let a = self.build_tm(j)?;
        let b = self.build_tm(j)?;
        let rec = self.emit(a.root, b.root)?;
        Ok(SingleStepOutcome {
            final_flips: rec.flips,
            edges_used: (self.emitted() - start) as u64,
        })
    }

    /// Builds k+1 t_1 with k = ⌊(n−3)/4⌋ and joins every other root to the
    /// first one. Each join meets two saturated endpoints and costs a flip.
    pub fn linear_total_flips(&mut self, n_budget: u64) -> Result<LinearOutcome> {
        if n_budget < 7 {
            return Err(Error::RejectedInput(format!(
                "linear construction needs a budget of at least 7 edges, got {n_budget}"
            )));
        }
        let k = (n_budget - 3) / 4;
        let start = self.emitted();
        let hub = self.build_tm(1)?;
        let mut others = Vec::with_capacity(k as usize);
        for _ in 0..k {
            others.push(self.build_tm(1)?.root);
        }
        let mut forced = 0;
        for r in others {
            forced += self.emit(hub.root, r)?.flips;
        }
        Ok(LinearOutcome {
            k,
            forced_flips: forced,
            edges_used: (self.emitted() - start) as u64,
        })
    }
}
