use super::{Adversary, OrientationDriver};
use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoFlipOutcome {
    /// Forced path length on the final edge.
    pub final_flips: u64,
    pub edges_used: u64,
    pub chain_length: u64,
    /// Saturated one-flip roots that appeared inside the chains on their own.
    pub roots_from_chains: usize,
}

enum Resource {
    Root(NodeId),
    Head(NodeId),
}

const CHAINS: usize = 16;

impl<D: OrientationDriver> Adversary<'_, D> {
    /// Forces a step with a path of length two using only long static chains
    /// as raw material, so no node ever has in-degree zero next to a
    /// saturated node. This defeats the free-flip fixing variant.
    ///
    /// The chains are turned into eight saturated roots, which are merged
    /// pairwise twice while watching which endpoint receives each edge. The
    /// last edge joins two roots whose nearest unsaturated node is two flips away.
    pub fn two_flip_forcer(&mut self, chain_length: u64) -> Result<TwoFlipOutcome> {
        if chain_length < 2 {
            return Err(Error::RejectedInput(format!(
                "chains need at least 2 edges, got {chain_length}"
            )));
        }
        self.require_binary_constraint()?;
        let start = self.emitted();

        let mut chains = Vec::with_capacity(CHAINS);
        for _ in 0..CHAINS {
            let mut nodes = vec![self.fresh()];
            for _ in 0..chain_length {
                let x = self.fresh();
                self.emit(*nodes.last().unwrap(), x)?;
                nodes.push(x);
            }
            chains.push(nodes);
        }

        let mut roots = Vec::new();
        let mut heads = Vec::new();
        for nodes in &chains {
            match self.classify_chain(nodes)? {
                Resource::Root(r) => roots.push(r),
                Resource::Head(h) => heads.push(h),
            }
        }
        let roots_from_chains = roots.len();
        let mut heads = heads.into_iter();
        while roots.len() < 8 {
            let (Some(a), Some(b)) = (heads.next(), heads.next()) else {
                return Err(Error::AdversaryDesync(
                    "not enough chain heads to form eight roots".into(),
                ));
            };
            self.emit(a, b)?;
            let r = self.last_head();
            self.expect_depth(r, 1)?;
            roots.push(r);
        }

        let mut level = roots[..8].to_vec();
        for depth in 1..=2 {
            let mut next = Vec::with_capacity(level.len() / 2);
            for pair in level.chunks(2) {
                self.emit(pair[0], pair[1])?;
                let r = self.last_head();
                self.expect_depth(r, depth)?;
                next.push(r);
            }
            level = next;
        }

        let last = self.emit(level[0], level[1])?;
        if last.path_length_used < 2 {
            return Err(Error::AdversaryDesync(format!(
                "final edge forced a path of length {}",
                last.path_length_used
            )));
        }
        Ok(TwoFlipOutcome {
            final_flips: last.path_length_used,
            edges_used: (self.emitted() - start) as u64,
            chain_length,
            roots_from_chains,
        })
    }

    fn expect_depth(&self, r: NodeId, depth: usize) -> Result<()> {
        let d = self.distance(r)?;
        if !self.view().is_saturated(r) || d != depth {
            return Err(Error::AdversaryDesync(format!(
                "receiving node {r} is at distance {d}, expected saturated at {depth}"
            )));
        }
        Ok(())
    }

    /// A saturated node one flip from free space if the chain has one,
    /// otherwise the sink of its longest directed run.
    fn classify_chain(&self, nodes: &[NodeId]) -> Result<Resource> {
        let view = self.view();
        for &x in nodes {
            if view.is_saturated(x) && self.distance(x)? == 1 {
                return Ok(Resource::Root(x));
            }
        }
        let mut best: Option<(usize, NodeId)> = None;
        for &x in nodes {
            if view.out_degree(x) != 0 || view.in_degree(x) != 1 {
                continue;
            }
            let mut run = 0;
            let mut cur = x;
            while view.in_degree(cur) == 1 {
                cur = view.in_neighbors(cur).next().expect("one in-neighbor");
                run += 1;
            }
            if best.is_none_or(|(r, _)| run > r) {
                best = Some((run, x));
            }
        }
        best.map(|(_, x)| Resource::Head(x)).ok_or_else(|| {
            Error::AdversaryDesync("chain has neither a saturated root nor a sink".into())
        })
    }
}
