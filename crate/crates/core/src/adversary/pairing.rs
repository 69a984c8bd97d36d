use crate::graph::NodeId;

/// A static sequence of exactly `n` edges that drives the greedy
/// no-recourse orienter to maximum in-degree ⌊log2(n+1)⌋.
///
/// A knockout tournament on 2^R nodes, with R = ⌊log2(n+1)⌋: each round
/// pairs the previous round's winners, and the greedy rule (fewer in-edges,
/// then smaller id) always picks the smaller id of two equal winners. The
/// remaining edges are disjoint filler.
pub fn pairing_norecourse(n: u64) -> Vec<(NodeId, NodeId)> {
    if n == 0 {
        return Vec::new();
    }
    let rounds = (n + 1).ilog2();
    let size = 1u32 << rounds;
    let mut edges = Vec::with_capacity(n as usize);
    let mut winners: Vec<u32> = (0..size).collect();
    while winners.len() > 1 {
        let mut next = Vec::with_capacity(winners.len() / 2);
        for pair in winners.chunks(2) {
            edges.push((NodeId(pair[0]), NodeId(pair[1])));
            next.push(pair[0].min(pair[1]));
        }
        winners = next;
    }
    let mut fresh = size;
    while (edges.len() as u64) < n {
        edges.push((NodeId(fresh), NodeId(fresh + 1)));
        fresh += 2;
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orient_sp::greedy_run_sequence;

    fn greedy_max(n: u64) -> u64 {
        let seq = pairing_norecourse(n);
        assert_eq!(seq.len() as u64, n);
        greedy_run_sequence(&seq)
            .unwrap()
            .last()
            .map_or(0, |r| r.max_in_degree)
    }

    #[test]
    fn small_values() {
        assert_eq!(greedy_max(1), 1);
        assert_eq!(greedy_max(7), 3);
        assert_eq!(greedy_max(8), 3);
        assert_eq!(greedy_max(15), 4);
        assert_eq!(greedy_max(0), 0);
    }

    #[test]
    fn is_a_forest() {
        let seq = pairing_norecourse(100);
        let mut uf = crate::union_find::UnionFind::new();
        let max = seq.iter().map(|&(u, v)| u.0.max(v.0)).max().unwrap();
        for _ in 0..=max {
            uf.push();
        }
        for (u, v) in seq {
            assert!(uf.union(u.0, v.0));
        }
    }
}
