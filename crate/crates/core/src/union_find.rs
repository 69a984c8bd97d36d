use std::cell::Cell;

/// Incremental disjoint sets with union by size and path compression.
///
/// Parents live in `Cell`s so that `find` can compress paths through a shared
/// reference; read-only views of an orientation can still answer connectivity
/// queries at amortized near-constant cost.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<Cell<u32>>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a singleton set and returns its element.
    pub fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(Cell::new(id));
        self.size.push(1);
        id
    }

    pub fn find(&self, x: u32) -> u32 {
        let mut root = x;
        loop {
            let p = self.parent[root as usize].get();
            if p == root {
                break;
            }
            root = p;
        }
        let mut cur = x;
        while cur != root {
            let next = self.parent[cur as usize].get();
            self.parent[cur as usize].set(root);
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns false when they were already one set.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize].set(ra);
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn same(&self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_size(&self, x: u32) -> u32 {
        self.size[self.find(x) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_merge_and_report_sizes() {
        let mut uf = UnionFind::new();
        for _ in 0..6 {
            uf.push();
        }
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 4));
        assert_eq!(uf.set_size(3), 4);
        assert_eq!(uf.set_size(5), 1);
    }

    #[test]
    fn long_chain_compresses() {
        let mut uf = UnionFind::new();
        for _ in 0..1000 {
            uf.push();
        }
        for i in 1..1000 {
            uf.union(i - 1, i);
        }
        let root = uf.find(999);
        for i in 0..1000 {
            assert_eq!(uf.find(i), root);
        }
    }
}
