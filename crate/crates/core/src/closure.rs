//! Disjoint-set forest used to close pairwise relations transitively.

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(size: usize) -> Self {
        Self { parent: (0..size).collect(), rank: vec![0; size] }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Connected components of the graph on `nodes` with edges `pairs`.
///
/// Components are returned with members ascending, ordered by smallest member.
pub fn components(nodes: &[usize], pairs: &[(usize, usize)], universe: usize) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(universe);
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut by_root: Vec<Option<usize>> = vec![None; universe];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &node in &sorted {
        let root = uf.find(node);
        match by_root[root] {
            Some(slot) => out[slot].push(node),
            None => {
                by_root[root] = Some(out.len());
                out.push(vec![node]);
            }
        }
    }
    out
}

/// All unordered pairs `(a, b)` with `a < b` in the transitive closure of `pairs`.
pub fn closed_pairs(pairs: &[(usize, usize)], universe: usize) -> Vec<(usize, usize)> {
    let nodes: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut out = Vec::new();
    for comp in components(&nodes, pairs, universe) {
        for (i, &a) in comp.iter().enumerate() {
            for &b in &comp[i + 1..] {
                out.push((a, b));
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_components() {
        let comps = components(&[0, 1, 2, 3, 4, 5], &[(0, 1), (2, 3), (3, 4)], 6);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3, 4], vec![5]]);
    }

    #[test]
    fn closure_adds_transitive_pair() {
        assert_eq!(closed_pairs(&[(0, 1), (1, 2)], 4), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(closed_pairs(&[], 3).is_empty());
    }
}
