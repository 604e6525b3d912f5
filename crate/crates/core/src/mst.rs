//! Minimal spanning tree of the complete distance network.
//!
//! Single-link agglomeration (repeatedly merging the two clusters whose
//! closest members are nearest) produces exactly the minimum spanning tree,
//! so the tree is built with Kruskal's algorithm: candidate pairs are visited
//! in ascending `(distance, i, j)` order and kept when they join two
//! different clusters. The total order makes the tree unique even when
//! distances tie.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::returns_corr::DistanceMatrix;

/// Distances below this are treated as duplicates when computing strength.
pub const EPS_DUP: f64 = 1e-6;

/// `1 / distance`, capped at `1 / EPS_DUP` for (near-)zero distances.
#[inline]
pub fn strength_of(distance: f64) -> f64 {
    1.0 / distance.max(EPS_DUP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeEdge {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub strength: f64,
}

impl TreeEdge {
    pub fn new(a: usize, b: usize, distance: f64) -> Self {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Self {
            i,
            j,
            distance,
            strength: strength_of(distance),
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

/// A spanning tree over `tickers`, edges sorted by `(distance, i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTree {
    tickers: Vec<String>,
    edges: Vec<TreeEdge>,
}

impl WeightedTree {
    /// Builds a tree from `(a, b, distance)` triples, checking that they span
    /// all nodes without a cycle.
    pub fn from_edges(tickers: Vec<String>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = tickers.len();
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidParameter(format!(
                "a tree on {n} nodes needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut sets = DisjointSets::new(n);
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b, d) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::UnknownNode { node, n });
                }
            }
            if d < 0.0 || !d.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "invalid edge distance {d}"
                )));
            }
            if !sets.union(a, b) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) closes a cycle"
                )));
            }
            out.push(TreeEdge::new(a, b, d));
        }
        out.sort_by(TreeEdge::canonical_cmp);
        Ok(Self {
            tickers,
            edges: out,
        })
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    /// Sum of edge distances, accumulated in canonical edge order.
    pub fn total_distance(&self) -> f64 {
        self.edges.iter().map(|e| e.distance).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Neighbour lists, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// The same tree with node `k` renamed to `perm[k]` (tickers move along).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::PartitionSizeMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut tickers = vec![String::new(); n];
        for (k, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::UnknownNode { node: p, n });
            }
            tickers[p] = self.tickers[k].clone();
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (perm[e.i], perm[e.j], e.distance))
            .collect();
        Self::from_edges(tickers, &edges)
    }
}

/// Minimal spanning tree of the complete graph weighted by `dm.dist`.
pub fn build_mst(dm: &DistanceMatrix) -> Result<WeightedTree> {
    let n = dm.n();
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((dm.distance(i, j), i, j));
        }
    }
    // The comparator is a total order, so the parallel sort is deterministic.
    pairs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut sets = DisjointSets::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (d, i, j) in pairs {
        if edges.len() + 1 == n {
            break;
        }
        if sets.union(i, j) {
            edges.push(TreeEdge::new(i, j, d));
        }
    }
    Ok(WeightedTree {
        tickers: dm.tickers().to_vec(),
        edges,
    })
}

/// Union-find with path halving and union by size.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns_corr::SquareMatrix;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i}")).collect()
    }

    fn dm(rows: &[Vec<f64>]) -> DistanceMatrix {
        DistanceMatrix::from_distances(names(rows.len()), SquareMatrix::from_rows(rows).unwrap())
            .unwrap()
    }

    #[test]
    fn strengths() {
        assert_eq!(strength_of(2.0), 0.5);
        assert_eq!(strength_of(1.0), 1.0);
        assert_eq!(strength_of(0.0), 1e6);
    }

    #[test]
    fn single_node_has_no_edges() {
        let t = build_mst(&dm(&[vec![0.0]])).unwrap();
        assert_eq!(t.n(), 1);
        assert!(t.edges().is_empty());
    }

    #[test]
    fn three_nodes() {
        // AB : AC : BC = 1 : 2 : 3, scaled into [0, 2]
        let t = build_mst(&dm(&[
            vec![0.0, 0.5, 1.0],
            vec![0.5, 0.0, 1.5],
            vec![1.0, 1.5, 0.0],
        ]))
        .unwrap();
        let pairs: Vec<_> = t.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
        assert_eq!(t.total_distance(), 1.5);
    }

    #[test]
    fn ties_follow_index_order() {
        // every pair at distance 1: Kruskal keeps (0,1), (0,2), (0,3)
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let t = build_mst(&dm(&rows)).unwrap();
        let pairs: Vec<_> = t.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn zero_distance_caps_strength() {
        let t = build_mst(&dm(&[vec![0.0, 0.0], vec![0.0, 0.0]])).unwrap();
        assert_eq!(t.edges()[0].strength, 1.0 / EPS_DUP);
    }

    #[test]
    fn from_edges_validation() {
        assert!(WeightedTree::from_edges(names(3), &[(0, 1, 1.0)]).is_err());
        assert!(WeightedTree::from_edges(names(3), &[(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(WeightedTree::from_edges(names(3), &[(0, 1, 1.0), (1, 5, 1.0)]).is_err());
        assert!(WeightedTree::from_edges(names(2), &[(0, 1, -1.0)]).is_err());
        let t = WeightedTree::from_edges(names(3), &[(2, 1, 1.0), (1, 0, 0.5)]).unwrap();
        assert_eq!((t.edges()[0].i, t.edges()[0].j), (0, 1));
        assert_eq!((t.edges()[1].i, t.edges()[1].j), (1, 2));
    }

    #[test]
    fn relabel_round_trip() {
        let t =
            WeightedTree::from_edges(names(4), &[(0, 1, 0.3), (1, 2, 0.2), (1, 3, 0.9)]).unwrap();
        let perm = [2, 0, 3, 1];
        let r = t.relabeled(&perm).unwrap();
        assert_eq!(r.tickers()[2], "N0");
        let inverse = [1, 3, 0, 2];
        assert_eq!(r.relabeled(&inverse).unwrap(), t);
    }
}
