//! Modularity and Louvain community detection.
//!
//! Modularity uses the Newman-Girvan form
//! `Q = sum_c [ L_c / m - gamma * (K_c / 2m)^2 ]`, where `L_c` is the edge
//! weight inside community `c`, `K_c` the summed (weighted) degree of its
//! members and `m` the total edge weight.
//!
//! [`louvain`] alternates local node moves with aggregation of communities
//! into super-nodes. Node order is a seeded shuffle, so results are
//! reproducible. After the multilevel phase converges, one more local-move
//! pass runs on the original nodes; if that moves anything the levels are
//! rebuilt, so the returned partition is also a local optimum for single
//! original-node moves.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PriceTable;
use crate::mst::WeightedTree;

/// Minimum modularity gain for a node move.
pub const MIN_GAIN: f64 = 1e-12;

/// How tree edges are weighted for modularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Edge weight = strength (1 / distance).
    Strength,
    /// Every edge weighs 1.
    Unweighted,
}

impl Weighting {
    pub fn from_flag(weighted: bool) -> Self {
        if weighted {
            Weighting::Strength
        } else {
            Weighting::Unweighted
        }
    }
}

/// Undirected simple graph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(a, b, w) in &edges {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::UnknownNode { node, n });
                }
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "edge weight {w} must be positive"
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({a}, {b})"
                )));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn from_tree(tree: &WeightedTree, weighting: Weighting) -> Self {
        let edges = tree
            .edges()
            .iter()
            .map(|e| {
                let w = match weighting {
                    Weighting::Strength => e.strength,
                    Weighting::Unweighted => 1.0,
                };
                (e.i, e.j, w)
            })
            .collect();
        Self { n: tree.n(), edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.n];
        for &(a, b, w) in &self.edges {
            k[a] += w;
            k[b] += w;
        }
        k
    }

    /// Standard (resolution 1) modularity of `partition`.
    pub fn modularity(&self, partition: &Partition) -> Result<f64> {
        self.modularity_with_resolution(partition, 1.0)
    }

    pub fn modularity_with_resolution(
        &self,
        partition: &Partition,
        resolution: f64,
    ) -> Result<f64> {
        if partition.n_nodes() != self.n {
            return Err(Error::PartitionSizeMismatch {
                expected: self.n,
                got: partition.n_nodes(),
            });
        }
        let m = self.total_weight();
        if self.edges.is_empty() || m <= 0.0 {
            return Err(Error::NoEdges);
        }
        let c = partition.n_communities();
        let mut inside = vec![0.0; c];
        let mut degree_sum = vec![0.0; c];
        for &(a, b, w) in &self.edges {
            let (ca, cb) = (partition.labels[a], partition.labels[b]);
            if ca == cb {
                inside[ca] += w;
            }
            degree_sum[ca] += w;
            degree_sum[cb] += w;
        }
        let two_m = 2.0 * m;
        Ok(inside
            .iter()
            .zip(&degree_sum)
            .map(|(l, k)| l / m - resolution * (k / two_m) * (k / two_m))
            .sum())
    }
}

/// Node -> community assignment with ids contiguous from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary ids to `0..k` in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = HashMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = map.len();
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    /// Groups equal string labels, ids in first-appearance order.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        let mut map: HashMap<&str, usize> = HashMap::new();
        let labels = names
            .iter()
            .map(|s| {
                let next = map.len();
                *map.entry(s.as_ref()).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
        }
    }

    pub fn single_community(n: usize) -> Self {
        Self { labels: vec![0; n] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_communities(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.labels[node]
    }

    /// Members of each community, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities()];
        for (node, &c) in self.labels.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Modularity of `partition` on the tree's adjacency.
pub fn modularity(tree: &WeightedTree, partition: &Partition, weighting: Weighting) -> Result<f64> {
    WeightedGraph::from_tree(tree, weighting).modularity(partition)
}

/// Louvain community detection on a tree.
///
/// Returns the partition and its standard (resolution 1) modularity.
pub fn louvain(
    tree: &WeightedTree,
    resolution: f64,
    seed: u64,
    weighting: Weighting,
) -> Result<(Partition, f64)> {
    louvain_graph(&WeightedGraph::from_tree(tree, weighting), resolution, seed)
}

/// Louvain community detection on an arbitrary weighted graph.
pub fn louvain_graph(
    graph: &WeightedGraph,
    resolution: f64,
    seed: u64,
) -> Result<(Partition, f64)> {
    if resolution <= 0.0 || !resolution.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    if graph.edges().is_empty() {
        // nothing to optimise; a lone node is its own community
        return Ok((Partition::singletons(n), 0.0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Level::from_graph(graph);
    let mut assign: Vec<usize> = (0..n).collect();
    let mut level = base.clone();

    loop {
        loop {
            let start = (0..level.n()).collect();
            let (comm, moved) = level.local_move(start, resolution, &mut rng);
            if !moved {
                break;
            }
            let (next, remap) = level.aggregate(&comm);
            for a in &mut assign {
                *a = remap[*a];
            }
            level = next;
        }
        let (comm, moved) = base.local_move(assign.clone(), resolution, &mut rng);
        if !moved {
            break;
        }
        let (next, remap) = base.aggregate(&comm);
        assign = remap;
        level = next;
    }

    let partition = Partition::from_labels(&assign);
    let q = graph.modularity(&partition)?;
    Ok((partition, q))
}

/// One aggregation level: super-nodes with internal (self-loop) weight.
#[derive(Debug, Clone)]
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(graph: &WeightedGraph) -> Self {
        let mut adj = vec![Vec::new(); graph.n()];
        for &(a, b, w) in graph.edges() {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        let degree = graph.degrees();
        let two_m = degree.iter().sum();
        Self {
            adj,
            self_loops: vec![0.0; graph.n()],
            degree,
            two_m,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Greedy single-node moves starting from `comm` (ids in `0..n`).
    /// Returns the final assignment and whether any node moved.
    fn local_move(
        &self,
        mut comm: Vec<usize>,
        resolution: f64,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<usize>, bool) {
        let n = self.n();
        let mut tot = vec![0.0; n];
        let mut size = vec![0usize; n];
        for (i, &c) in comm.iter().enumerate() {
            tot[c] += self.degree[i];
            size[c] += 1;
        }
        let mut empty: Vec<usize> = (0..n).rev().filter(|&c| size[c] == 0).collect();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let m = self.two_m / 2.0;
        let threshold = MIN_GAIN * m;
        let mut links = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_moved = false;

        loop {
            let mut moved = false;
            for &i in &order {
                let old = comm[i];
                let ki = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if links[c] == 0.0 {
                        touched.push(c);
                    }
                    links[c] += w;
                }
                tot[old] -= ki;
                size[old] -= 1;

                let gain = |c: usize, links: &[f64], tot: &[f64]| {
                    links[c] - resolution * tot[c] * ki / self.two_m
                };
                let mut best = old;
                let mut best_gain = gain(old, &links, &tot);
                for &c in &touched {
                    if c != old {
                        let g = gain(c, &links, &tot);
                        if g - best_gain > threshold {
                            best = c;
                            best_gain = g;
                        }
                    }
                }
                // an isolated node has gain 0
                let mut target = best;
                if size[old] > 0 && -best_gain > threshold {
                    target = empty.pop().expect("an empty community id exists");
                }

                if target != old {
                    if size[old] == 0 {
                        empty.push(old);
                    }
                    comm[i] = target;
                    moved = true;
                }
                tot[target] += ki;
                size[target] += 1;

                for &c in &touched {
                    links[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_moved = true;
        }
        (comm, any_moved)
    }

    /// Collapses communities into super-nodes. Returns the new level and the
    /// map from this level's nodes to super-node ids.
    fn aggregate(&self, comm: &[usize]) -> (Level, Vec<usize>) {
        let remap = Partition::from_labels(comm).labels;
        let k = remap.iter().max().map_or(0, |m| m + 1);
        let mut self_loops = vec![0.0; k];
        let mut degree = vec![0.0; k];
        let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for i in 0..self.n() {
            let ci = remap[i];
            self_loops[ci] += self.self_loops[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                if j <= i {
                    continue;
                }
                let cj = remap[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *between.entry((ci.min(cj), ci.max(cj))).or_insert(0.0) += w;
                }
            }
        }
        let mut adj = vec![Vec::new(); k];
        for ((a, b), w) in between {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        (
            Level {
                adj,
                self_loops,
                degree,
                two_m: self.two_m,
            },
            remap,
        )
    }
}

/// Reference partition from sector labels; ids in first-appearance order.
pub fn sectors_to_partition<S: AsRef<str>>(table: &PriceTable, tickers: &[S]) -> Result<Partition> {
    let mut sectors = Vec::with_capacity(tickers.len());
    for t in tickers {
        let t = t.as_ref();
        sectors.push(
            table
                .sector_of(t)
                .ok_or_else(|| Error::UnknownTicker(t.to_string()))?,
        );
    }
    Ok(Partition::from_names(&sectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i}")).collect()
    }

    fn path(n: usize) -> WeightedTree {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        WeightedTree::from_edges(names(n), &edges).unwrap()
    }

    #[test]
    fn single_community_is_zero() {
        let t = path(5);
        for w in [Weighting::Strength, Weighting::Unweighted] {
            let q = modularity(&t, &Partition::single_community(5), w).unwrap();
            assert!(q.abs() < 1e-15);
        }
    }

    #[test]
    fn path_of_three_singletons() {
        let q = modularity(&path(3), &Partition::singletons(3), Weighting::Unweighted).unwrap();
        assert!((q + 0.375).abs() < 1e-15);
    }

    #[test]
    fn partition_mismatch_is_an_error() {
        assert!(matches!(
            modularity(&path(3), &Partition::singletons(2), Weighting::Unweighted),
            Err(Error::PartitionSizeMismatch { .. })
        ));
    }

    #[test]
    fn labels_are_normalised() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.n_communities(), 3);
        assert_eq!(p.members(), vec![vec![0, 2], vec![1], vec![3]]);
        let s = Partition::from_names(&["X", "Y", "X"]);
        assert_eq!(s.labels(), &[0, 1, 0]);
    }

    #[test]
    fn lone_node() {
        let t = WeightedTree::from_edges(names(1), &[]).unwrap();
        let (p, q) = louvain(&t, 1.0, 0, Weighting::Strength).unwrap();
        assert_eq!(p.labels(), &[0]);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn bad_resolution() {
        assert!(louvain(&path(3), 0.0, 0, Weighting::Strength).is_err());
        assert!(louvain(&path(3), f64::NAN, 0, Weighting::Strength).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedGraph::new(2, vec![(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        let g = WeightedGraph::new(3, vec![]).unwrap();
        assert!(matches!(
            g.modularity(&Partition::singletons(3)),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn long_path_splits() {
        let (p, q) = louvain(&path(20), 1.0, 3, Weighting::Unweighted).unwrap();
        assert!(p.n_communities() > 1);
        assert!(q > 0.5);
    }
}
