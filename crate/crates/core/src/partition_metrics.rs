//! Topological coefficients of a spanning tree, the sector agreement score
//! and concentration statistics.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::ingest::{PriceTable, WindowSpec};
use crate::mst::WeightedTree;

/// Hop counts between every pair of tree nodes, by BFS from each node.
pub fn tree_distances(tree: &WeightedTree) -> Vec<Vec<usize>> {
    let adj = tree.adjacency();
    (0..tree.n())
        .into_par_iter()
        .map(|source| bfs_hops(&adj, source))
        .collect()
}

fn bfs_hops(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut hops = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    hops[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if hops[v] == usize::MAX {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }
    hops
}

/// Diameter (max hops) and characteristic path length (mean hops over the
/// N(N-1)/2 unordered pairs).
pub fn diameter_and_cpl(tree: &WeightedTree) -> Result<(usize, f64)> {
    let n = tree.n();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "diameter needs at least 2 nodes, got {n}"
        )));
    }
    let hops = tree_distances(tree);
    let mut diameter = 0;
    let mut total: u64 = 0;
    for (i, row) in hops.iter().enumerate() {
        for &h in &row[i + 1..] {
            diameter = diameter.max(h);
            total += h as u64;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((diameter, total as f64 / pairs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub leaf_count: usize,
    /// In ticker order.
    pub degrees: Vec<usize>,
}

pub fn degree_stats(tree: &WeightedTree) -> DegreeStats {
    let degrees = tree.degrees();
    DegreeStats {
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        leaf_count: degrees.iter().filter(|&&d| d == 1).count(),
        degrees,
    }
}

/// Fraction of correctly classified nodes.
///
/// A node whose reference community has `P` other members ("partners") is
/// correct when at least `ceil(P / 2)` of them share its detected community.
/// Nodes alone in their reference community count as correct.
pub fn sigma(reference: &Partition, detected: &Partition) -> Result<f64> {
    let n = reference.n_nodes();
    if detected.n_nodes() != n {
        return Err(Error::PartitionSizeMismatch {
            expected: n,
            got: detected.n_nodes(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    let mut ref_size = vec![0usize; reference.n_communities()];
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for v in 0..n {
        let (r, d) = (reference.community_of(v), detected.community_of(v));
        ref_size[r] += 1;
        *joint.entry((r, d)).or_insert(0) += 1;
    }
    let correct = (0..n)
        .filter(|&v| {
            let (r, d) = (reference.community_of(v), detected.community_of(v));
            let partners = ref_size[r] - 1;
            let shared = joint[&(r, d)] - 1;
            partners == 0 || shared >= partners.div_ceil(2)
        })
        .count();
    Ok(correct as f64 / n as f64)
}

/// Sum of the degrees of `selected` over the number of tree edges.
///
/// Equals 2 when every node is selected; a selection may therefore exceed 1.
pub fn link_share(tree: &WeightedTree, selected: &[usize]) -> Result<f64> {
    let n = tree.n();
    if n < 2 {
        return Err(Error::NoEdges);
    }
    let degrees = tree.degrees();
    let mut seen = vec![false; n];
    let mut sum = 0usize;
    for &v in selected {
        if v >= n {
            return Err(Error::UnknownNode { node: v, n });
        }
        if !std::mem::replace(&mut seen[v], true) {
            sum += degrees[v];
        }
    }
    Ok(sum as f64 / (n - 1) as f64)
}

/// The `ceil(q * N)` nodes with the largest values, ties broken by lower index.
/// Returned in rank order.
pub fn top_fraction_by(values: &[f64], q: f64) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction {q} outside (0, 1]"
        )));
    }
    let n = values.len();
    // absorb representation error, e.g. 0.05 * 20 must select exactly 1
    let k = ((q * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// Mean market cap of each sector over all (member ticker, window day) cells
/// that carry a value.
pub fn sector_cap_averages(
    table: &PriceTable,
    window: &WindowSpec,
) -> Result<BTreeMap<String, f64>> {
    let caps = table.market_caps().ok_or(Error::MissingMarketCaps)?;
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (t, row) in caps.iter().enumerate() {
        if !window.contains(table.dates()[t]) {
            continue;
        }
        for (i, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                let e = acc.entry(table.sectors()[i].as_str()).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
    }
    if acc.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no market-cap cells inside window {}",
            window.label
        )));
    }
    Ok(acc
        .into_iter()
        .map(|(s, (sum, count))| (s.to_string(), sum / count as f64))
        .collect())
}

/// Average market cap per ticker over the rows of `table`, `None` when a ticker
/// has no cap values.
pub fn ticker_cap_averages(table: &PriceTable) -> Result<Vec<Option<f64>>> {
    let caps = table.market_caps().ok_or(Error::MissingMarketCaps)?;
    Ok((0..table.n_tickers())
        .map(|i| {
            let vals: Vec<f64> = caps.iter().filter_map(|row| row[i]).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect())
}

/// Summary coefficients of one tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub diameter: usize,
    pub char_path_length: f64,
    pub modularity: f64,
    pub sigma: f64,
    pub max_degree: usize,
    pub leaf_count: usize,
    pub star_ratio: f64,
    pub leaf_ratio: f64,
    pub n_nodes: usize,
}

impl MetricsReport {
    /// Combines the tree coefficients with a precomputed modularity and the
    /// agreement between `reference` and `detected`.
    pub fn compute(
        tree: &WeightedTree,
        modularity: f64,
        reference: &Partition,
        detected: &Partition,
    ) -> Result<Self> {
        let (diameter, char_path_length) = diameter_and_cpl(tree)?;
        let stats = degree_stats(tree);
        let edges = (tree.n() - 1) as f64;
        Ok(Self {
            diameter,
            char_path_length,
            modularity,
            sigma: sigma(reference, detected)?,
            max_degree: stats.max_degree,
            leaf_count: stats.leaf_count,
            star_ratio: diameter as f64 / edges,
            leaf_ratio: stats.leaf_count as f64 / edges,
            n_nodes: tree.n(),
        })
    }

    /// Checks the range invariants that hold for every spanning tree.
    pub fn check_ranges(&self) -> std::result::Result<(), String> {
        let n = self.n_nodes;
        if n < 2 {
            return Err(format!("report on {n} nodes"));
        }
        let mut problems = Vec::new();
        if n > 2 && !(2..=n - 1).contains(&self.diameter) {
            problems.push(format!("diameter {} outside [2, {}]", self.diameter, n - 1));
        }
        if self.char_path_length > self.diameter as f64 || self.char_path_length < 1.0 {
            problems.push(format!("C = {} not in [1, d]", self.char_path_length));
        }
        if !(1..=n - 1).contains(&self.max_degree) {
            problems.push(format!(
                "max degree {} outside [1, {}]",
                self.max_degree,
                n - 1
            ));
        }
        // two nodes are both leaves, so the leaf bounds only apply from N = 3
        let leaf_ok = if n == 2 {
            self.leaf_count == 2
        } else {
            (2..=n - 1).contains(&self.leaf_count)
                && self.leaf_ratio > 0.0
                && self.leaf_ratio <= 1.0
        };
        if !leaf_ok {
            problems.push(format!(
                "leaf count {} (ratio {}) out of range for N = {n}",
                self.leaf_count, self.leaf_ratio
            ));
        }
        if !(-0.5..=1.0).contains(&self.modularity) {
            problems.push(format!("modularity {} outside [-0.5, 1]", self.modularity));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            problems.push(format!("sigma {} outside [0, 1]", self.sigma));
        }
        if !(self.star_ratio > 0.0 && self.star_ratio <= 1.0) {
            problems.push(format!("star ratio {} outside (0, 1]", self.star_ratio));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i}")).collect()
    }

    fn path(n: usize) -> WeightedTree {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        WeightedTree::from_edges(names(n), &e).unwrap()
    }

    fn star(n: usize) -> WeightedTree {
        let e: Vec<_> = (1..n).map(|i| (0, i, 1.0)).collect();
        WeightedTree::from_edges(names(n), &e).unwrap()
    }

    #[test]
    fn hops_on_small_trees() {
        let h = tree_distances(&path(3));
        assert_eq!(h[0], vec![0, 1, 2]);
        assert_eq!(h[1], vec![1, 0, 1]);
        let h = tree_distances(&star(5));
        assert!((1..5).all(|i| h[0][i] == 1));
        assert_eq!(h[1][4], 2);
    }

    #[test]
    fn diameter_and_cpl_small() {
        let (d, c) = diameter_and_cpl(&path(4)).unwrap();
        assert_eq!(d, 3);
        assert!((c - 10.0 / 6.0).abs() < 1e-15);
        let (d, c) = diameter_and_cpl(&star(5)).unwrap();
        assert_eq!(d, 2);
        assert_eq!(c, 1.6);
        assert_eq!(diameter_and_cpl(&path(2)).unwrap(), (1, 1.0));
        assert!(diameter_and_cpl(&path(1)).is_err());
    }

    #[test]
    fn degrees() {
        let s = degree_stats(&star(6));
        assert_eq!((s.max_degree, s.leaf_count), (5, 5));
        let p = degree_stats(&path(6));
        assert_eq!((p.max_degree, p.leaf_count), (2, 2));
        assert_eq!(p.degrees, vec![1, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn sigma_cases() {
        let reference = Partition::from_labels(&[0, 0, 0, 1, 1]);
        let detected = Partition::from_labels(&[0, 0, 1, 0, 1]);
        assert_eq!(sigma(&reference, &detected).unwrap(), 0.4);
        assert_eq!(
            sigma(&reference, &Partition::single_community(5)).unwrap(),
            1.0
        );
        assert_eq!(sigma(&reference, &Partition::singletons(5)).unwrap(), 0.0);
        assert_eq!(sigma(&reference, &reference).unwrap(), 1.0);
        assert!(sigma(&reference, &Partition::singletons(4)).is_err());
        // a singleton sector is vacuously correct
        let reference = Partition::from_labels(&[0, 1, 1]);
        assert!((sigma(&reference, &Partition::singletons(3)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn link_shares() {
        let s = star(20);
        assert_eq!(link_share(&s, &[0]).unwrap(), 1.0);
        assert_eq!(link_share(&s, &[3]).unwrap(), 1.0 / 19.0);
        let all: Vec<usize> = (0..20).collect();
        assert_eq!(link_share(&s, &all).unwrap(), 2.0);
        assert_eq!(link_share(&s, &[0, 0]).unwrap(), 1.0);
        assert!(link_share(&s, &[20]).is_err());
    }

    #[test]
    fn top_fraction() {
        let v: Vec<f64> = (0..20).map(|i| (i % 7) as f64).collect();
        assert_eq!(top_fraction_by(&v, 1.0).unwrap().len(), 20);
        assert_eq!(top_fraction_by(&v, 0.05).unwrap(), vec![6]);
        assert_eq!(top_fraction_by(&v, 0.1).unwrap(), vec![6, 13]);
        let big = vec![1.0; 296];
        assert_eq!(top_fraction_by(&big, 0.05).unwrap().len(), 15);
        assert!(top_fraction_by(&[], 0.5).is_err());
        assert!(top_fraction_by(&v, 0.0).is_err());
        assert!(top_fraction_by(&v, 1.5).is_err());
    }

    #[test]
    fn report_on_path_and_star() {
        let p = path(5);
        let r = MetricsReport::compute(
            &p,
            0.3,
            &Partition::single_community(5),
            &Partition::single_community(5),
        )
        .unwrap();
        assert_eq!(r.star_ratio, 1.0);
        assert_eq!(r.leaf_ratio, 0.5);
        r.check_ranges().unwrap();
        let s = star(5);
        let r = MetricsReport::compute(
            &s,
            0.0,
            &Partition::single_community(5),
            &Partition::single_community(5),
        )
        .unwrap();
        assert_eq!(r.leaf_ratio, 1.0);
        assert_eq!(r.star_ratio, 0.5);
        r.check_ranges().unwrap();
    }
}
