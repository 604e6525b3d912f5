//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library's algorithms.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("T{i:02}")).collect()
}

/// Random symmetric distance matrix with zero diagonal. Entries are multiples
/// of 1/16 in (0, 2], so sums are exact and ties are frequent.
pub fn dyadic_distances(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(1..=32) as f64 / 16.0;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Decodes a Prüfer sequence into the edge list of a labelled tree on `n` nodes.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Every labelled spanning tree of K_n (n^(n-2) of them).
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let s = code % n;
                    code /= n;
                    s
                })
                .collect();
            prufer_decode(&seq, n)
        })
        .collect()
}

/// Oracle MST: minimum total distance over all spanning trees, plus the tree
/// chosen by ranking every pair by (distance, i, j) and taking the tree whose
/// descending rank vector is lexicographically smallest. Edges come back
/// sorted by (i, j).
pub fn oracle_mst(d: &[Vec<f64>]) -> (f64, Vec<(usize, usize)>) {
    let n = d.len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs.sort_by(|a, b| {
        d[a.0][a.1]
            .partial_cmp(&d[b.0][b.1])
            .unwrap()
            .then(a.cmp(b))
    });
    let rank = |e: &(usize, usize)| pairs.iter().position(|p| p == e).unwrap();

    let mut best_weight = f64::INFINITY;
    let mut best_key: Option<Vec<usize>> = None;
    let mut best_tree = Vec::new();
    for tree in all_spanning_trees(n) {
        let w: f64 = tree.iter().map(|&(i, j)| d[i][j]).sum();
        best_weight = best_weight.min(w);
        let mut key: Vec<usize> = tree.iter().map(rank).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if best_key.as_ref().is_none_or(|k| key < *k) {
            best_key = Some(key);
            best_tree = tree;
        }
    }
    best_tree.sort_unstable();
    (best_weight, best_tree)
}

/// Newman modularity by the defining double sum over node pairs.
pub fn modularity_double_sum(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// All set partitions of n nodes as restricted-growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max + 1 {
            cur[pos] = v;
            rec(pos + 1, max.max(v), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// Exhaustive maximum modularity.
pub fn max_modularity(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    all_partitions(n)
        .iter()
        .map(|p| modularity_double_sum(n, edges, p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All-pairs hop counts by Floyd–Warshall.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let inf = usize::MAX / 4;
    let mut h = vec![vec![inf; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(i, j) in edges {
        h[i][j] = 1;
        h[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if h[i][k] + h[k][j] < h[i][j] {
                    h[i][j] = h[i][k] + h[k][j];
                }
            }
        }
    }
    h
}

/// Hop counts from `src` by breadth-first search on an edge list.
pub fn bfs_hops(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut dist = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// (diameter, mean hop count over unordered pairs) by BFS from every node.
pub fn brute_diameter_cpl(n: usize, edges: &[(usize, usize)]) -> (usize, f64) {
    let mut max = 0;
    let mut sum = 0usize;
    for s in 0..n {
        let d = bfs_hops(n, edges, s);
        for &x in &d[s + 1..] {
            max = max.max(x);
            sum += x;
        }
    }
    (max, sum as f64 / (n * (n - 1) / 2) as f64)
}

pub fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n - 1).map(|i| (i, i + 1)).collect()
}

pub fn star_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (0, i)).collect()
}

/// Random labelled tree from a uniform Prüfer sequence.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(&seq, n)
}

/// σ by its definition, written independently of the library.
pub fn sigma_naive(reference: &[usize], detected: &[usize]) -> f64 {
    let n = reference.len();
    let correct = (0..n)
        .filter(|&i| {
            let partners: Vec<usize> = (0..n)
                .filter(|&j| j != i && reference[j] == reference[i])
                .collect();
            let shared = partners
                .iter()
                .filter(|&&j| detected[j] == detected[i])
                .count();
            2 * shared >= partners.len()
        })
        .count();
    correct as f64 / n as f64
}
