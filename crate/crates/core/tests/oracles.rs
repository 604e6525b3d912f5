//! Library results checked against brute-force references and against
//! constants worked out by hand.

mod common;

use chrono::NaiveDate;
use common::*;
use mstnet::community::{louvain, louvain_graph, modularity, Partition, WeightedGraph, Weighting};
use mstnet::ingest::{PriceTable, WindowSpec};
use mstnet::mst::{build_mst, WeightedTree};
use mstnet::partition_metrics::{
    diameter_and_cpl, sector_cap_averages, sigma, ticker_cap_averages, tree_distances,
};
use mstnet::returns_corr::{
    distance_summary, log_returns, pearson, DistanceMatrix, ReturnsMatrix, SquareMatrix,
};

fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

fn tree_of(n: usize, edges: &[(usize, usize)]) -> WeightedTree {
    let e: Vec<(usize, usize, f64)> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
    WeightedTree::from_edges(names(n), &e).unwrap()
}

#[test]
fn log_return_of_ten_percent_move() {
    // ln(1.1) to 17 significant digits.
    const LN_1_1: f64 = 0.09531017980432486;
    let t = PriceTable::new(
        vec![d(2020, 1, 1), d(2020, 1, 2), d(2020, 1, 3)],
        vec!["A".into()],
        vec![vec![Some(100.0)], vec![Some(110.0)], vec![Some(121.0)]],
        vec!["s".into()],
        None,
    )
    .unwrap();
    let r = log_returns(&t).unwrap();
    assert_eq!(r.n_periods(), 2);
    for t in 0..2 {
        assert!((r.value(t, 0) - LN_1_1).abs() < 1e-15);
    }
}

#[test]
fn pearson_matches_exact_rational_value() {
    // x = [1,2,3], y = [1,2,4]: cov sum 3, var sums 2 and 14/3, so rho = 3 sqrt(3/28).
    const RHO: f64 = 0.9819805060619657;
    let r = ReturnsMatrix::from_columns(
        vec!["x".into(), "y".into()],
        vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 4.0]],
    )
    .unwrap();
    let rho = pearson(&r).unwrap();
    assert!((rho.get(0, 1) - RHO).abs() < 1e-15);
    assert_eq!(rho.get(0, 1), rho.get(1, 0));
    assert_eq!(rho.get(0, 0), 1.0);
    let dm = DistanceMatrix::from_correlation(r.tickers().to_vec(), rho).unwrap();
    assert!((dm.distance(0, 1) - (2.0 * (1.0 - RHO)).sqrt()).abs() < 1e-15);
}

#[test]
fn mst_matches_spanning_tree_enumeration() {
    let mut rng = rng(11);
    for case in 0..60 {
        let n = 3 + case % 4;
        let dist = dyadic_distances(n, &mut rng);
        let dm = DistanceMatrix::from_distances(names(n), SquareMatrix::from_rows(&dist).unwrap())
            .unwrap();
        let tree = build_mst(&dm).unwrap();
        let (weight, edges) = oracle_mst(&dist);
        assert_eq!(tree.total_distance(), weight, "case {case}");
        let mut got: Vec<(usize, usize)> = tree.edges().iter().map(|e| (e.i, e.j)).collect();
        got.sort_unstable();
        assert_eq!(got, edges, "case {case}");
    }
}

#[test]
fn mst_of_hand_built_matrix() {
    // Path 0-1-2-3 at distance 0.5 with every other pair at 1.5: the tree is
    // the path and the tie-free total is 1.5.
    let mut rows = vec![vec![1.5; 4]; 4];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for i in 0..3 {
        rows[i][i + 1] = 0.5;
        rows[i + 1][i] = 0.5;
    }
    let dm =
        DistanceMatrix::from_distances(names(4), SquareMatrix::from_rows(&rows).unwrap()).unwrap();
    let tree = build_mst(&dm).unwrap();
    assert_eq!(tree.total_distance(), 1.5);
    let got: Vec<(usize, usize)> = tree.edges().iter().map(|e| (e.i, e.j)).collect();
    assert_eq!(got, vec![(0, 1), (1, 2), (2, 3)]);
}

#[test]
fn modularity_matches_double_sum() {
    let mut rng = rng(5);
    for _ in 0..50 {
        let n = 6;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rand::Rng::random_bool(&mut rng, 0.5) {
                    edges.push((i, j, rand::Rng::random_range(&mut rng, 0.1..3.0)));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let g = WeightedGraph::new(n, edges.clone()).unwrap();
        for labels in all_partitions(n).iter().step_by(7) {
            let p = Partition::from_labels(labels);
            let want = modularity_double_sum(n, &edges, labels);
            assert!((g.modularity(&p).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn two_triangles_joined_by_a_bridge() {
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
    let g = WeightedGraph::new(6, edges.iter().map(|&(i, j)| (i, j, 1.0)).collect()).unwrap();
    let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
    // m = 7, each side has 3 internal edges and degree sum 7.
    let q = 6.0 / 7.0 - 0.5;
    assert!((g.modularity(&p).unwrap() - q).abs() < 1e-15);
    let (found, q_found) = louvain_graph(&g, 1.0, 0).unwrap();
    assert_eq!(found, p);
    assert!((q_found - q).abs() < 1e-12);
}

#[test]
fn louvain_on_small_trees_reaches_exhaustive_optimum() {
    // Star of 5 and two 4-node stars joined hub to hub.
    let star5 = star_edges(5);
    let two_stars = vec![(0, 1), (0, 2), (0, 3), (4, 5), (4, 6), (4, 7), (0, 4)];
    for (n, edges) in [(5, star5), (8, two_stars)] {
        let tree = tree_of(n, &edges);
        let w: Vec<(usize, usize, f64)> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        let best = max_modularity(n, &w);
        for seed in 0..5 {
            let (p, q) = louvain(&tree, 1.0, seed, Weighting::Unweighted).unwrap();
            assert!((q - best).abs() < 1e-9, "n={n} seed={seed}: {q} vs {best}");
            let direct = modularity(&tree, &p, Weighting::Unweighted).unwrap();
            assert!((direct - q).abs() < 1e-12);
        }
    }
}

#[test]
fn tree_hops_match_floyd_warshall() {
    let edges = vec![
        (0, 1),
        (1, 2),
        (2, 3),
        (1, 4),
        (4, 5),
        (4, 6),
        (6, 7),
        (0, 8),
        (8, 9),
    ];
    let n = 10;
    let tree = tree_of(n, &edges);
    let fw = floyd_warshall(n, &edges);
    assert_eq!(tree_distances(&tree), fw);
    let (diam, cpl) = diameter_and_cpl(&tree).unwrap();
    let mut sum = 0;
    let mut max = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += fw[i][j];
            max = max.max(fw[i][j]);
        }
    }
    assert_eq!(diam, max);
    assert_eq!(diam, 6);
    assert!((cpl - sum as f64 / 45.0).abs() < 1e-12);
}

#[test]
fn distance_summary_quantiles_by_sorting() {
    let mut rng = rng(3);
    let rows = dyadic_distances(5, &mut rng);
    let dm =
        DistanceMatrix::from_distances(names(5), SquareMatrix::from_rows(&rows).unwrap()).unwrap();
    let s = distance_summary(&dm, 4).unwrap();
    let mut v: Vec<f64> = (0..5)
        .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
        .map(|(i, j)| rows[i][j])
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(s.pairs, 10);
    assert_eq!(s.min, v[0]);
    assert_eq!(s.max, v[9]);
    assert_eq!(s.median, (v[4] + v[5]) / 2.0);
    assert!((s.mean - v.iter().sum::<f64>() / 10.0).abs() < 1e-15);
    let counts: Vec<usize> = (0..4)
        .map(|b| {
            v.iter()
                .filter(|&&x| {
                    let lo = b as f64 * 0.5;
                    x >= lo && (x < lo + 0.5 || (b == 3 && x <= 2.0))
                })
                .count()
        })
        .collect();
    assert_eq!(
        s.histogram.iter().map(|b| b.count).collect::<Vec<_>>(),
        counts
    );
}

#[test]
fn cap_averages_match_double_loop() {
    let dates = vec![d(2020, 1, 1), d(2020, 1, 2), d(2020, 1, 3), d(2020, 1, 6)];
    let tickers: Vec<String> = vec!["A".into(), "B".into(), "C".into()];
    let sectors: Vec<String> = vec!["x".into(), "y".into(), "x".into()];
    let prices = vec![vec![Some(1.0); 3]; 4];
    let caps = vec![
        vec![Some(10.0), Some(100.0), None],
        vec![Some(20.0), None, Some(5.0)],
        vec![Some(30.0), Some(300.0), Some(7.0)],
        vec![Some(1e6), Some(1e6), Some(1e6)],
    ];
    let table = PriceTable::new(
        dates.clone(),
        tickers,
        prices,
        sectors.clone(),
        Some(caps.clone()),
    )
    .unwrap();
    let window = WindowSpec::new(dates[0], dates[2], "w").unwrap();
    let got = sector_cap_averages(&table, &window).unwrap();
    for sector in ["x", "y"] {
        let mut sum = 0.0;
        let mut count = 0;
        for row in caps.iter().take(3) {
            for (i, cell) in row.iter().enumerate() {
                if sectors[i] == sector {
                    if let Some(v) = cell {
                        sum += v;
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(got[sector], sum / count as f64);
    }
    assert_eq!(got["x"], 72.0 / 5.0);
    assert_eq!(got["y"], 200.0);

    let per_ticker = ticker_cap_averages(&table).unwrap();
    assert_eq!(per_ticker[1], Some((100.0 + 300.0 + 1e6) / 3.0));
}

#[test]
fn sigma_worked_example() {
    // Reference {A,B,C | D,E}, detected {A,B,D | C,E}: only A and B are correct.
    let reference = Partition::from_labels(&[0, 0, 0, 1, 1]);
    let detected = Partition::from_labels(&[0, 0, 1, 0, 1]);
    assert_eq!(sigma(&reference, &detected).unwrap(), 0.4);
    assert_eq!(sigma_naive(reference.labels(), detected.labels()), 0.4);
}

#[test]
fn sigma_matches_naive_definition_on_random_partitions() {
    let mut rng = rng(17);
    for _ in 0..200 {
        let n = rand::Rng::random_range(&mut rng, 1..12);
        let a: Vec<usize> = (0..n)
            .map(|_| rand::Rng::random_range(&mut rng, 0..4))
            .collect();
        let b: Vec<usize> = (0..n)
            .map(|_| rand::Rng::random_range(&mut rng, 0..4))
            .collect();
        let got = sigma(&Partition::from_labels(&a), &Partition::from_labels(&b)).unwrap();
        assert_eq!(got, sigma_naive(&a, &b));
    }
}
