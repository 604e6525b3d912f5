//! The minimal spanning tree of a distance matrix, and what its edges look like.
//!
//! `cargo run --example minimum_spanning_tree`

use mstnet::prelude::*;
use mstnet::returns_corr::SquareMatrix;

fn main() -> Result<()> {
    // Five stocks with hand-picked correlations: two tight pairs and a loner.
    let tickers: Vec<String> = ["AAA", "AAB", "BBA", "BBB", "CCC"]
        .map(String::from)
        .to_vec();
    let rho = SquareMatrix::from_rows(&[
        vec![1.0, 0.9, 0.3, 0.2, 0.1],
        vec![0.9, 1.0, 0.4, 0.3, 0.1],
        vec![0.3, 0.4, 1.0, 0.8, 0.2],
        vec![0.2, 0.3, 0.8, 1.0, 0.5],
        vec![0.1, 0.1, 0.2, 0.5, 1.0],
    ])?;
    let dm = DistanceMatrix::from_correlation(tickers, rho)?;
    let tree = build_mst(&dm)?;

    println!(
        "{} edges, total distance {:.4}",
        tree.edges().len(),
        tree.total_distance()
    );
    for e in tree.edges() {
        println!(
            "  {} -- {}  d = {:.4}  strength = {:.4}",
            tree.tickers()[e.i],
            tree.tickers()[e.j],
            e.distance,
            e.strength
        );
    }
    println!("degrees: {:?}", tree.degrees());

    // Identical series sit at distance 0; their strength is capped, not infinite.
    println!("strength at d = 0: {}", strength_of(0.0));
    Ok(())
}
