//! Diameter, characteristic path length, hubs and link concentration.
//!
//! `cargo run --example tree_topology`

use mstnet::prelude::*;
use mstnet::synth::generate;

fn main() -> Result<()> {
    let table = generate(&SynthSpec::new(10, 10, 252, 0.5, 0.1, 8))?;
    let dm = DistanceMatrix::from_returns(&log_returns(&table)?)?;
    let tree = build_mst(&dm)?;

    let (diameter, cpl) = diameter_and_cpl(&tree)?;
    let stats = degree_stats(&tree);
    println!("N = {}, diameter {diameter}, C = {cpl:.3}", tree.n());
    println!(
        "max degree {}, {} leaves",
        stats.max_degree, stats.leaf_count
    );

    // Hop counts from the biggest hub.
    let hub = (0..tree.n())
        .max_by_key(|&i| (stats.degrees[i], std::cmp::Reverse(i)))
        .unwrap();
    let hops = &tree_distances(&tree)[hub];
    println!(
        "hub {} reaches every node within {} hops and holds {:.1}% of the links",
        dm.tickers()[hub],
        hops.iter().max().unwrap(),
        100.0 * link_share(&tree, &[hub])?
    );

    // The 5% most connected nodes.
    let degrees: Vec<f64> = stats.degrees.iter().map(|&d| d as f64).collect();
    let top = top_fraction_by(&degrees, 0.05)?;
    println!(
        "top {} nodes by degree capture {:.1}% of the links",
        top.len(),
        100.0 * link_share(&tree, &top)?
    );
    Ok(())
}
