//! Louvain communities on the MST, with and without edge strengths.
//!
//! `cargo run --example community_detection`

use mstnet::prelude::*;
use mstnet::synth::generate;

fn main() -> Result<()> {
    let table = generate(&SynthSpec::new(5, 8, 500, 0.65, 0.1, 3))?;
    let dm = DistanceMatrix::from_returns(&log_returns(&table)?)?;
    let tree = build_mst(&dm)?;
    let sectors = sectors_to_partition(&table, dm.tickers())?;

    for weighting in [Weighting::Strength, Weighting::Unweighted] {
        let (detected, q) = louvain(&tree, 1.0, 0, weighting)?;
        println!(
            "{weighting:?}: {} communities, Q = {q:.4}, sigma = {:.3}",
            detected.n_communities(),
            sigma(&sectors, &detected)?
        );
    }

    // The seed only fixes the node visiting order; results are reproducible.
    let (a, _) = louvain(&tree, 1.0, 11, Weighting::Strength)?;
    let (b, _) = louvain(&tree, 1.0, 11, Weighting::Strength)?;
    assert_eq!(a, b);

    // Higher resolution favours smaller communities.
    for gamma in [0.5, 1.0, 2.0, 4.0] {
        let (p, _) = louvain(&tree, gamma, 0, Weighting::Strength)?;
        println!("resolution {gamma}: {} communities", p.n_communities());
    }

    let (detected, _) = louvain(&tree, 1.0, 0, Weighting::Strength)?;
    for (c, members) in detected.members().iter().enumerate() {
        let names: Vec<&str> = members.iter().map(|&i| dm.tickers()[i].as_str()).collect();
        println!("community {c}: {}", names.join(" "));
    }
    Ok(())
}
