//! How well detected communities reproduce a sector classification.
//!
//! `cargo run --example sector_agreement`

use mstnet::prelude::*;
use mstnet::synth::generate;

fn main() -> Result<()> {
    // A node counts as correct when at least half of its sector partners share
    // its community. Reference {A,B,C | D,E} against detected {A,B,D | C,E}:
    // A and B are correct, C, D and E are not.
    let reference = Partition::from_names(&["fin", "fin", "fin", "tech", "tech"]);
    let detected = Partition::from_labels(&[0, 0, 1, 0, 1]);
    println!("worked example: sigma = {}", sigma(&reference, &detected)?);
    println!(
        "all in one community: {}",
        sigma(&reference, &Partition::single_community(5))?
    );
    println!(
        "all singletons: {}",
        sigma(&reference, &Partition::singletons(5))?
    );

    // On planted data, agreement drops as the sector signal fades.
    for rho_in in [0.8, 0.5, 0.3, 0.15] {
        let table = generate(&SynthSpec::new(6, 8, 252, rho_in, 0.1, 5))?;
        let dm = DistanceMatrix::from_returns(&log_returns(&table)?)?;
        let tree = build_mst(&dm)?;
        let (communities, q) = louvain(&tree, 1.0, 0, Weighting::Strength)?;
        let sectors = sectors_to_partition(&table, dm.tickers())?;
        println!(
            "rho_in {rho_in:.2}: sigma {:.3}, Q {q:.3}",
            sigma(&sectors, &communities)?
        );
    }
    Ok(())
}
