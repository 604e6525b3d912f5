//! From prices to the correlation and distance matrices.
//!
//! `cargo run --example correlation_network`

use mstnet::prelude::*;
use mstnet::synth::generate;

fn main() -> Result<()> {
    // 4 sectors of 6 stocks, one trading year.
    let table = generate(&SynthSpec::new(4, 6, 252, 0.6, 0.15, 42))?;
    let returns = log_returns(&table)?;
    println!(
        "{} tickers, {} daily log returns",
        returns.n_tickers(),
        returns.n_periods()
    );

    let dm = DistanceMatrix::from_returns(&returns)?;
    let t = dm.tickers();
    println!(
        "{} vs {}: rho {:.3}, d {:.3}",
        t[0],
        t[1],
        dm.correlation(0, 1),
        dm.distance(0, 1)
    );
    println!(
        "{} vs {}: rho {:.3}, d {:.3}",
        t[0],
        t[6],
        dm.correlation(0, 6),
        dm.distance(0, 6)
    );

    let sectors = sectors_to_partition(&table, t)?;
    let summary = distance_summary(&dm, 10)?.with_groups(&dm, sectors.labels())?;
    println!(
        "{} pairs: min {:.3}  median {:.3}  mean {:.3}  max {:.3}",
        summary.pairs, summary.min, summary.median, summary.mean, summary.max
    );
    println!(
        "same sector {:.3}, different sectors {:.3}",
        summary.intra_group_mean.unwrap_or(f64::NAN),
        summary.cross_group_mean.unwrap_or(f64::NAN)
    );
    for bin in summary.histogram.iter().filter(|b| b.count > 0) {
        println!(
            "  [{:.1}, {:.1})  {}",
            bin.lower,
            bin.upper,
            "#".repeat(bin.count / 4 + 1)
        );
    }
    Ok(())
}
