//! Writes the annotated MST as GraphML, DOT, JSON and an edge-list CSV.
//!
//! `cargo run --example graph_export -- [OUT_DIR]`

use std::path::PathBuf;

use mstnet::prelude::*;
use mstnet::synth::generate;

fn main() -> Result<()> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mstnet-graph-export"));
    std::fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;

    let table = generate(&SynthSpec::new(3, 5, 252, 0.6, 0.1, 1))?;
    let dm = DistanceMatrix::from_returns(&log_returns(&table)?)?;
    let tree = build_mst(&dm)?;
    let (detected, _) = louvain(&tree, 1.0, 0, Weighting::Strength)?;
    let sectors: Vec<String> = dm
        .tickers()
        .iter()
        .map(|t| table.sector_of(t).unwrap_or_default().to_string())
        .collect();
    let view = TreeView::new(&tree, &detected, &sectors)?;

    for format in Format::ALL {
        let path = out.join(format!("mst.{}", format.extension()));
        export_graph(&view, format, &path)?;
        println!("wrote {}", path.display());
    }
    println!("\n{}", view.to_dot());
    Ok(())
}
