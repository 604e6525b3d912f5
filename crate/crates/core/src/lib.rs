//! Correlation networks of stocks.
//!
//! Price panels become log returns, Pearson correlations and the distance
//! `d = sqrt(2 (1 - rho))`. The minimal spanning tree of the complete distance
//! network is then partitioned by Louvain modularity maximisation, described by
//! its diameter, characteristic path length, degree profile and hub
//! concentration, and compared with a reference (sector) classification.
//!
//! ```no_run
//! use mstnet::prelude::*;
//!
//! let table = mstnet::synth::generate(&SynthSpec::new(4, 10, 250, 0.6, 0.1, 7))?;
//! let returns = log_returns(&table)?;
//! let dm = DistanceMatrix::from_returns(&returns)?;
//! let tree = build_mst(&dm)?;
//! let (communities, q) = louvain(&tree, 1.0, 0, Weighting::Strength)?;
//! let sectors = sectors_to_partition(&table, dm.tickers())?;
//! println!("Q = {q:.3}, sigma = {:.3}", sigma(&sectors, &communities)?);
//! # Ok::<(), mstnet::Error>(())
//! ```
//!
//! Runnable walkthroughs for each stage live in the crate's `examples/`
//! directory; the `mstnet` binary drives the whole pipeline from a config file.

pub mod community;
pub mod config;
pub mod error;
pub mod export;
pub mod ingest;
pub mod mst;
pub mod partition_metrics;
pub mod pipeline;
pub mod returns_corr;
pub mod synth;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::community::{
        louvain, louvain_graph, modularity, sectors_to_partition, Partition, WeightedGraph,
        Weighting,
    };
    pub use crate::config::{ConfigOverrides, RunConfig};
    pub use crate::error::{Error, Result};
    pub use crate::export::{export_graph, Format, TreeView};
    pub use crate::ingest::{load_price_table, slice_window, PriceTable, WindowSpec};
    pub use crate::mst::{build_mst, strength_of, TreeEdge, WeightedTree};
    pub use crate::partition_metrics::{
        degree_stats, diameter_and_cpl, link_share, sector_cap_averages, sigma, top_fraction_by,
        tree_distances, MetricsReport,
    };
    pub use crate::pipeline::{analyze_window, run_pipeline, AnalysisOptions, WindowBundle};
    pub use crate::returns_corr::{
        distance_summary, log_returns, mantegna_distance, pearson, DistanceMatrix, ReturnsMatrix,
    };
    pub use crate::synth::SynthSpec;
}
