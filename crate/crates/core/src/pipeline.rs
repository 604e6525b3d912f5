//! End-to-end run: for every window, slice the panel, compute returns and
//! distances, build the MST, detect communities, score them against the
//! sectors and write every artifact under `<output_dir>/<label>/`.
//!
//! A consolidated `table1.csv` (`label,d,C,Q,sigma,mk`, one row per window
//! in config order) is written next to the window directories.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::community::{louvain, sectors_to_partition, Partition, Weighting};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export::{self, Format, TreeView};
use crate::ingest::{load_price_table, slice_window, write_file, PriceTable, WindowSpec};
use crate::mst::{build_mst, WeightedTree};
use crate::partition_metrics::{
    degree_stats, link_share, sector_cap_averages, ticker_cap_averages, top_fraction_by,
    MetricsReport,
};
use crate::returns_corr::{distance_summary, log_returns, DistanceMatrix, DistanceSummary};

/// Share of nodes treated as "the largest" / "the most connected".
pub const TOP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hub {
    pub ticker: String,
    pub degree: usize,
    pub link_share: f64,
}

/// How concentrated the tree's links are on hubs and on the largest companies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Concentration {
    pub hub: Hub,
    /// Link share of the top 5% nodes by degree.
    pub top_degree_link_share: f64,
    /// Link share of the top 5% nodes by average market cap.
    pub top_cap_link_share: Option<f64>,
}

/// Everything computed for one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowBundle {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub weighting: Weighting,
    pub resolution: f64,
    pub seed: u64,
    pub n_returns: usize,
    /// Dropped for a missing price inside the window.
    pub dropped_missing: Vec<String>,
    /// Dropped for zero return variance (only with `drop_constant`).
    pub dropped_constant: Vec<String>,
    pub sectors: Vec<String>,
    pub tree: WeightedTree,
    pub detected: Partition,
    pub sector_partition: Partition,
    pub metrics: MetricsReport,
    pub distance_summary: DistanceSummary,
    pub concentration: Concentration,
    pub sector_cap_averages: Option<BTreeMap<String, f64>>,
}

impl WindowBundle {
    pub fn tickers(&self) -> &[String] {
        self.tree.tickers()
    }
}

/// A bundle plus the full matrices it was derived from.
#[derive(Debug, Clone)]
pub struct WindowOutput {
    pub bundle: WindowBundle,
    pub distances: DistanceMatrix,
}

/// Analysis knobs shared by every window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub seed: u64,
    pub resolution: f64,
    pub weighting: Weighting,
    pub drop_constant: bool,
    pub histogram_bins: usize,
}

impl From<&RunConfig> for AnalysisOptions {
    fn from(c: &RunConfig) -> Self {
        Self {
            seed: c.seed,
            resolution: c.resolution,
            weighting: Weighting::from_flag(c.weighted),
            drop_constant: c.drop_constant,
            histogram_bins: c.histogram_bins,
        }
    }
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            resolution: 1.0,
            weighting: Weighting::Strength,
            drop_constant: false,
            histogram_bins: crate::config::DEFAULT_HISTOGRAM_BINS,
        }
    }
}

/// Runs the in-memory analysis of one window (no files written).
pub fn analyze_window(
    table: &PriceTable,
    window: &WindowSpec,
    opts: &AnalysisOptions,
) -> Result<WindowOutput> {
    let sliced = slice_window(table, window)?;
    let mut returns = log_returns(&sliced.table)?.with_window(window.clone());
    let mut dropped_constant = Vec::new();
    if opts.drop_constant {
        let (kept, dropped) = returns.drop_constant_columns()?;
        returns = kept;
        dropped_constant = dropped;
    }
    let distances = DistanceMatrix::from_returns(&returns)?;
    let tickers = distances.tickers().to_vec();
    let sector_partition = sectors_to_partition(&sliced.table, &tickers)?;
    let sectors: Vec<String> = tickers
        .iter()
        .map(|t| sliced.table.sector_of(t).unwrap_or_default().to_string())
        .collect();

    if tickers.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "window {} keeps fewer than 2 tickers",
            window.label
        )));
    }
    let summary = distance_summary(&distances, opts.histogram_bins)?
        .with_groups(&distances, sector_partition.labels())?;

    let tree = build_mst(&distances)?;
    let (detected, q) = louvain(&tree, opts.resolution, opts.seed, opts.weighting)?;
    let metrics = MetricsReport::compute(&tree, q, &sector_partition, &detected)?;

    let stats = degree_stats(&tree);
    let hub_index = (0..tree.n())
        .max_by(|&a, &b| stats.degrees[a].cmp(&stats.degrees[b]).then(b.cmp(&a)))
        .expect("tree has nodes");
    let degree_values: Vec<f64> = stats.degrees.iter().map(|&d| d as f64).collect();
    let top_degree = top_fraction_by(&degree_values, TOP_FRACTION)?;

    let caps_kept = subset_table(&sliced.table, &tickers);
    let (top_cap_link_share, sector_caps) = match caps_kept.as_ref() {
        Some(t) if t.market_caps().is_some() => {
            let avgs = ticker_cap_averages(t)?;
            let values: Vec<f64> = avgs
                .iter()
                .map(|v| v.unwrap_or(f64::NEG_INFINITY))
                .collect();
            let top = top_fraction_by(&values, TOP_FRACTION)?;
            let share = link_share(&tree, &top)?;
            let sector_caps = sector_cap_averages(t, window).ok();
            (Some(share), sector_caps)
        }
        _ => (None, None),
    };

    let concentration = Concentration {
        hub: Hub {
            ticker: tickers[hub_index].clone(),
            degree: stats.degrees[hub_index],
            link_share: link_share(&tree, &[hub_index])?,
        },
        top_degree_link_share: link_share(&tree, &top_degree)?,
        top_cap_link_share,
    };

    let bundle = WindowBundle {
        label: window.label.clone(),
        start: window.start,
        end: window.end,
        weighting: opts.weighting,
        resolution: opts.resolution,
        seed: opts.seed,
        n_returns: returns.n_periods(),
        dropped_missing: sliced.dropped,
        dropped_constant,
        sectors,
        tree,
        detected,
        sector_partition,
        metrics,
        distance_summary: summary,
        concentration,
        sector_cap_averages: sector_caps,
    };
    Ok(WindowOutput { bundle, distances })
}

/// `table` restricted to `tickers` (which must be a subset), or `None` when
/// nothing changes.
fn subset_table(table: &PriceTable, tickers: &[String]) -> Option<PriceTable> {
    if table.tickers() == tickers {
        return Some(table.clone());
    }
    let idx: Vec<usize> = tickers
        .iter()
        .filter_map(|t| table.ticker_index(t))
        .collect();
    let pick = |p: &crate::ingest::Panel| -> crate::ingest::Panel {
        p.iter()
            .map(|row| idx.iter().map(|&i| row[i]).collect())
            .collect()
    };
    PriceTable::new(
        table.dates().to_vec(),
        tickers.to_vec(),
        pick(table.prices()),
        idx.iter().map(|&i| table.sectors()[i].clone()).collect(),
        table.market_caps().map(pick),
    )
    .ok()
}

/// Writes one window's artifacts into `dir` for every requested format.
pub fn write_window(
    output: &WindowOutput,
    dir: &Path,
    formats: &std::collections::BTreeSet<Format>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let b = &output.bundle;
    let view = TreeView::new(&b.tree, &b.detected, &b.sectors)?;
    for &format in formats {
        match format {
            Format::Graphml => export::export_graph(&view, format, &dir.join("mst.graphml"))?,
            Format::Dot => export::export_graph(&view, format, &dir.join("mst.dot"))?,
            Format::Json => {
                write_file(
                    &dir.join("bundle.json"),
                    export::to_json_string(b)?.as_bytes(),
                )?;
                write_file(
                    &dir.join("metrics.json"),
                    export::to_json_string(&b.metrics)?.as_bytes(),
                )?;
                export::export_graph(&view, format, &dir.join("mst.json"))?;
            }
            Format::Csv => {
                export::export_graph(&view, format, &dir.join("mst_edges.csv"))?;
                write_file(
                    &dir.join("communities.csv"),
                    export::partition_csv(b.tickers(), &b.detected).as_bytes(),
                )?;
                write_file(
                    &dir.join("sector_partition.csv"),
                    export::partition_csv(b.tickers(), &b.sector_partition).as_bytes(),
                )?;
                export::write_distance_csv(&output.distances, &dir.join("distance.csv"))?;
                export::write_correlation_csv(&output.distances, &dir.join("correlation.csv"))?;
                write_file(
                    &dir.join("distance_histogram.csv"),
                    histogram_csv(&b.distance_summary).as_bytes(),
                )?;
            }
        }
    }
    Ok(())
}

fn histogram_csv(s: &DistanceSummary) -> String {
    let mut out = String::from("lower,upper,count\n");
    for bin in &s.histogram {
        let _ = writeln!(out, "{},{},{}", bin.lower, bin.upper, bin.count);
    }
    out
}

/// `label,d,C,Q,sigma,mk`, one row per window.
pub fn table1_csv(bundles: &[&WindowBundle]) -> String {
    let mut s = String::from("label,d,C,Q,sigma,mk\n");
    for b in bundles {
        let m = &b.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            export::csv_field(&b.label),
            m.diameter,
            m.char_path_length,
            m.modularity,
            m.sigma,
            m.max_degree
        );
    }
    s
}

/// Result of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub windows: Vec<WindowOutput>,
    pub ignored_sector_entries: usize,
    pub table1_path: PathBuf,
}

/// Loads the inputs, analyses every window (concurrently) and writes all
/// artifacts. A failing window's directory is removed and the error carries
/// its label.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let loaded = load_price_table(
        &config.prices_path,
        &config.sectors_path,
        config.caps_path.as_deref(),
    )?;
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let opts = AnalysisOptions::from(config);

    let results: Vec<Result<WindowOutput>> = config
        .windows
        .par_iter()
        .map(|w| {
            let dir = config.output_dir.join(&w.label);
            analyze_window(&loaded.table, w, &opts)
                .and_then(|out| write_window(&out, &dir, &config.formats).map(|_| out))
                .map_err(|e| {
                    let _ = fs::remove_dir_all(&dir);
                    e.in_window(&w.label)
                })
        })
        .collect();
    let windows = results.into_iter().collect::<Result<Vec<_>>>()?;

    let table1_path = config.output_dir.join("table1.csv");
    let bundles: Vec<&WindowBundle> = windows.iter().map(|w| &w.bundle).collect();
    write_file(&table1_path, table1_csv(&bundles).as_bytes())?;
    Ok(RunOutcome {
        windows,
        ignored_sector_entries: loaded.ignored_sector_entries,
        table1_path,
    })
}
