//! File formats: MST edge lists, partitions, square matrices, GraphML and DOT.
//!
//! Node order is ticker order and edge order is the tree's canonical
//! `(distance, i, j)` order, and floats are written in shortest round-trip
//! form, so repeated exports are byte-identical.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::ingest::write_file;
use crate::mst::WeightedTree;
use crate::returns_corr::{DistanceMatrix, SquareMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Graphml,
    Dot,
    Json,
    Csv,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::Graphml, Format::Dot, Format::Json, Format::Csv];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Graphml => "graphml",
            Format::Dot => "dot",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "graphml" => Ok(Format::Graphml),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!(
                "unknown format {other:?} (expected graphml, dot, json or csv)"
            ))),
        }
    }
}

/// RFC-4180 quoting: fields with `,`, `"`, CR or LF are quoted.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_string(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Everything needed to draw the tree: node attributes ride along with it.
#[derive(Debug, Clone, Copy)]
pub struct TreeView<'a> {
    pub tree: &'a WeightedTree,
    pub detected: &'a Partition,
    /// Sector label per node, in ticker order.
    pub sectors: &'a [String],
}

impl<'a> TreeView<'a> {
    pub fn new(
        tree: &'a WeightedTree,
        detected: &'a Partition,
        sectors: &'a [String],
    ) -> Result<Self> {
        for len in [detected.n_nodes(), sectors.len()] {
            if len != tree.n() {
                return Err(Error::PartitionSizeMismatch {
                    expected: tree.n(),
                    got: len,
                });
            }
        }
        Ok(Self {
            tree,
            detected,
            sectors,
        })
    }

    pub fn to_graphml(&self) -> String {
        let degrees = self.tree.degrees();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n");
        for (id, scope, ty) in [
            ("ticker", "node", "string"),
            ("sector", "node", "string"),
            ("community", "node", "int"),
            ("degree", "node", "int"),
            ("distance", "edge", "double"),
            ("strength", "edge", "double"),
        ] {
            let _ = writeln!(
                s,
                "  <key id=\"{id}\" for=\"{scope}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
            );
        }
        s.push_str("  <graph id=\"mst\" edgedefault=\"undirected\">\n");
        for (k, ticker) in self.tree.tickers().iter().enumerate() {
            let _ = writeln!(
                s,
                "    <node id=\"n{k}\"><data key=\"ticker\">{}</data><data key=\"sector\">{}</data><data key=\"community\">{}</data><data key=\"degree\">{}</data></node>",
                xml_escape(ticker),
                xml_escape(&self.sectors[k]),
                self.detected.community_of(k),
                degrees[k]
            );
        }
        for (k, e) in self.tree.edges().iter().enumerate() {
            let _ = writeln!(
                s,
                "    <edge id=\"e{k}\" source=\"n{}\" target=\"n{}\"><data key=\"distance\">{}</data><data key=\"strength\">{}</data></edge>",
                e.i, e.j, e.distance, e.strength
            );
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }

    pub fn to_dot(&self) -> String {
        let degrees = self.tree.degrees();
        let tickers = self.tree.tickers();
        let mut s = String::from("graph mst {\n");
        for (k, ticker) in tickers.iter().enumerate() {
            let _ = writeln!(
                s,
                "  {} [sector={}, community={}, degree={}];",
                dot_string(ticker),
                dot_string(&self.sectors[k]),
                self.detected.community_of(k),
                degrees[k]
            );
        }
        for e in self.tree.edges() {
            let _ = writeln!(
                s,
                "  {} -- {} [distance={}, strength={}];",
                dot_string(&tickers[e.i]),
                dot_string(&tickers[e.j]),
                e.distance,
                e.strength
            );
        }
        s.push_str("}\n");
        s
    }

    fn graph_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Node<'b> {
            ticker: &'b str,
            sector: &'b str,
            community: usize,
            degree: usize,
        }
        #[derive(Serialize)]
        struct Edge<'b> {
            source: &'b str,
            target: &'b str,
            distance: f64,
            strength: f64,
        }
        #[derive(Serialize)]
        struct Graph<'b> {
            nodes: Vec<Node<'b>>,
            edges: Vec<Edge<'b>>,
        }
        let degrees = self.tree.degrees();
        let tickers = self.tree.tickers();
        let graph = Graph {
            nodes: tickers
                .iter()
                .enumerate()
                .map(|(k, t)| Node {
                    ticker: t,
                    sector: &self.sectors[k],
                    community: self.detected.community_of(k),
                    degree: degrees[k],
                })
                .collect(),
            edges: self
                .tree
                .edges()
                .iter()
                .map(|e| Edge {
                    source: &tickers[e.i],
                    target: &tickers[e.j],
                    distance: e.distance,
                    strength: e.strength,
                })
                .collect(),
        };
        to_json_string(&graph)
    }
}

pub(crate) fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// `ticker_i,ticker_j,distance,strength`, one row per tree edge.
pub fn edge_list_csv(tree: &WeightedTree) -> String {
    let t = tree.tickers();
    let mut s = String::from("ticker_i,ticker_j,distance,strength\n");
    for e in tree.edges() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            csv_field(&t[e.i]),
            csv_field(&t[e.j]),
            e.distance,
            e.strength
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EdgeRecord {
    pub ticker_i: String,
    pub ticker_j: String,
    pub distance: f64,
    pub strength: f64,
}

pub fn read_edge_list(path: &Path) -> Result<Vec<EdgeRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::MalformedCsv {
                path: path.to_path_buf(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Rebuilds a tree over `tickers` from edge-list records.
pub fn tree_from_edge_list(tickers: Vec<String>, records: &[EdgeRecord]) -> Result<WeightedTree> {
    let index = |t: &str| {
        tickers
            .iter()
            .position(|x| x == t)
            .ok_or_else(|| Error::UnknownTicker(t.to_string()))
    };
    let edges = records
        .iter()
        .map(|r| Ok((index(&r.ticker_i)?, index(&r.ticker_j)?, r.distance)))
        .collect::<Result<Vec<_>>>()?;
    WeightedTree::from_edges(tickers, &edges)
}

/// `ticker,community_id`.
pub fn partition_csv(tickers: &[String], partition: &Partition) -> String {
    let mut s = String::from("ticker,community_id\n");
    for (t, c) in tickers.iter().zip(partition.labels()) {
        let _ = writeln!(s, "{},{c}", csv_field(t));
    }
    s
}

/// Square matrix with a ticker header row and a ticker first column.
pub fn square_csv(tickers: &[String], m: &SquareMatrix) -> String {
    let mut s = String::from("ticker");
    for t in tickers {
        s.push(',');
        s.push_str(&csv_field(t));
    }
    s.push('\n');
    for (i, t) in tickers.iter().enumerate() {
        s.push_str(&csv_field(t));
        for v in m.row(i) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_distance_csv(dm: &DistanceMatrix, path: &Path) -> Result<()> {
    write_file(path, square_csv(dm.tickers(), dm.dist()).as_bytes())
}

pub fn write_correlation_csv(dm: &DistanceMatrix, path: &Path) -> Result<()> {
    write_file(path, square_csv(dm.tickers(), dm.rho()).as_bytes())
}

/// Writes the tree in `format` to `path`. JSON here is the node/edge graph
/// document; the pipeline's full per-window bundle is written separately.
pub fn export_graph(view: &TreeView<'_>, format: Format, path: &Path) -> Result<()> {
    let body = match format {
        Format::Graphml => view.to_graphml(),
        Format::Dot => view.to_dot(),
        Format::Csv => edge_list_csv(view.tree),
        Format::Json => view.graph_json()?,
    };
    write_file(path, body.as_bytes())
}
