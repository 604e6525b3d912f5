//! Price panel loading, validation and windowing.
//!
//! Three CSV inputs feed a [`PriceTable`]:
//!
//! - prices (wide): `date,TICKER1,TICKER2,...` with `YYYY-MM-DD` rows, empty cell = missing
//! - sectors: `ticker,sector`
//! - market caps (optional): same wide shape as prices
//!
//! The price file defines the trading calendar. Missing prices are never
//! imputed; [`slice_window`] drops any ticker with a gap inside the window.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DATE_FORMAT: &str = "%Y-%m-%d";

/// A T x n matrix of optional values, stored row-major by date.
pub type Panel = Vec<Vec<Option<f64>>>;

/// Aligned dates x tickers price matrix with sector labels and optional market caps.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    prices: Panel,
    sectors: Vec<String>,
    market_caps: Option<Panel>,
}

impl PriceTable {
    /// Builds a table, checking every invariant.
    ///
    /// `prices[t][i]` is the price of `tickers[i]` on `dates[t]`; `sectors[i]`
    /// labels `tickers[i]`. Missing cells are `None`.
    pub fn new(
        dates: Vec<NaiveDate>,
        tickers: Vec<String>,
        prices: Panel,
        sectors: Vec<String>,
        market_caps: Option<Panel>,
    ) -> Result<Self> {
        if tickers.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut seen = HashSet::with_capacity(tickers.len());
        for t in &tickers {
            if !seen.insert(t.as_str()) {
                return Err(Error::DuplicateTicker(t.clone()));
            }
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "dates must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if dates.len() < 3 {
            return Err(Error::TooFewRows(dates.len()));
        }
        if sectors.len() < tickers.len() {
            return Err(Error::MissingSector(tickers[sectors.len()].clone()));
        }
        if sectors.len() > tickers.len() {
            return Err(Error::InvalidParameter(format!(
                "{} sector labels for {} tickers",
                sectors.len(),
                tickers.len()
            )));
        }
        check_panel(&dates, &tickers, &prices, |ticker, date, value| {
            Error::NonPositivePrice {
                ticker,
                date,
                value,
            }
        })?;
        if let Some(caps) = &market_caps {
            check_panel(&dates, &tickers, caps, |ticker, date, value| {
                Error::NonPositiveCap {
                    ticker,
                    date,
                    value,
                }
            })?;
        }
        Ok(Self {
            dates,
            tickers,
            prices,
            sectors,
            market_caps,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn prices(&self) -> &Panel {
        &self.prices
    }

    pub fn market_caps(&self) -> Option<&Panel> {
        self.market_caps.as_ref()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    pub fn price(&self, t: usize, i: usize) -> Option<f64> {
        self.prices[t][i]
    }

    pub fn ticker_index(&self, ticker: &str) -> Option<usize> {
        self.tickers.iter().position(|t| t == ticker)
    }

    pub fn sector_of(&self, ticker: &str) -> Option<&str> {
        self.ticker_index(ticker).map(|i| self.sectors[i].as_str())
    }

    /// First and last trading day.
    pub fn date_range(&self) -> (NaiveDate, NaiveDate) {
        (self.dates[0], self.dates[self.dates.len() - 1])
    }
}

fn check_panel(
    dates: &[NaiveDate],
    tickers: &[String],
    panel: &Panel,
    non_positive: impl Fn(String, String, f64) -> Error,
) -> Result<()> {
    if panel.len() != dates.len() {
        return Err(Error::InvalidParameter(format!(
            "panel has {} rows for {} dates",
            panel.len(),
            dates.len()
        )));
    }
    for (row, date) in panel.iter().zip(dates) {
        if row.len() != tickers.len() {
            return Err(Error::InvalidParameter(format!(
                "row {date} has {} cells for {} tickers",
                row.len(),
                tickers.len()
            )));
        }
        for (cell, ticker) in row.iter().zip(tickers) {
            if let Some(v) = *cell {
                if v <= 0.0 || !v.is_finite() {
                    return Err(non_positive(ticker.clone(), date.to_string(), v));
                }
            }
        }
    }
    Ok(())
}

/// An inclusive date window with a free-form label (used as an output directory name).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub label: String,
}

impl WindowSpec {
    pub fn new(start: NaiveDate, end: NaiveDate, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if start > end {
            return Err(Error::InvalidWindow(format!(
                "{label}: start {start} is after end {end}"
            )));
        }
        if label.is_empty() || label.contains(['/', '\\']) || label == "." || label == ".." {
            return Err(Error::InvalidWindow(format!(
                "label {label:?} is not usable as a directory name"
            )));
        }
        Ok(Self { start, end, label })
    }

    /// The window spanning every date of `table`.
    pub fn full_range(table: &PriceTable, label: impl Into<String>) -> Result<Self> {
        let (start, end) = table.date_range();
        Self::new(start, end, label)
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// Parses `START:END:LABEL`, e.g. `2004-01-01:2005-12-31:2004-2005`.
impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let (Some(start), Some(end), Some(label)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::InvalidWindow(format!(
                "{s:?} is not of the form START:END:LABEL"
            )));
        };
        let parse = |v: &str| {
            NaiveDate::parse_from_str(v.trim(), DATE_FORMAT)
                .map_err(|e| Error::InvalidWindow(format!("{v:?}: {e}")))
        };
        Self::new(parse(start)?, parse(end)?, label.trim())
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.label)
    }
}

/// Result of [`load_price_table`].
#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub table: PriceTable,
    /// Tickers listed in the sector file but absent from the price file.
    pub ignored_sector_entries: usize,
}

struct WidePanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    rows: Panel,
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        kind => Error::MalformedCsv {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn read_wide(
    path: &Path,
    non_positive: impl Fn(String, String, f64) -> Error,
) -> Result<WidePanel> {
    let mut reader = open_csv(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 {
        return Err(Error::MalformedCsv {
            path: path.to_path_buf(),
            line: 1,
            message: "expected header date,TICKER1,...".into(),
        });
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut seen = HashSet::new();
    for t in &tickers {
        if t.is_empty() {
            return Err(Error::MalformedCsv {
                path: path.to_path_buf(),
                line: 1,
                message: "empty ticker in header".into(),
            });
        }
        if !seen.insert(t.as_str()) {
            return Err(Error::DuplicateTicker(t.clone()));
        }
    }

    let mut by_date: BTreeMap<NaiveDate, Vec<Option<f64>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let raw_date = &record[0];
        let date =
            NaiveDate::parse_from_str(raw_date, DATE_FORMAT).map_err(|_| Error::DateParse {
                path: path.to_path_buf(),
                line,
                value: raw_date.to_string(),
            })?;
        let mut row = Vec::with_capacity(tickers.len());
        for (cell, ticker) in record.iter().skip(1).zip(&tickers) {
            if cell.is_empty() {
                row.push(None);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::MalformedCsv {
                path: path.to_path_buf(),
                line,
                message: format!("cannot parse {cell:?} for {ticker}"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedCsv {
                    path: path.to_path_buf(),
                    line,
                    message: format!("non-finite value {cell:?} for {ticker}"),
                });
            }
            if v <= 0.0 {
                return Err(non_positive(ticker.clone(), date.to_string(), v));
            }
            row.push(Some(v));
        }
        if by_date.insert(date, row).is_some() {
            return Err(Error::DuplicateCell {
                ticker: tickers[0].clone(),
                date: date.to_string(),
            });
        }
    }

    let (dates, rows) = by_date.into_iter().unzip();
    Ok(WidePanel {
        dates,
        tickers,
        rows,
    })
}

fn read_sectors(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = open_csv(path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != 2 || record[0].is_empty() {
            return Err(Error::MalformedCsv {
                path: path.to_path_buf(),
                line: record.position().map_or(0, |p| p.line()),
                message: "expected ticker,sector".into(),
            });
        }
        if !seen.insert(record[0].to_string()) {
            return Err(Error::DuplicateTicker(record[0].to_string()));
        }
        out.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(out)
}

/// Loads and validates a price panel, its sector map and an optional market-cap panel.
///
/// Tickers in the sector file that do not appear in the price file are
/// ignored and counted in [`LoadedTable::ignored_sector_entries`]. Market caps
/// are aligned to the price calendar and tickers; cap columns or dates outside
/// the price panel are ignored.
pub fn load_price_table(
    prices_path: &Path,
    sectors_path: &Path,
    caps_path: Option<&Path>,
) -> Result<LoadedTable> {
    let prices = read_wide(prices_path, |ticker, date, value| Error::NonPositivePrice {
        ticker,
        date,
        value,
    })?;
    let sector_rows = read_sectors(sectors_path)?;
    let sector_map: HashMap<&str, &str> = sector_rows
        .iter()
        .map(|(t, s)| (t.as_str(), s.as_str()))
        .collect();

    let mut sectors = Vec::with_capacity(prices.tickers.len());
    for ticker in &prices.tickers {
        match sector_map.get(ticker.as_str()) {
            Some(s) => sectors.push(s.to_string()),
            None => return Err(Error::MissingSector(ticker.clone())),
        }
    }
    let price_tickers: HashSet<&str> = prices.tickers.iter().map(String::as_str).collect();
    let ignored_sector_entries = sector_rows
        .iter()
        .filter(|(t, _)| !price_tickers.contains(t.as_str()))
        .count();

    let market_caps = match caps_path {
        None => None,
        Some(path) => {
            let caps = read_wide(path, |ticker, date, value| Error::NonPositiveCap {
                ticker,
                date,
                value,
            })?;
            Some(align_panel(&prices.dates, &prices.tickers, &caps))
        }
    };

    let table = PriceTable::new(
        prices.dates,
        prices.tickers,
        prices.rows,
        sectors,
        market_caps,
    )?;
    Ok(LoadedTable {
        table,
        ignored_sector_entries,
    })
}

fn align_panel(dates: &[NaiveDate], tickers: &[String], src: &WidePanel) -> Panel {
    let col: Vec<Option<usize>> = tickers
        .iter()
        .map(|t| src.tickers.iter().position(|s| s == t))
        .collect();
    let row_of: HashMap<NaiveDate, usize> =
        src.dates.iter().enumerate().map(|(r, d)| (*d, r)).collect();
    dates
        .iter()
        .map(|d| match row_of.get(d) {
            None => vec![None; tickers.len()],
            Some(&r) => col.iter().map(|c| c.and_then(|c| src.rows[r][c])).collect(),
        })
        .collect()
}

/// Result of [`slice_window`].
#[derive(Debug, Clone)]
pub struct SlicedTable {
    pub table: PriceTable,
    /// Tickers excluded because of a missing price inside the window.
    pub dropped: Vec<String>,
}

/// Restricts `table` to the rows with `window.start <= date <= window.end`.
///
/// Tickers with any missing price inside the window are dropped. Market-cap
/// gaps do not cause a drop.
pub fn slice_window(table: &PriceTable, window: &WindowSpec) -> Result<SlicedTable> {
    let rows: Vec<usize> = (0..table.n_dates())
        .filter(|&t| window.contains(table.dates[t]))
        .collect();
    if rows.len() < 3 {
        return Err(Error::TooFewRows(rows.len()));
    }

    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for (i, ticker) in table.tickers.iter().enumerate() {
        if rows.iter().all(|&t| table.prices[t][i].is_some()) {
            keep.push(i);
        } else {
            dropped.push(ticker.clone());
        }
    }
    if keep.is_empty() {
        return Err(Error::AllTickersDropped(window.label.clone()));
    }

    let pick = |panel: &Panel| -> Panel {
        rows.iter()
            .map(|&t| keep.iter().map(|&i| panel[t][i]).collect())
            .collect()
    };
    let sliced = PriceTable {
        dates: rows.iter().map(|&t| table.dates[t]).collect(),
        tickers: keep.iter().map(|&i| table.tickers[i].clone()).collect(),
        prices: pick(&table.prices),
        sectors: keep.iter().map(|&i| table.sectors[i].clone()).collect(),
        market_caps: table.market_caps.as_ref().map(pick),
    };
    Ok(SlicedTable {
        table: sliced,
        dropped,
    })
}

fn write_wide(path: &Path, dates: &[NaiveDate], tickers: &[String], panel: &Panel) -> Result<()> {
    let mut out = String::new();
    out.push_str("date");
    for t in tickers {
        out.push(',');
        out.push_str(&crate::export::csv_field(t));
    }
    out.push('\n');
    for (date, row) in dates.iter().zip(panel) {
        out.push_str(&date.format(DATE_FORMAT).to_string());
        for cell in row {
            out.push(',');
            if let Some(v) = cell {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Writes the price panel in the wide CSV format read by [`load_price_table`].
pub fn write_prices_csv(table: &PriceTable, path: &Path) -> Result<()> {
    write_wide(path, &table.dates, &table.tickers, &table.prices)
}

/// Writes the market-cap panel, if any.
pub fn write_caps_csv(table: &PriceTable, path: &Path) -> Result<()> {
    let caps = table.market_caps.as_ref().ok_or(Error::MissingMarketCaps)?;
    write_wide(path, &table.dates, &table.tickers, caps)
}

pub fn write_sectors_csv(table: &PriceTable, path: &Path) -> Result<()> {
    let mut out = String::from("ticker,sector\n");
    for (t, s) in table.tickers.iter().zip(&table.sectors) {
        out.push_str(&crate::export::csv_field(t));
        out.push(',');
        out.push_str(&crate::export::csv_field(s));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}
