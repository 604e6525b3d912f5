//! Log returns, Pearson correlation and the correlation distance
//! `d = sqrt(2 (1 - rho))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{PriceTable, WindowSpec};

/// Dense symmetric-friendly n x n matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "row of length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Entries above the diagonal, row by row.
    pub fn upper_triangle(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| self.get(i, j)))
    }

    fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// One-day log returns, stored column-wise (one column per ticker).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsMatrix {
    tickers: Vec<String>,
    columns: Vec<Vec<f64>>,
    source_window: Option<WindowSpec>,
}

impl ReturnsMatrix {
    pub fn from_columns(tickers: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if tickers.len() != columns.len() {
            return Err(Error::InvalidParameter(format!(
                "{} tickers for {} return columns",
                tickers.len(),
                columns.len()
            )));
        }
        let len = columns[0].len();
        if len < 2 {
            return Err(Error::TooFewRows(len + 1));
        }
        for (t, c) in tickers.iter().zip(&columns) {
            if c.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "column {t} has {} returns, expected {len}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite return for {t}"
                )));
            }
        }
        Ok(Self {
            tickers,
            columns,
            source_window: None,
        })
    }

    pub fn with_window(mut self, window: WindowSpec) -> Self {
        self.source_window = Some(window);
        self
    }

    pub fn source_window(&self) -> Option<&WindowSpec> {
        self.source_window.as_ref()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    /// Number of return periods (T - 1).
    pub fn n_periods(&self) -> usize {
        self.columns[0].len()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn value(&self, t: usize, i: usize) -> f64 {
        self.columns[i][t]
    }

    /// Removes zero-variance columns, returning the dropped tickers.
    pub fn drop_constant_columns(self) -> Result<(ReturnsMatrix, Vec<String>)> {
        let mut tickers = Vec::new();
        let mut columns = Vec::new();
        let mut dropped = Vec::new();
        for (t, c) in self.tickers.into_iter().zip(self.columns) {
            if centered(&c).1 == 0.0 {
                dropped.push(t);
            } else {
                tickers.push(t);
                columns.push(c);
            }
        }
        if tickers.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        Ok((
            ReturnsMatrix {
                tickers,
                columns,
                source_window: self.source_window,
            },
            dropped,
        ))
    }
}

/// `r[t][i] = ln(p[t+1][i] / p[t][i])` for every ticker.
pub fn log_returns(table: &PriceTable) -> Result<ReturnsMatrix> {
    let t_len = table.n_dates();
    let mut columns = Vec::with_capacity(table.n_tickers());
    for (i, ticker) in table.tickers().iter().enumerate() {
        let mut prices = Vec::with_capacity(t_len);
        for t in 0..t_len {
            prices.push(table.price(t, i).ok_or_else(|| Error::MissingPrice {
                ticker: ticker.clone(),
                date: table.dates()[t].to_string(),
            })?);
        }
        columns.push(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect());
    }
    ReturnsMatrix::from_columns(table.tickers().to_vec(), columns)
}

fn centered(column: &[f64]) -> (Vec<f64>, f64) {
    let mean = column.iter().sum::<f64>() / column.len() as f64;
    let c: Vec<f64> = column.iter().map(|v| v - mean).collect();
    let ss = c.iter().map(|v| v * v).sum();
    (c, ss)
}

/// Pearson correlation matrix of the return columns.
///
/// Entries are clamped to [-1, 1] and the diagonal is exactly 1. Each pair is
/// reduced sequentially over time, so the result does not depend on the
/// number of worker threads.
pub fn pearson(returns: &ReturnsMatrix) -> Result<SquareMatrix> {
    let n = returns.n_tickers();
    let prepared: Vec<(Vec<f64>, f64)> = returns.columns.iter().map(|c| centered(c)).collect();
    if let Some(i) = prepared.iter().position(|(_, ss)| *ss == 0.0) {
        return Err(Error::ZeroVariance(returns.tickers[i].clone()));
    }
    let norms: Vec<f64> = prepared.iter().map(|(_, ss)| ss.sqrt()).collect();

    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &prepared[i].0;
            ((i + 1)..n)
                .map(|j| {
                    let xj = &prepared[j].0;
                    let dot: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
                    (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();

    let mut rho = SquareMatrix::zeros(n);
    for (i, row) in upper.iter().enumerate() {
        rho.set(i, i, 1.0);
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            rho.set(i, j, v);
            rho.set(j, i, v);
        }
    }
    Ok(rho)
}

/// `sqrt(2 (1 - rho))`, mapping [-1, 1] onto [0, 2].
#[inline]
pub fn mantegna_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).sqrt()
}

/// Correlations and distances over a common ticker order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    tickers: Vec<String>,
    rho: SquareMatrix,
    dist: SquareMatrix,
}

impl DistanceMatrix {
    pub fn from_returns(returns: &ReturnsMatrix) -> Result<Self> {
        Self::from_correlation(returns.tickers().to_vec(), pearson(returns)?)
    }

    /// Fills distances from a correlation matrix.
    pub fn from_correlation(tickers: Vec<String>, mut rho: SquareMatrix) -> Result<Self> {
        let n = rho.n();
        check_shape(&tickers, n)?;
        if !rho.is_symmetric() {
            return Err(Error::InvalidParameter(
                "correlation matrix is not symmetric".into(),
            ));
        }
        if rho.data.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "correlation outside [-1, 1]".into(),
            ));
        }
        let mut dist = SquareMatrix::zeros(n);
        for i in 0..n {
            rho.set(i, i, 1.0);
            for j in 0..n {
                if i != j {
                    dist.set(i, j, mantegna_distance(rho.get(i, j)));
                }
            }
        }
        Ok(Self { tickers, rho, dist })
    }

    /// Builds from a distance matrix directly (symmetric, zero diagonal,
    /// entries in [0, 2]); correlations are recovered as `1 - d^2 / 2`.
    pub fn from_distances(tickers: Vec<String>, dist: SquareMatrix) -> Result<Self> {
        let n = dist.n();
        check_shape(&tickers, n)?;
        if !dist.is_symmetric() {
            return Err(Error::InvalidParameter(
                "distance matrix is not symmetric".into(),
            ));
        }
        let mut rho = SquareMatrix::zeros(n);
        for i in 0..n {
            if dist.get(i, i) != 0.0 {
                return Err(Error::InvalidParameter(
                    "distance diagonal must be 0".into(),
                ));
            }
            for j in 0..n {
                let d = dist.get(i, j);
                if !(0.0..=2.0).contains(&d) {
                    return Err(Error::InvalidParameter(format!(
                        "distance {d} outside [0, 2]"
                    )));
                }
                rho.set(i, j, (1.0 - d * d / 2.0).clamp(-1.0, 1.0));
            }
        }
        Ok(Self { tickers, rho, dist })
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn rho(&self) -> &SquareMatrix {
        &self.rho
    }

    pub fn dist(&self) -> &SquareMatrix {
        &self.dist
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    #[inline]
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.rho.get(i, j)
    }
}

fn check_shape(tickers: &[String], n: usize) -> Result<()> {
    if tickers.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} tickers for a {n}x{n} matrix",
            tickers.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Distribution of the off-diagonal distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub pairs: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
    pub histogram: Vec<HistogramBin>,
    /// Mean distance over pairs sharing a group label (see [`DistanceSummary::with_groups`]).
    pub intra_group_mean: Option<f64>,
    pub cross_group_mean: Option<f64>,
}

/// Histogram over `bins` equal-width bins of [0, 2] plus min/median/mean/max
/// of the n(n-1)/2 upper-triangle distances. The median of an even count is
/// the mean of the two middle values.
pub fn distance_summary(dm: &DistanceMatrix, bins: usize) -> Result<DistanceSummary> {
    if dm.n() < 2 {
        return Err(Error::InvalidParameter(
            "distance summary needs n >= 2".into(),
        ));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter(
            "histogram needs at least one bin".into(),
        ));
    }
    let mut values: Vec<f64> = dm.dist.upper_triangle().collect();
    let pairs = values.len();
    let mean = values.iter().sum::<f64>() / pairs as f64;

    let width = 2.0 / bins as f64;
    let mut histogram: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lower: b as f64 * width,
            upper: if b + 1 == bins {
                2.0
            } else {
                (b + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for &v in &values {
        let b = ((v / width) as usize).min(bins - 1);
        histogram[b].count += 1;
    }

    values.sort_by(f64::total_cmp);
    let median = if pairs % 2 == 1 {
        values[pairs / 2]
    } else {
        (values[pairs / 2 - 1] + values[pairs / 2]) / 2.0
    };
    Ok(DistanceSummary {
        pairs,
        min: values[0],
        median,
        mean,
        max: values[pairs - 1],
        histogram,
        intra_group_mean: None,
        cross_group_mean: None,
    })
}

impl DistanceSummary {
    /// Adds intra- and cross-group mean distances for the node labels `groups`
    /// (e.g. sector ids). A mean is `None` when it has no pairs.
    pub fn with_groups(mut self, dm: &DistanceMatrix, groups: &[usize]) -> Result<Self> {
        if groups.len() != dm.n() {
            return Err(Error::PartitionSizeMismatch {
                expected: dm.n(),
                got: groups.len(),
            });
        }
        let (mut intra, mut n_intra, mut cross, mut n_cross) = (0.0, 0usize, 0.0, 0usize);
        for i in 0..dm.n() {
            for j in (i + 1)..dm.n() {
                if groups[i] == groups[j] {
                    intra += dm.distance(i, j);
                    n_intra += 1;
                } else {
                    cross += dm.distance(i, j);
                    n_cross += 1;
                }
            }
        }
        self.intra_group_mean = (n_intra > 0).then(|| intra / n_intra as f64);
        self.cross_group_mean = (n_cross > 0).then(|| cross / n_cross as f64);
        Ok(self)
    }
}
