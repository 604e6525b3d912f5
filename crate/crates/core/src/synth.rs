//! Planted-block price panels for self-contained experiments.
//!
//! Daily shocks follow a two-level factor model
//!
//! ```text
//! z_it = sqrt(rho_out) * M_t + sqrt(rho_in - rho_out) * B_{k(i),t} + sqrt(1 - rho_in) * e_it
//! ```
//!
//! with independent standard normal market (`M`), block (`B`) and idiosyncratic
//! (`e`) terms, so stocks in the same block have return correlation `rho_in`
//! and stocks in different blocks `rho_out`. Prices are geometric random
//! walks driven by `volatility * z`. A panel may chain several regimes with
//! different correlation levels.

use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ingest::{write_caps_csv, write_prices_csv, write_sectors_csv, PriceTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    /// Trading days covered by this regime.
    pub days: usize,
    pub rho_in: f64,
    pub rho_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub blocks: usize,
    pub per_block: usize,
    pub regimes: Vec<Regime>,
    pub seed: u64,
    pub start: NaiveDate,
    /// Daily return standard deviation.
    pub volatility: f64,
}

impl SynthSpec {
    /// A single-regime panel of `days` trading days starting 2000-01-03.
    pub fn new(
        blocks: usize,
        per_block: usize,
        days: usize,
        rho_in: f64,
        rho_out: f64,
        seed: u64,
    ) -> Self {
        Self {
            blocks,
            per_block,
            regimes: vec![Regime {
                days,
                rho_in,
                rho_out,
            }],
            seed,
            start: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            volatility: 0.01,
        }
    }

    pub fn with_regimes(mut self, regimes: Vec<Regime>) -> Self {
        self.regimes = regimes;
        self
    }

    pub fn total_days(&self) -> usize {
        self.regimes.iter().map(|r| r.days).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.per_block == 0 {
            return Err(Error::InvalidParameter(
                "blocks and per-block must be positive".into(),
            ));
        }
        if self.total_days() < 3 {
            return Err(Error::TooFewRows(self.total_days()));
        }
        for r in &self.regimes {
            if !(0.0 <= r.rho_out && r.rho_out <= r.rho_in && r.rho_in <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 <= rho-out <= rho-in <= 1, got rho-in {} rho-out {}",
                    r.rho_in, r.rho_out
                )));
            }
        }
        if self.volatility <= 0.0 || !self.volatility.is_finite() {
            return Err(Error::InvalidParameter(
                "volatility must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn ticker_name(block: usize, member: usize) -> String {
    format!("B{block:02}S{member:02}")
}

pub fn block_label(block: usize) -> String {
    format!("block_{block:02}")
}

/// Consecutive weekdays starting at `start` (rolled forward off a weekend).
pub fn trading_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

/// Generates the panel: prices, block-as-sector labels and market caps
/// (constant share count times price).
pub fn generate(spec: &SynthSpec) -> Result<PriceTable> {
    spec.validate()?;
    let n = spec.blocks * spec.per_block;
    let t_len = spec.total_days();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let tickers: Vec<String> = (0..spec.blocks)
        .flat_map(|b| (0..spec.per_block).map(move |m| ticker_name(b, m)))
        .collect();
    let sectors: Vec<String> = (0..n).map(|i| block_label(i / spec.per_block)).collect();
    let shares: Vec<f64> = (0..n).map(|_| rng.random_range(1.0e8..1.0e9)).collect();
    let mut price: Vec<f64> = (0..n).map(|_| rng.random_range(20.0..200.0)).collect();

    let regime_of_day: Vec<Regime> = spec
        .regimes
        .iter()
        .flat_map(|r| std::iter::repeat_n(*r, r.days))
        .collect();

    let mut prices = Vec::with_capacity(t_len);
    let mut caps = Vec::with_capacity(t_len);
    prices.push(price.iter().map(|&p| Some(p)).collect::<Vec<_>>());
    for regime in regime_of_day.iter().skip(1) {
        let a = regime.rho_out.sqrt();
        let b = (regime.rho_in - regime.rho_out).sqrt();
        let c = (1.0 - regime.rho_in).sqrt();
        let market: f64 = rng.sample(StandardNormal);
        let block: Vec<f64> = (0..spec.blocks)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        for (i, p) in price.iter_mut().enumerate() {
            let e: f64 = rng.sample(StandardNormal);
            let z = a * market + b * block[i / spec.per_block] + c * e;
            *p *= (spec.volatility * z).exp();
        }
        prices.push(price.iter().map(|&p| Some(p)).collect());
    }
    for row in &prices {
        caps.push(
            row.iter()
                .zip(&shares)
                .map(|(p, s)| p.map(|p| p * s))
                .collect(),
        );
    }

    PriceTable::new(
        trading_days(spec.start, t_len),
        tickers,
        prices,
        sectors,
        Some(caps),
    )
}

/// Paths written by [`write_panel`].
#[derive(Debug, Clone)]
pub struct PanelFiles {
    pub prices: PathBuf,
    pub sectors: PathBuf,
    pub caps: PathBuf,
}

/// Writes `prices.csv`, `sectors.csv` and `caps.csv` into `dir`.
pub fn write_panel(table: &PriceTable, dir: &Path) -> Result<PanelFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = PanelFiles {
        prices: dir.join("prices.csv"),
        sectors: dir.join("sectors.csv"),
        caps: dir.join("caps.csv"),
    };
    write_prices_csv(table, &files.prices)?;
    write_sectors_csv(table, &files.sectors)?;
    if table.market_caps().is_some() {
        write_caps_csv(table, &files.caps)?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_labels() {
        let t = generate(&SynthSpec::new(3, 4, 10, 0.6, 0.1, 1)).unwrap();
        assert_eq!(t.n_tickers(), 12);
        assert_eq!(t.n_dates(), 10);
        assert_eq!(t.tickers()[5], "B01S01");
        assert_eq!(t.sectors()[5], "block_01");
        assert!(t.market_caps().is_some());
        assert!(t
            .dates()
            .iter()
            .all(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)));
    }

    #[test]
    fn deterministic_per_seed() {
        let s = SynthSpec::new(2, 3, 20, 0.5, 0.0, 9);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = SynthSpec {
            seed: 10,
            ..s.clone()
        };
        assert_ne!(generate(&s).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate(&SynthSpec::new(0, 3, 20, 0.5, 0.0, 0)).is_err());
        assert!(generate(&SynthSpec::new(2, 3, 2, 0.5, 0.0, 0)).is_err());
        assert!(generate(&SynthSpec::new(2, 3, 20, 0.2, 0.5, 0)).is_err());
        assert!(generate(&SynthSpec::new(2, 3, 20, 1.5, 0.0, 0)).is_err());
    }
}
