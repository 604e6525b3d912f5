//! Run configuration: a small TOML file whose keys mirror the CLI flags.
//!
//! ```toml
//! prices = "prices.csv"
//! sectors = "sectors.csv"
//! caps = "caps.csv"              # optional
//! window = ["2004-01-01:2005-12-31:2004-2005", "2007-01-01:2008-12-31:2007-2008"]
//! seed = 0
//! resolution = 1.0
//! weighted = true
//! drop-constant = false
//! output-dir = "out"
//! format = ["graphml", "dot", "json", "csv"]
//! ```
//!
//! Relative paths in the file are resolved against the file's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::Format;
use crate::ingest::WindowSpec;

pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prices_path: PathBuf,
    pub sectors_path: PathBuf,
    pub caps_path: Option<PathBuf>,
    pub windows: Vec<WindowSpec>,
    pub seed: u64,
    pub resolution: f64,
    pub weighted: bool,
    pub drop_constant: bool,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub histogram_bins: usize,
}

impl RunConfig {
    /// Config with defaults: seed 0, resolution 1, weighted, every format.
    pub fn new(
        prices_path: impl Into<PathBuf>,
        sectors_path: impl Into<PathBuf>,
        windows: Vec<WindowSpec>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            prices_path: prices_path.into(),
            sectors_path: sectors_path.into(),
            caps_path: None,
            windows,
            seed: 0,
            resolution: 1.0,
            weighted: true,
            drop_constant: false,
            output_dir: output_dir.into(),
            formats: Format::ALL.into_iter().collect(),
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::Config("at least one window is required".into()));
        }
        let mut labels = BTreeSet::new();
        for w in &self.windows {
            if !labels.insert(w.label.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate window label {:?}",
                    w.label
                )));
            }
        }
        if self.formats.is_empty() {
            return Err(Error::Config(
                "at least one output format is required".into(),
            ));
        }
        if self.resolution <= 0.0 || !self.resolution.is_finite() {
            return Err(Error::Config(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if self.histogram_bins == 0 {
            return Err(Error::Config("histogram-bins must be positive".into()));
        }
        Ok(())
    }

    /// Reads a config file and applies `overrides` on top.
    pub fn load(path: &Path, overrides: ConfigOverrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ConfigFile =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        file.resolve(base).merge(overrides).build()
    }

    /// Builds a config from overrides alone (no file).
    pub fn from_overrides(overrides: ConfigOverrides) -> Result<Self> {
        ConfigFile::default().merge(overrides).build()
    }
}

/// Every key is optional; unset keys fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub prices: Option<PathBuf>,
    pub sectors: Option<PathBuf>,
    pub caps: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window: Vec<String>,
    pub seed: Option<u64>,
    pub resolution: Option<f64>,
    pub weighted: Option<bool>,
    pub drop_constant: Option<bool>,
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub format: Vec<String>,
    pub histogram_bins: Option<usize>,
}

/// CLI flags; `Some` replaces the file value, non-empty lists replace lists.
pub type ConfigOverrides = ConfigFile;

impl ConfigFile {
    fn resolve(mut self, base: &Path) -> Self {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.prices);
        fix(&mut self.sectors);
        fix(&mut self.caps);
        fix(&mut self.output_dir);
        self
    }

    fn merge(self, o: ConfigOverrides) -> Self {
        Self {
            prices: o.prices.or(self.prices),
            sectors: o.sectors.or(self.sectors),
            caps: o.caps.or(self.caps),
            window: if o.window.is_empty() {
                self.window
            } else {
                o.window
            },
            seed: o.seed.or(self.seed),
            resolution: o.resolution.or(self.resolution),
            weighted: o.weighted.or(self.weighted),
            drop_constant: o.drop_constant.or(self.drop_constant),
            output_dir: o.output_dir.or(self.output_dir),
            format: if o.format.is_empty() {
                self.format
            } else {
                o.format
            },
            histogram_bins: o.histogram_bins.or(self.histogram_bins),
        }
    }

    fn build(self) -> Result<RunConfig> {
        let prices = self
            .prices
            .ok_or_else(|| Error::Config("missing `prices`".into()))?;
        let sectors = self
            .sectors
            .ok_or_else(|| Error::Config("missing `sectors`".into()))?;
        let windows = self
            .window
            .iter()
            .map(|w| w.parse())
            .collect::<Result<Vec<WindowSpec>>>()?;
        let mut cfg = RunConfig::new(
            prices,
            sectors,
            windows,
            self.output_dir
                .unwrap_or_else(|| PathBuf::from("mstnet-out")),
        );
        cfg.caps_path = self.caps;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(r) = self.resolution {
            cfg.resolution = r;
        }
        if let Some(w) = self.weighted {
            cfg.weighted = w;
        }
        if let Some(d) = self.drop_constant {
            cfg.drop_constant = d;
        }
        if let Some(b) = self.histogram_bins {
            cfg.histogram_bins = b;
        }
        if !self.format.is_empty() {
            cfg.formats = self
                .format
                .iter()
                .map(|f| f.parse())
                .collect::<Result<BTreeSet<Format>>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serializes as TOML, e.g. for a config written next to a synthetic panel.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}
