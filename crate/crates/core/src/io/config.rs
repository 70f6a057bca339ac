// SPDX-License-Identifier: Apache-2.0

//! The config document: a flat list of `key: value` lines.
//!
//! ```text
//! version: 1
//! N: 11, 101        # comma lists turn a key into a sweep axis
//! m: 3, 5, 8
//! s: 2
//! lambda: 1
//! d: 100            # `inf` switches the fundamental strategy off
//! P_f: 100
//! ```
//!
//! `#` starts a comment. Keys are case-sensitive and may appear once. The
//! keys `version`, `N`, `m`, `s`, `lambda`, `d` and `P_f` are required; the
//! others are listed in [`OPTIONAL_KEYS`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{SimulationConfig, TrajectoryDetail, DEFAULT_REALIZATIONS, MAX_MEMORY};
use crate::ensemble::SweepGrid;
use crate::error::{Error, Result};
use crate::glmodel::SampleMode;
use crate::phase::TemperatureDefinition;

/// The only document version understood.
pub const CONFIG_VERSION: u32 = 1;

pub const REQUIRED_KEYS: [&str; 7] = ["version", "N", "m", "s", "lambda", "d", "P_f"];

pub const OPTIONAL_KEYS: [&str; 11] = [
    "max_steps",
    "burn_in",
    "fundamental",
    "early_stop",
    "trajectory",
    "R",
    "temperature",
    "heatmap_x",
    "heatmap_y",
    "gl_bins",
    "gl_samples",
];

/// A sweep axis, named as in the config document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    N,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "d")]
    D,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::N, Axis::M, Axis::S, Axis::Lambda, Axis::D];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::N => "N",
            Axis::M => "m",
            Axis::S => "s",
            Axis::Lambda => "lambda",
            Axis::D => "d",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.as_str() == s)
    }

    /// This axis's value in `config`.
    pub fn value(self, config: &SimulationConfig) -> f64 {
        match self {
            Axis::N => config.n_agents as f64,
            Axis::M => config.memory as f64,
            Axis::S => config.strategies as f64,
            Axis::Lambda => config.liquidity,
            Axis::D => config.dividend,
        }
    }
}

/// A parsed and range-checked config document.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub version: u32,
    pub n_agents: Vec<u32>,
    pub memory: Vec<u32>,
    pub strategies: Vec<u32>,
    pub liquidity: Vec<f64>,
    pub dividend: Vec<f64>,
    pub fundamental_price: f64,
    pub max_steps: Option<u64>,
    pub burn_in: Option<u64>,
    pub fundamental: bool,
    pub early_stop: bool,
    pub trajectory: TrajectoryDetail,
    pub realizations: usize,
    pub temperature: TemperatureDefinition,
    pub heatmap_x: Axis,
    pub heatmap_y: Axis,
    pub gl_bins: usize,
    pub gl_samples: SampleMode,
    /// Line of each key, for error messages after parsing.
    lines: BTreeMap<String, usize>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| Error::config(line, format!("expected `key: value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !REQUIRED_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
                return Err(Error::config(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(Error::config(line, format!("key `{key}` has no value")));
            }
            if let Some((first, _)) = entries.get(key) {
                return Err(Error::config(line, format!("key `{key}` repeats line {first}")));
            }
            entries.insert(key.to_string(), (line, value.to_string()));
        }
        for key in REQUIRED_KEYS {
            if !entries.contains_key(key) {
                return Err(Error::config(0, format!("missing required key `{key}`")));
            }
        }
        let reader = Reader { entries: &entries };

        let version: u32 = reader.scalar("version")?;
        if version != CONFIG_VERSION {
            return Err(reader.error("version", format!("unsupported version {version}, expected {CONFIG_VERSION}")));
        }
        let n_agents = reader.list("N", |v: &u32| *v >= 1, "must be >= 1")?;
        let memory = reader.list("m", |v: &u32| (1..=MAX_MEMORY).contains(v), "must be in 1..=20")?;
        let strategies = reader.list("s", |v: &u32| *v >= 1, "must be >= 1")?;
        let liquidity = reader.list("lambda", |v: &f64| v.is_finite() && *v > 0.0, "must be finite and > 0")?;
        let dividend = reader.list("d", |v: &f64| *v > 0.0, "must be > 0 (inf allowed)")?;
        let fundamental_price: f64 = reader.scalar("P_f")?;
        if !(fundamental_price.is_finite() && fundamental_price > 0.0) {
            return Err(reader.error("P_f", "must be finite and > 0"));
        }
        let realizations = reader.optional("R")?.unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(reader.error("R", "must be >= 1"));
        }
        let gl_bins = reader.optional("gl_bins")?.unwrap_or(20);
        if gl_bins < crate::glmodel::MIN_BINS {
            return Err(reader.error("gl_bins", format!("must be >= {}", crate::glmodel::MIN_BINS)));
        }
        let heatmap_x = reader.choice("heatmap_x", Axis::parse)?.unwrap_or(Axis::N);
        let heatmap_y = reader.choice("heatmap_y", Axis::parse)?.unwrap_or(Axis::M);
        if heatmap_x == heatmap_y {
            return Err(reader.error("heatmap_y", "heatmap axes must differ"));
        }

        Ok(ConfigDocument {
            version,
            n_agents,
            memory,
            strategies,
            liquidity,
            dividend,
            fundamental_price,
            max_steps: reader.optional("max_steps")?,
            burn_in: reader.optional("burn_in")?,
            fundamental: reader.choice("fundamental", parse_switch)?.unwrap_or(true),
            early_stop: reader.choice("early_stop", parse_switch)?.unwrap_or(true),
            trajectory: reader
                .choice("trajectory", |s| match s {
                    "full" => Some(TrajectoryDetail::Full),
                    "summary" => Some(TrajectoryDetail::Summary),
                    _ => None,
                })?
                .unwrap_or_default(),
            realizations,
            temperature: reader
                .choice("temperature", |s| match s {
                    "with_fundamental" => Some(TemperatureDefinition::WithFundamental),
                    "technical_only" => Some(TemperatureDefinition::TechnicalOnly),
                    _ => None,
                })?
                .unwrap_or_default(),
            heatmap_x,
            heatmap_y,
            gl_bins,
            gl_samples: reader
                .choice("gl_samples", |s| match s {
                    "per_step" => Some(SampleMode::PerStep),
                    "per_run_mean" => Some(SampleMode::PerRunMean),
                    _ => None,
                })?
                .unwrap_or_default(),
            lines: entries.iter().map(|(k, (l, _))| (k.clone(), *l)).collect(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text)
    }

    /// Whether any axis has more than one value.
    pub fn is_grid(&self) -> bool {
        self.axis_len(Axis::N) > 1
            || self.axis_len(Axis::M) > 1
            || self.axis_len(Axis::S) > 1
            || self.axis_len(Axis::Lambda) > 1
            || self.axis_len(Axis::D) > 1
    }

    pub fn axis_len(&self, axis: Axis) -> usize {
        match axis {
            Axis::N => self.n_agents.len(),
            Axis::M => self.memory.len(),
            Axis::S => self.strategies.len(),
            Axis::Lambda => self.liquidity.len(),
            Axis::D => self.dividend.len(),
        }
    }

    /// The single configuration of a non-grid document, defaults applied.
    pub fn simulation_config(&self) -> Result<SimulationConfig> {
        if let Some(axis) = Axis::ALL.into_iter().find(|&a| self.axis_len(a) > 1) {
            let line = self.lines.get(axis.as_str()).copied().unwrap_or(0);
            return Err(Error::config(line, format!("`{}` lists several values; use a sweep", axis.as_str())));
        }
        let grid = self.sweep_grid(0);
        Ok(grid.cells().remove(0).with_detail(self.trajectory))
    }

    pub fn sweep_grid(&self, master_seed: u64) -> SweepGrid {
        SweepGrid {
            n_agents: self.n_agents.clone(),
            memory: self.memory.clone(),
            strategies: self.strategies.clone(),
            liquidity: self.liquidity.clone(),
            dividend: self.dividend.clone(),
            fundamental_price: self.fundamental_price,
            max_steps: self.max_steps,
            burn_in: self.burn_in,
            fundamental: self.fundamental,
            early_stop: self.early_stop,
            realizations: self.realizations,
            master_seed,
        }
    }
}

/// Reads [`ConfigDocument::parse`] from text.
pub fn parse_config(text: &str) -> Result<ConfigDocument> {
    ConfigDocument::parse(text)
}

fn parse_switch(s: &str) -> Option<bool> {
    match s {
        "on" | "true" => Some(true),
        "off" | "false" => Some(false),
        _ => None,
    }
}

struct Reader<'a> {
    entries: &'a BTreeMap<String, (usize, String)>,
}

impl Reader<'_> {
    fn error(&self, key: &str, message: impl std::fmt::Display) -> Error {
        let line = self.entries.get(key).map(|e| e.0).unwrap_or(0);
        Error::config(line, format!("`{key}` {message}"))
    }

    fn parse_one<T: std::str::FromStr>(&self, key: &str, raw: &str) -> Result<T> {
        raw.trim()
            .parse()
            .map_err(|_| self.error(key, format!("has invalid value `{}`", raw.trim())))
    }

    fn scalar<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (_, raw) = &self.entries[key];
        if raw.contains(',') {
            return Err(self.error(key, "takes a single value"));
        }
        self.parse_one(key, raw)
    }

    fn optional<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.contains_key(key) {
            true => self.scalar(key).map(Some),
            false => Ok(None),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str, ok: impl Fn(&T) -> bool, rule: &str) -> Result<Vec<T>> {
        let (_, raw) = &self.entries[key];
        raw.split(',')
            .map(|item| {
                let v: T = self.parse_one(key, item)?;
                if ok(&v) {
                    Ok(v)
                } else {
                    Err(self.error(key, format!("value `{}` out of range: {rule}", item.trim())))
                }
            })
            .collect()
    }

    fn choice<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((_, raw)) => parse(raw)
                .map(Some)
                .ok_or_else(|| self.error(key, format!("has invalid value `{raw}`"))),
        }
    }
}
