// SPDX-License-Identifier: Apache-2.0

//! Per-realization CSV rows.
//!
//! Columns, in order: see [`COLUMNS`]. Floats are written with 17
//! significant digits (`1.0000000000000000e2`), `inf` for an infinite
//! dividend, and an empty field for a missing `mean_abs_o`. Lines end in
//! `\n`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::{SimulationConfig, TrajectoryDetail};
use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::phase::{temperature_with, PhaseLabel, TemperatureDefinition};

/// Version of the row layout, written in every row.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 19] = [
    "schema_version",
    "run",
    "N",
    "m",
    "s",
    "lambda",
    "d",
    "P_f",
    "max_steps",
    "fundamental",
    "early_stop",
    "burn_in",
    "trajectory",
    "seed",
    "temperature",
    "label",
    "stop_step",
    "final_price",
    "mean_abs_o",
];

/// One realization with the configuration it ran under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub schema_version: u32,
    pub run: u64,
    pub config: SimulationConfig,
    pub seed: u64,
    pub temperature: f64,
    pub label: PhaseLabel,
    pub stop_step: u64,
    pub final_price: f64,
    pub mean_abs_o: Option<f64>,
}

impl RunRow {
    pub fn new(run: u64, config: &SimulationConfig, result: &RunResult, definition: TemperatureDefinition) -> Self {
        RunRow {
            schema_version: CSV_SCHEMA_VERSION,
            run,
            config: config.clone(),
            seed: result.seed,
            temperature: temperature_with(config.memory, config.n_agents, config.strategies, definition).value(),
            label: result.label,
            stop_step: result.stop_step,
            final_price: result.final_price,
            mean_abs_o: result.mean_abs_o(),
        }
    }

    fn record(&self) -> [String; 19] {
        let c = &self.config;
        let switch = |b: bool| if b { "on" } else { "off" }.to_string();
        [
            self.schema_version.to_string(),
            self.run.to_string(),
            c.n_agents.to_string(),
            c.memory.to_string(),
            c.strategies.to_string(),
            format_float(c.liquidity),
            format_float(c.dividend),
            format_float(c.fundamental_price),
            c.max_steps.to_string(),
            switch(c.fundamental),
            switch(c.early_stop),
            c.burn_in.to_string(),
            c.trajectory_detail.as_str().to_string(),
            self.seed.to_string(),
            format_float(self.temperature),
            self.label.as_str().to_string(),
            self.stop_step.to_string(),
            format_float(self.final_price),
            self.mean_abs_o.map(format_float).unwrap_or_default(),
        ]
    }

    fn from_record(record: &csv::StringRecord, line: u64) -> Result<Self> {
        let bad = |col: &str, v: &str| Error::Format(format!("line {line}: bad `{col}` value `{v}`"));
        if record.len() != COLUMNS.len() {
            return Err(Error::Format(format!(
                "line {line}: expected {} fields, got {}",
                COLUMNS.len(),
                record.len()
            )));
        }
        let get = |k: usize| &record[k];
        fn num<T: std::str::FromStr>(v: &str, err: impl FnOnce() -> Error) -> Result<T> {
            v.parse().map_err(|_| err())
        }
        macro_rules! field {
            ($k:expr) => {
                num(get($k), || bad(COLUMNS[$k], get($k)))?
            };
        }
        let switch = |k: usize| match get(k) {
            "on" => Ok(true),
            "off" => Ok(false),
            v => Err(bad(COLUMNS[k], v)),
        };
        let schema_version: u32 = field!(0);
        if schema_version != CSV_SCHEMA_VERSION {
            return Err(Error::Format(format!("line {line}: unsupported schema version {schema_version}")));
        }
        let trajectory_detail = match get(12) {
            "full" => TrajectoryDetail::Full,
            "summary" => TrajectoryDetail::Summary,
            v => return Err(bad(COLUMNS[12], v)),
        };
        let config = SimulationConfig {
            n_agents: field!(2),
            memory: field!(3),
            strategies: field!(4),
            liquidity: field!(5),
            dividend: field!(6),
            fundamental_price: field!(7),
            max_steps: field!(8),
            fundamental: switch(9)?,
            early_stop: switch(10)?,
            burn_in: field!(11),
            trajectory_detail,
        };
        Ok(RunRow {
            schema_version,
            run: field!(1),
            config,
            seed: field!(13),
            temperature: field!(14),
            label: get(15).parse().map_err(|_| bad(COLUMNS[15], get(15)))?,
            stop_step: field!(16),
            final_price: field!(17),
            mean_abs_o: match get(18) {
                "" => None,
                v => Some(num(v, || bad(COLUMNS[18], v))?),
            },
        })
    }
}

/// 17 significant digits in scientific notation; `inf`, `-inf`, `NaN` for
/// the non-finite values. Parsing the text gives back the same `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn write_csv<W: Write>(rows: &[RunRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let wrap = |e: csv::Error| Error::io("writing CSV", e);
    w.write_record(COLUMNS).map_err(wrap)?;
    for row in rows {
        w.write_record(row.record()).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("writing CSV", e))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = r.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Format("CSV header does not match the run-row columns".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        rows.push(RunRow::from_record(&rec, k as u64 + 2)?);
    }
    Ok(rows)
}
