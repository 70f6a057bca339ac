// SPDX-License-Identifier: Apache-2.0

//! Per-cell summary and per-step trajectory CSV tables. Same conventions as
//! the run rows: fixed columns, 17 significant digits, `\n` line ends.

use std::io::Write;

use super::rows::{format_float, CSV_SCHEMA_VERSION};
use crate::engine::Trajectory;
use crate::ensemble::CellResult;
use crate::error::{Error, Result};
use crate::phase::{temperature_with, TemperatureDefinition};

pub const SUMMARY_COLUMNS: [&str; 29] = [
    "schema_version",
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
    "R",
    "master_seed",
    "temperature",
    "f_spec",
    "f_fund",
    "f_undet",
    "f_abort",
    "f_spec_lo",
    "f_spec_hi",
    "f_fund_lo",
    "f_fund_hi",
    "f_undet_lo",
    "f_undet_hi",
    "f_abort_lo",
    "f_abort_hi",
    "mean_abs_o",
    "error",
    "n_runs",
];

pub const TRAJECTORY_COLUMNS: [&str; 4] = ["t", "price", "imbalance", "fundamental_plays"];

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn wrap(e: impl std::fmt::Display) -> Error {
    Error::io("writing CSV", e)
}

/// One line per cell. Failed cells keep their configuration columns and an
/// `error` message; the statistics columns stay empty.
pub fn write_summary_csv<W: Write>(cells: &[CellResult], definition: TemperatureDefinition, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_COLUMNS).map_err(wrap)?;
    for cell in cells {
        let c = &cell.config;
        let switch = |b: bool| if b { "on" } else { "off" }.to_string();
        let t = temperature_with(c.memory, c.n_agents, c.strategies, definition).value();
        let mut rec = vec![
            CSV_SCHEMA_VERSION.to_string(),
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
        ];
        match &cell.summary {
            Some(s) => {
                rec.push(s.realizations.to_string());
                rec.push(s.master_seed.to_string());
                rec.push(format_float(t));
                for f in [s.f_spec, s.f_fund, s.f_undet, s.f_abort] {
                    rec.push(format_float(f));
                }
                let ci = &s.bootstrap_ci;
                for i in [ci.spec, ci.fund, ci.undet, ci.abort] {
                    rec.push(format_float(i.lo));
                    rec.push(format_float(i.hi));
                }
                rec.push(s.mean_abs_o.map(format_float).unwrap_or_default());
                rec.push(String::new());
                rec.push(s.realizations.to_string());
            }
            None => {
                rec.extend([String::new(), String::new(), format_float(t)]);
                rec.extend(std::iter::repeat_n(String::new(), 13));
                rec.push(cell.error.clone().unwrap_or_default());
                rec.push("0".into());
            }
        }
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(wrap)
}

/// Row `0` holds `P(0)`; row `t + 1` holds the price after step `t` with
/// that step's imbalance and fundamental plays.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(TRAJECTORY_COLUMNS).map_err(wrap)?;
    for (t, price) in trajectory.prices.iter().enumerate() {
        let (a, f) = match t.checked_sub(1) {
            Some(k) => (
                trajectory.imbalances[k].to_string(),
                trajectory.fundamental_plays[k].to_string(),
            ),
            None => (String::new(), String::new()),
        };
        w.write_record([t.to_string(), format_float(*price), a, f]).map_err(wrap)?;
    }
    w.flush().map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sweep_with, Executor, SweepGrid};

    #[test]
    fn summary_rows() {
        let mut grid = SweepGrid::new(vec![5], vec![2], vec![2], vec![4.0, -1.0], vec![50.0], 100.0, 3)
            .with_realizations(4);
        grid.max_steps = Some(30);
        let cells = sweep_with(&grid, &Executor::new(1).unwrap()).unwrap();
        let mut out = Vec::new();
        write_summary_csv(&cells, TemperatureDefinition::default(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let recs: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|x| x.len() == SUMMARY_COLUMNS.len()));
        // Cells come in ascending lambda order: the failed one first.
        assert!(recs[0][27].contains("lambda"));
        assert_eq!(&recs[0][28], "0");
        assert_eq!(&recs[1][27], "");
        assert_eq!(&recs[1][11], "4");
    }

    #[test]
    fn trajectory_rows() {
        let t = Trajectory {
            prices: vec![100.0, 110.0],
            imbalances: vec![3],
            fundamental_plays: vec![1],
        };
        let mut out = Vec::new();
        write_trajectory_csv(&t, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "t,price,imbalance,fundamental_plays\n0,1.0000000000000000e2,,\n1,1.1000000000000000e2,3,1\n"
        );
    }
}
