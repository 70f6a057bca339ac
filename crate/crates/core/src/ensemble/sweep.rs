// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::seed::run_seed;
use super::summary::EnsembleSummary;
use super::Executor;
use crate::config::{default_burn_in, default_max_steps, SimulationConfig, TrajectoryDetail, DEFAULT_REALIZATIONS};
use crate::engine::{run_realization, RunResult};
use crate::error::{Error, Result};
use crate::phase::{temperature, Temperature};

/// A cartesian grid over `(N, m, s, λ, d)` with shared run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n_agents: Vec<u32>,
    pub memory: Vec<u32>,
    pub strategies: Vec<u32>,
    pub liquidity: Vec<f64>,
    #[serde(with = "crate::io::float_vec_repr")]
    pub dividend: Vec<f64>,
    pub fundamental_price: f64,
    /// Per-run step cap; `None` means `200·2^m` for each cell's `m`.
    pub max_steps: Option<u64>,
    /// `None` means `2^m` for each cell's `m`.
    pub burn_in: Option<u64>,
    pub fundamental: bool,
    pub early_stop: bool,
    pub realizations: usize,
    pub master_seed: u64,
}

impl SweepGrid {
    /// A grid with the default run settings and `R = 200`.
    pub fn new(
        n_agents: Vec<u32>,
        memory: Vec<u32>,
        strategies: Vec<u32>,
        liquidity: Vec<f64>,
        dividend: Vec<f64>,
        fundamental_price: f64,
        master_seed: u64,
    ) -> Self {
        SweepGrid {
            n_agents,
            memory,
            strategies,
            liquidity,
            dividend,
            fundamental_price,
            max_steps: None,
            burn_in: None,
            fundamental: true,
            early_stop: true,
            realizations: DEFAULT_REALIZATIONS,
            master_seed,
        }
    }

    pub fn with_realizations(mut self, r: usize) -> Self {
        self.realizations = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("N", self.n_agents.is_empty()),
            ("m", self.memory.is_empty()),
            ("s", self.strategies.is_empty()),
            ("lambda", self.liquidity.is_empty()),
            ("d", self.dividend.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::parameter(name, "grid axis has no values"));
        }
        if self.realizations == 0 {
            return Err(Error::parameter("R", "need at least one realization"));
        }
        Ok(())
    }

    /// The cells in order of `(m, N, s, λ, d)`, each axis ascending.
    /// Repeated axis values are dropped.
    pub fn cells(&self) -> Vec<SimulationConfig> {
        fn axis<T: Copy + PartialOrd>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            v.dedup_by(|a, b| a == b);
            v
        }
        let mut out = Vec::new();
        for &m in &axis(&self.memory) {
            for &n in &axis(&self.n_agents) {
                for &s in &axis(&self.strategies) {
                    for &lambda in &axis(&self.liquidity) {
                        for &d in &axis(&self.dividend) {
                            let mut c = SimulationConfig::new(n, m, s, lambda, d, self.fundamental_price)
                                .with_fundamental(self.fundamental)
                                .with_early_stop(self.early_stop)
                                .with_detail(TrajectoryDetail::Summary);
                            c.max_steps = self.max_steps.unwrap_or_else(|| default_max_steps(m));
                            c.burn_in = self.burn_in.unwrap_or_else(|| default_burn_in(m));
                            out.push(c);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of one grid cell. Exactly one of `summary` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub config: SimulationConfig,
    pub temperature: Temperature,
    pub summary: Option<EnsembleSummary>,
    pub error: Option<String>,
}

/// [`sweep_with`] on a pool with one worker per core.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<CellResult>> {
    sweep_with(grid, &Executor::new(0)?)
}

/// Runs every cell of `grid`. Cells whose parameters are invalid are
/// reported through [`CellResult::error`]; all realizations of all valid
/// cells share the worker pool.
pub fn sweep_with(grid: &SweepGrid, executor: &Executor) -> Result<Vec<CellResult>> {
    Ok(sweep_runs_with(grid, executor)?.into_iter().map(|(cell, _)| cell).collect())
}

/// [`sweep_with`], also returning each cell's realizations in run order.
pub fn sweep_runs_with(grid: &SweepGrid, executor: &Executor) -> Result<Vec<(CellResult, Vec<RunResult>)>> {
    grid.validate()?;
    let cells = grid.cells();
    let r = grid.realizations as u64;
    let valid: Vec<Option<Error>> = cells.iter().map(|c| c.validate().err()).collect();
    let work: Vec<(usize, u64)> = (0..cells.len())
        .filter(|&i| valid[i].is_none())
        .flat_map(|i| (0..r).map(move |k| (i, k)))
        .collect();
    let results = executor.map(&work, |&(i, k)| {
        run_realization(&cells[i], run_seed(grid.master_seed, &cells[i], k))
    });

    let mut results = results.into_iter();
    let mut out = Vec::with_capacity(cells.len());
    for (config, err) in cells.into_iter().zip(valid) {
        let t = temperature(config.memory, config.n_agents, config.strategies);
        if let Some(e) = err {
            out.push((CellResult { config, temperature: t, summary: None, error: Some(e.to_string()) }, Vec::new()));
            continue;
        }
        let chunk: Vec<Result<RunResult>> = results.by_ref().take(r as usize).collect();
        let runs: Result<Vec<RunResult>> = chunk.into_iter().collect();
        match runs {
            Ok(runs) => {
                let summary = EnsembleSummary::from_runs(&config, grid.master_seed, &runs);
                out.push((CellResult { config, temperature: t, summary: Some(summary), error: None }, runs));
            }
            Err(e) => {
                out.push((CellResult { config, temperature: t, summary: None, error: Some(e.to_string()) }, Vec::new()));
            }
        }
    }
    Ok(out)
}
