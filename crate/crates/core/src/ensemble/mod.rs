// SPDX-License-Identifier: Apache-2.0

//! Seeded ensembles of realizations, parameter sweeps and crossover
//! estimates.
//!
//! Realization `k` of a cell runs with seed [`run_seed`]`(master_seed,
//! config, k)`. Work is spread over a thread pool and collected in run order,
//! so results do not depend on the number of workers.

mod crossover;
mod seed;
mod summary;
mod sweep;

pub use crossover::{estimate_crossover, estimate_crossover_from};
pub use seed::{cell_key, run_seed, stable_hash};
pub use summary::{EnsembleSummary, FractionIntervals, Interval, BOOTSTRAP_RESAMPLES};
pub use sweep::{sweep, sweep_runs_with, sweep_with, CellResult, SweepGrid};

use rayon::prelude::*;

use crate::config::SimulationConfig;
use crate::engine::{run_realization, RunResult};
use crate::error::{Error, Result};

/// A pool of worker threads.
#[derive(Debug)]
pub struct Executor {
    pool: rayon::ThreadPool,
}

impl Executor {
    /// `workers = 0` uses one thread per available core.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|k| format!("dollar-game-{k}"))
            .build()
            .map_err(|e| Error::io("thread pool", e))?;
        Ok(Executor { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `f` over `items` in parallel and returns the results in input
    /// order.
    pub(crate) fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}

/// Runs `r` realizations of `config` and returns them in run order.
pub fn run_ensemble_runs(
    config: &SimulationConfig,
    r: usize,
    master_seed: u64,
    executor: &Executor,
) -> Result<Vec<RunResult>> {
    config.validate()?;
    let seeds: Vec<u64> = (0..r as u64).map(|k| run_seed(master_seed, config, k)).collect();
    executor
        .map(&seeds, |&seed| run_realization(config, seed))
        .into_iter()
        .collect()
}

/// Runs `r` realizations on a pool with one worker per core and summarizes
/// them.
pub fn run_ensemble(config: &SimulationConfig, r: usize, master_seed: u64) -> Result<EnsembleSummary> {
    run_ensemble_with(config, r, master_seed, &Executor::new(0)?)
}

pub fn run_ensemble_with(
    config: &SimulationConfig,
    r: usize,
    master_seed: u64,
    executor: &Executor,
) -> Result<EnsembleSummary> {
    if r == 0 {
        return Err(Error::parameter("R", "need at least one realization"));
    }
    let runs = run_ensemble_runs(config, r, master_seed, executor)?;
    Ok(EnsembleSummary::from_runs(config, master_seed, &runs))
}
