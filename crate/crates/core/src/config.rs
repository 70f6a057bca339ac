// SPDX-License-Identifier: Apache-2.0

//! Parameters of a single $-Game setup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest memory length accepted. Strategy tables hold `2^m` entries.
pub const MAX_MEMORY: u32 = 20;

/// Realizations per ensemble unless configured otherwise.
pub const DEFAULT_REALIZATIONS: usize = 200;

/// How much of a realization's trajectory is kept in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryDetail {
    /// Keep the full price, imbalance and fundamental-play series.
    Full,
    /// Keep only the per-run statistics.
    #[default]
    Summary,
}

impl TrajectoryDetail {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryDetail::Full => "full",
            TrajectoryDetail::Summary => "summary",
        }
    }
}

/// The five model parameters `(N, m, s, λ, d)` plus the fundamental price and
/// the run-control switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Number of agents.
    pub n_agents: u32,
    /// Memory length in price-direction bits.
    pub memory: u32,
    /// Technical strategies per agent.
    pub strategies: u32,
    /// Liquidity: order imbalance needed for a unit log-return.
    pub liquidity: f64,
    /// Dividend expectation, in price units. May be `+inf`, which switches the
    /// fundamental strategy off.
    #[serde(with = "crate::io::float_repr")]
    pub dividend: f64,
    pub fundamental_price: f64,
    pub max_steps: u64,
    /// Whether agents may play the fundamental strategy at all.
    pub fundamental: bool,
    /// Stop a realization as soon as the speculative trigger fires.
    pub early_stop: bool,
    /// Steps excluded from the fundamental-band test and from `|o|` averages.
    pub burn_in: u64,
    pub trajectory_detail: TrajectoryDetail,
}

impl SimulationConfig {
    /// A config with every optional field at its default: `max_steps = 200·2^m`,
    /// `burn_in = 2^m`, fundamental strategy on, early stop on.
    pub fn new(
        n_agents: u32,
        memory: u32,
        strategies: u32,
        liquidity: f64,
        dividend: f64,
        fundamental_price: f64,
    ) -> Self {
        SimulationConfig {
            n_agents,
            memory,
            strategies,
            liquidity,
            dividend,
            fundamental_price,
            max_steps: default_max_steps(memory),
            fundamental: true,
            early_stop: true,
            burn_in: default_burn_in(memory),
            trajectory_detail: TrajectoryDetail::Summary,
        }
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_fundamental(mut self, on: bool) -> Self {
        self.fundamental = on;
        self
    }

    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    pub fn with_burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_detail(mut self, detail: TrajectoryDetail) -> Self {
        self.trajectory_detail = detail;
        self
    }

    /// Number of distinct histories, `2^m`.
    pub fn history_count(&self) -> usize {
        1usize << self.memory
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 1 {
            return Err(Error::parameter("N", "need at least one agent"));
        }
        validate_memory(self.memory)?;
        if self.strategies < 1 {
            return Err(Error::parameter("s", "need at least one strategy"));
        }
        if !(self.liquidity.is_finite() && self.liquidity > 0.0) {
            return Err(Error::parameter(
                "lambda",
                format!("must be finite and > 0, got {}", self.liquidity),
            ));
        }
        if self.dividend.is_nan() || self.dividend <= 0.0 {
            return Err(Error::parameter(
                "d",
                format!("must be > 0, got {}", self.dividend),
            ));
        }
        if !(self.fundamental_price.is_finite() && self.fundamental_price > 0.0) {
            return Err(Error::parameter(
                "P_f",
                format!("must be finite and > 0, got {}", self.fundamental_price),
            ));
        }
        Ok(())
    }
}

pub(crate) fn validate_memory(memory: u32) -> Result<()> {
    if memory < 1 {
        return Err(Error::parameter("m", "memory length must be >= 1"));
    }
    if memory > MAX_MEMORY {
        return Err(Error::parameter(
            "m",
            format!("memory length {memory} exceeds the table-size cap of {MAX_MEMORY}"),
        ));
    }
    Ok(())
}

/// `200·2^m`, the per-run step cap.
pub fn default_max_steps(memory: u32) -> u64 {
    200u64 << memory.min(MAX_MEMORY + 1)
}

pub fn default_burn_in(memory: u32) -> u64 {
    1u64 << memory.min(MAX_MEMORY + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_memory() {
        let c = SimulationConfig::new(11, 3, 2, 1.0, 100.0, 100.0);
        assert_eq!(c.max_steps, 1600);
        assert_eq!(c.burn_in, 8);
        assert!(c.fundamental && c.early_stop);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let base = SimulationConfig::new(11, 3, 2, 1.0, 100.0, 100.0);
        let bad = [
            SimulationConfig { n_agents: 0, ..base.clone() },
            SimulationConfig { memory: 0, ..base.clone() },
            SimulationConfig { memory: 21, ..base.clone() },
            SimulationConfig { strategies: 0, ..base.clone() },
            SimulationConfig { liquidity: 0.0, ..base.clone() },
            SimulationConfig { liquidity: f64::INFINITY, ..base.clone() },
            SimulationConfig { dividend: -1.0, ..base.clone() },
            SimulationConfig { dividend: f64::NAN, ..base.clone() },
            SimulationConfig { fundamental_price: 0.0, ..base.clone() },
        ];
        for c in bad {
            assert!(c.validate().unwrap_err().is_config_error(), "{c:?}");
        }
        // An infinite dividend is the pure technical limit, and is allowed.
        SimulationConfig { dividend: f64::INFINITY, ..base }.validate().unwrap();
    }
}
