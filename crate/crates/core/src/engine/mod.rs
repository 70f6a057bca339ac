// SPDX-License-Identifier: Apache-2.0

//! The $-Game dynamics.
//!
//! Each period every agent either follows the fundamental strategy (with
//! probability `γ·e^(−γ)`) or plays the recommendation of its best technical
//! strategy at the current history. The order imbalance `A(t)` sets the
//! log-return `A(t)/λ` and the next direction bit, and every technical
//! strategy is credited `a(t−1)·A(t)`, whether it was played or not.

mod agent;
mod history;
mod market;
mod realization;
mod strategy;

pub use agent::{best_strategy_index, Population, TechnicalAgent};
pub use history::{encode_history, ActionBit, HistoryWindow};
pub use market::{
    fundamental_probability, fundamental_signal, order_parameter, step, total_profit, MarketState,
    StepRecord,
};
pub use realization::{run_realization, RunResult, Simulation, Trajectory};
pub use strategy::{generate_strategy, generate_strategy_with_cap, StrategyTable};
