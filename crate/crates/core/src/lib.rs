// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis of the $-Game, an agent-based market model in
//! which technical traders are rewarded for predicting the next aggregate
//! order imbalance, and fundamental traders pull the price back towards its
//! fundamental value.
//!
//! - [`engine`]: strategies, agents and the step dynamics.
//! - [`phase`]: temperature ratio and speculative/fundamental labels.
//! - [`ensemble`]: seeded parallel ensembles, sweeps and crossover estimates.
//! - [`glmodel`]: Ginzburg–Landau free-profit utilities.
//! - [`io`]: config documents, CSV/JSON and SVG output.

pub mod config;
pub mod engine;
pub mod ensemble;
mod error;
pub mod glmodel;
pub mod io;
pub mod phase;

pub use config::{SimulationConfig, TrajectoryDetail};
pub use error::{Error, Result};

// The guide in `book/` and the README are compiled here so its examples run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/game.md")]
    mod game {}
    #[doc = include_str!("../../../book/src/phases.md")]
    mod phases {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/landau.md")]
    mod landau {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
