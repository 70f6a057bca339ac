// SPDX-License-Identifier: Apache-2.0

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agent::{Gain, Population};
use super::history::HistoryWindow;
use super::market::{step, step_inner, MarketState, StepRecord};
use crate::config::{SimulationConfig, TrajectoryDetail};
use crate::error::Result;
use crate::phase::{in_fundamental_band, PhaseLabel, Trend, TrendTracker};

/// Series kept for [`TrajectoryDetail::Full`]. `prices[0]` is `P(0)`;
/// `prices[k + 1]` is the price after step `k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub prices: Vec<f64>,
    pub imbalances: Vec<i64>,
    pub fundamental_plays: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub label: PhaseLabel,
    /// Direction of the trend that fired the speculative trigger.
    pub trend: Option<Trend>,
    /// Number of steps executed.
    pub stop_step: u64,
    /// Last finite price.
    pub final_price: f64,
    /// `Σ |A(t)|` over steps `t >= burn_in`.
    pub abs_imbalance_sum: u64,
    /// Number of steps `t >= burn_in`.
    pub post_burn_in_steps: u64,
    pub n_agents: u32,
    /// Diagnostic for aborted runs.
    pub abort_reason: Option<String>,
    pub trajectory: Option<Trajectory>,
}

impl RunResult {
    /// Mean `|o|` over post-burn-in steps, if there were any.
    pub fn mean_abs_o(&self) -> Option<f64> {
        (self.post_burn_in_steps > 0).then(|| {
            self.abs_imbalance_sum as f64 / (self.post_burn_in_steps as f64 * self.n_agents as f64)
        })
    }
}

/// One realization in progress.
///
/// Seeding draws, from a ChaCha8 stream seeded with `seed`: one `next_u64`
/// whose low `m` bits are the initial window, then the strategy tables
/// (see [`Population::generate`]).
#[derive(Debug, Clone)]
pub struct Simulation<G: Gain = i64> {
    pub state: MarketState,
    pub population: Population<G>,
    rng: ChaCha8Rng,
}

impl Simulation {
    pub fn new(config: &SimulationConfig, seed: u64) -> Result<Self> {
        Self::with_gains(config, seed)
    }

    pub fn step(&mut self) -> Result<StepRecord> {
        step(&mut self.state, &mut self.population, &mut self.rng)
    }
}

impl<G: Gain> Simulation<G> {
    fn with_gains(config: &SimulationConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let history = (rng.next_u64() as usize) & (config.history_count() - 1);
        let window = HistoryWindow::from_encoded(config.memory, history)?;
        let population = Population::generate_with(
            &mut rng,
            config.n_agents,
            config.strategies,
            config.memory,
            history,
        )?;
        let state = MarketState::new(
            window,
            config.fundamental_price,
            config.dividend,
            config.liquidity,
            config.fundamental,
        );
        Ok(Simulation {
            state,
            population,
            rng,
        })
    }
}

/// Runs one realization until `max_steps`, the speculative trigger (with
/// early stop on), or a non-finite price.
pub fn run_realization(config: &SimulationConfig, seed: u64) -> Result<RunResult> {
    // Gains never exceed N · steps in magnitude.
    let bound = (config.n_agents as u64).saturating_mul(config.max_steps);
    if bound < <i32 as Gain>::LIMIT {
        run_with::<i32>(config, seed)
    } else {
        run_with::<i64>(config, seed)
    }
}

fn run_with<G: Gain>(config: &SimulationConfig, seed: u64) -> Result<RunResult> {
    let mut sim = Simulation::<G>::with_gains(config, seed)?;
    let full = config.trajectory_detail == TrajectoryDetail::Full;
    let mut trajectory = full.then(|| Trajectory {
        prices: vec![sim.state.price],
        ..Trajectory::default()
    });

    let mut tracker = TrendTracker::new(config.memory);
    let mut trend = None;
    let mut in_band = true;
    let mut abs_sum = 0u64;
    let mut post = 0u64;
    let mut steps = 0u64;
    let mut abort_reason = None;

    while steps < config.max_steps {
        let before = sim.state.price;
        let out = match step_inner(&mut sim.state, &mut sim.population, &mut sim.rng, None) {
            Ok(out) => out,
            Err(e) => {
                abort_reason = Some(e.to_string());
                break;
            }
        };
        let k = steps;
        steps += 1;
        if let Some(traj) = trajectory.as_mut() {
            traj.prices.push(out.price_after);
            traj.imbalances.push(out.imbalance);
            traj.fundamental_plays.push(out.n_fundamental_plays);
        }
        if k >= config.burn_in {
            abs_sum += out.imbalance.unsigned_abs();
            post += 1;
            in_band &= in_fundamental_band(out.price_after, config.fundamental_price);
        }
        if let Some(dir) = tracker.push(before, out.price_after) {
            trend.get_or_insert(dir);
            if config.early_stop {
                break;
            }
        }
    }

    let label = if abort_reason.is_some() {
        PhaseLabel::Aborted
    } else if trend.is_some() {
        PhaseLabel::Speculative
    } else if post > 0 && in_band {
        PhaseLabel::Fundamental
    } else {
        PhaseLabel::Undetermined
    };

    Ok(RunResult {
        seed,
        label,
        trend,
        stop_step: steps,
        final_price: sim.state.price,
        abs_imbalance_sum: abs_sum,
        post_burn_in_steps: post,
        n_agents: config.n_agents,
        abort_reason,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::classify_run;

    fn cfg() -> SimulationConfig {
        SimulationConfig::new(11, 3, 2, 20.0, 100.0, 100.0).with_detail(TrajectoryDetail::Full)
    }

    #[test]
    fn zero_steps() {
        let r = run_realization(&cfg().with_max_steps(0), 1).unwrap();
        assert_eq!(r.label, PhaseLabel::Undetermined);
        assert_eq!(r.stop_step, 0);
        assert_eq!(r.mean_abs_o(), None);
        assert_eq!(r.trajectory.unwrap().prices, vec![100.0]);
    }

    #[test]
    fn deterministic() {
        let a = run_realization(&cfg(), 77).unwrap();
        let b = run_realization(&cfg(), 77).unwrap();
        assert_eq!(a, b);
        let c = run_realization(&cfg(), 78).unwrap();
        assert_ne!(a.trajectory, c.trajectory);
    }

    #[test]
    fn gain_width_does_not_change_runs() {
        for seed in 0..10 {
            let c = SimulationConfig::new(21, 4, 11, 30.0, 50.0, 100.0)
                .with_early_stop(false)
                .with_max_steps(400)
                .with_detail(TrajectoryDetail::Full);
            assert_eq!(run_with::<i32>(&c, seed).unwrap(), run_with::<i64>(&c, seed).unwrap());
        }
    }

    #[test]
    fn default_step_cap() {
        assert_eq!(cfg().max_steps, 1600);
    }

    #[test]
    fn online_label_matches_offline_classifier() {
        for seed in 0..40 {
            for early in [true, false] {
                let c = cfg().with_early_stop(early).with_max_steps(300);
                let r = run_realization(&c, seed).unwrap();
                if r.label == PhaseLabel::Aborted {
                    continue;
                }
                let prices = &r.trajectory.as_ref().unwrap().prices;
                assert_eq!(r.label, classify_run(prices, c.memory, c.fundamental_price, c.burn_in));
            }
        }
    }

    #[test]
    fn simulation_steps_match_run() {
        let c = cfg().with_early_stop(false).with_max_steps(60);
        let r = run_realization(&c, 5).unwrap();
        let mut sim = Simulation::new(&c, 5).unwrap();
        let traj = r.trajectory.unwrap();
        for k in 0..60 {
            let rec = sim.step().unwrap();
            assert_eq!(rec.t, k as u64);
            assert_eq!(rec.imbalance, traj.imbalances[k]);
            assert_eq!(rec.price_after, traj.prices[k + 1]);
        }
    }
}
