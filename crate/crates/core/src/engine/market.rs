// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::agent::{Gain, Population};
use super::history::{ActionBit, HistoryWindow};
use crate::error::{Error, Result};

/// Recommendation of the fundamental strategy: sell above the fundamental
/// price, buy below it, nothing at exact equality.
#[inline]
pub fn fundamental_signal(price: f64, fundamental_price: f64) -> Option<ActionBit> {
    if price > fundamental_price {
        Some(ActionBit::Sell)
    } else if price < fundamental_price {
        Some(ActionBit::Buy)
    } else {
        None
    }
}

/// Probability `γ·e^(−γ)` of playing the fundamental strategy, with
/// `γ = |P − P_f| / d`. Peaks at `e^(−1)` for `γ = 1` and vanishes for
/// `d = +inf` and for `γ → inf`.
#[inline]
pub fn fundamental_probability(price: f64, fundamental_price: f64, dividend: f64) -> f64 {
    let gamma = (price - fundamental_price).abs() / dividend;
    if !gamma.is_finite() {
        return 0.0;
    }
    gamma * (-gamma).exp()
}

/// Total profit `Σ_i Σ_j a_i(t−1)·a_j(t) = A(t−1)·A(t)`.
pub fn total_profit(imbalance_prev: i64, imbalance_cur: i64) -> f64 {
    (imbalance_prev * imbalance_cur) as f64
}

/// Order parameter `o = A/N`.
pub fn order_parameter(imbalance: i64, n_agents: u32) -> f64 {
    imbalance as f64 / n_agents as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub t: u64,
    pub price: f64,
    pub log_price: f64,
    pub window: HistoryWindow,
    pub fundamental_price: f64,
    pub dividend: f64,
    pub liquidity: f64,
    /// Whether the fundamental strategy is available at all.
    pub fundamental: bool,
    pub imbalance_prev: i64,
}

impl MarketState {
    /// Market at `P(0) = P_f` with the given starting window.
    pub fn new(
        window: HistoryWindow,
        fundamental_price: f64,
        dividend: f64,
        liquidity: f64,
        fundamental: bool,
    ) -> Self {
        MarketState {
            t: 0,
            price: fundamental_price,
            log_price: fundamental_price.ln(),
            window,
            fundamental_price,
            dividend,
            liquidity,
            fundamental,
            imbalance_prev: 0,
        }
    }

    #[inline]
    fn fundamental_probability(&self) -> f64 {
        if self.fundamental {
            fundamental_probability(self.price, self.fundamental_price, self.dividend)
        } else {
            0.0
        }
    }
}

/// Everything observable about one step. Serialized field order is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub actions: Vec<ActionBit>,
    pub imbalance: i64,
    pub return_: f64,
    pub direction_bit: u8,
    pub n_fundamental_plays: u32,
    pub price_after: f64,
}

/// The scalar part of a [`StepRecord`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StepOutcome {
    pub imbalance: i64,
    pub return_: f64,
    pub direction_bit: u8,
    pub n_fundamental_plays: u32,
    pub price_after: f64,
}

/// Advances the market by one period.
///
/// Random draws happen in a fixed order: for each agent in index order, one
/// uniform `f64` if the fundamental probability is positive, then the
/// tie-break draw of [`super::best_strategy_index`] if the agent plays
/// technically. Finally one `bool` coin when `A(t) = 0`.
pub fn step<R: RngCore + ?Sized>(
    state: &mut MarketState,
    agents: &mut Population,
    rng: &mut R,
) -> Result<StepRecord> {
    let t = state.t;
    let mut actions = Vec::with_capacity(agents.len());
    let out = step_inner(state, agents, rng, Some(&mut actions))?;
    Ok(StepRecord {
        t,
        actions,
        imbalance: out.imbalance,
        return_: out.return_,
        direction_bit: out.direction_bit,
        n_fundamental_plays: out.n_fundamental_plays,
        price_after: out.price_after,
    })
}

#[inline]
pub(crate) fn step_inner<G: Gain, R: RngCore + ?Sized>(
    state: &mut MarketState,
    agents: &mut Population<G>,
    rng: &mut R,
    mut actions: Option<&mut Vec<ActionBit>>,
) -> Result<StepOutcome> {
    let history = state.window.encoded();
    let p_fund = state.fundamental_probability();
    let signal = fundamental_signal(state.price, state.fundamental_price);

    let mut imbalance = 0i64;
    let mut n_fund = 0u32;
    for i in 0..agents.len() {
        let mut fundamental_play = None;
        if p_fund > 0.0 {
            let u: f64 = rng.random();
            if u < p_fund {
                fundamental_play = signal;
            }
        }
        let buy = match fundamental_play {
            Some(a) => {
                n_fund += 1;
                a == ActionBit::Buy
            }
            None => agents.technical_action(i, history, rng),
        };
        agents.set_played_fundamental(i, fundamental_play.is_some());
        imbalance += if buy { 1 } else { -1 };
        if let Some(buf) = actions.as_deref_mut() {
            buf.push(ActionBit::from_bit(buy));
        }
    }

    let return_ = imbalance as f64 / state.liquidity;
    let log_price = state.log_price + return_;
    let price = log_price.exp();
    if !(price.is_finite() && price > 0.0) {
        return Err(Error::NonFinitePrice {
            step: state.t,
            log_price,
        });
    }

    let up = match imbalance.signum() {
        1 => true,
        -1 => false,
        _ => rng.random::<bool>(),
    };

    agents.settle(imbalance, history);
    state.window.push(up);
    state.log_price = log_price;
    state.price = price;
    state.imbalance_prev = imbalance;
    state.t += 1;

    Ok(StepOutcome {
        imbalance,
        return_,
        direction_bit: up as u8,
        n_fundamental_plays: n_fund,
        price_after: price,
    })
}
