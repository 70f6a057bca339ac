// SPDX-License-Identifier: Apache-2.0

//! Temperature ratio and speculative / fundamental classification of runs.
//!
//! A run is *speculative* once the price has moved in the same direction `m`
//! times in a row. Zero changes break a run. A run that never triggers is
//! *fundamental* when every price after the burn-in stays within
//! `[0.5·P_f, 1.5·P_f]`, and *undetermined* otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    Speculative,
    Fundamental,
    Undetermined,
    /// The run hit a non-finite price and could not be completed.
    Aborted,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 4] = [
        PhaseLabel::Speculative,
        PhaseLabel::Fundamental,
        PhaseLabel::Undetermined,
        PhaseLabel::Aborted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Speculative => "speculative",
            PhaseLabel::Fundamental => "fundamental",
            PhaseLabel::Undetermined => "undetermined",
            PhaseLabel::Aborted => "aborted",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PhaseLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown phase label `{s}`"))
    }
}

/// Direction of the trend that fired the speculative trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Temperature(pub f64);

impl Temperature {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which numerator the temperature uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureDefinition {
    /// `(2^m + 1)/(N·s)`: the technical pool plus the fundamental strategy.
    #[default]
    WithFundamental,
    /// `2^m/(N·s)`, for comparison with the technical-only ratio.
    TechnicalOnly,
}

/// `T = (2^m + 1)/(N·s)`.
pub fn temperature(memory: u32, n_agents: u32, strategies: u32) -> Temperature {
    temperature_with(memory, n_agents, strategies, TemperatureDefinition::default())
}

pub fn temperature_with(
    memory: u32,
    n_agents: u32,
    strategies: u32,
    definition: TemperatureDefinition,
) -> Temperature {
    let pool = 2f64.powi(memory as i32);
    let numerator = match definition {
        TemperatureDefinition::WithFundamental => pool + 1.0,
        TemperatureDefinition::TechnicalOnly => pool,
    };
    Temperature(numerator / (n_agents as f64 * strategies as f64))
}

/// True iff the last `m` changes of `prices` are all strictly positive or all
/// strictly negative. Needs at least `m + 1` prices; returns false otherwise.
pub fn classify_step(prices: &[f64], memory: u32) -> bool {
    let m = memory as usize;
    if m == 0 || prices.len() < m + 1 {
        return false;
    }
    let tail = &prices[prices.len() - m - 1..];
    let ups = tail.windows(2).all(|w| w[1] > w[0]);
    let downs = tail.windows(2).all(|w| w[1] < w[0]);
    ups || downs
}

/// Online version of [`classify_step`]: tracks the current run of same-sign
/// price changes.
#[derive(Debug, Clone)]
pub struct TrendTracker {
    memory: u32,
    run: u32,
    up: bool,
}

impl TrendTracker {
    pub fn new(memory: u32) -> Self {
        TrendTracker {
            memory,
            run: 0,
            up: false,
        }
    }

    /// Feeds one price change; returns the trend direction if the last `m`
    /// changes now share a sign.
    #[inline]
    pub fn push(&mut self, before: f64, after: f64) -> Option<Trend> {
        if after > before {
            self.run = if self.up { self.run + 1 } else { 1 };
            self.up = true;
        } else if after < before {
            self.run = if self.up { 1 } else { self.run + 1 };
            self.up = false;
        } else {
            self.run = 0;
            return None;
        }
        if self.run >= self.memory {
            Some(if self.up { Trend::Up } else { Trend::Down })
        } else {
            None
        }
    }
}

/// Whether `price` lies in the ±50% band around `fundamental_price`.
#[inline]
pub fn in_fundamental_band(price: f64, fundamental_price: f64) -> bool {
    price >= 0.5 * fundamental_price && price <= 1.5 * fundamental_price
}

/// Labels a price trajectory `P(0), P(1), ...`, where `P(k+1)` is the price
/// after step `k`. The band test covers the prices after steps
/// `k >= burn_in`; a trajectory with no such price is undetermined.
pub fn classify_run(prices: &[f64], memory: u32, fundamental_price: f64, burn_in: u64) -> PhaseLabel {
    if prices.len() < 2 {
        return PhaseLabel::Undetermined;
    }
    let mut tracker = TrendTracker::new(memory);
    if prices.windows(2).any(|w| tracker.push(w[0], w[1]).is_some()) {
        return PhaseLabel::Speculative;
    }
    let start = usize::try_from(burn_in).unwrap_or(usize::MAX).saturating_add(1);
    match prices.get(start..) {
        Some(rest) if !rest.is_empty() => {
            if rest.iter().all(|&p| in_fundamental_band(p, fundamental_price)) {
                PhaseLabel::Fundamental
            } else {
                PhaseLabel::Undetermined
            }
        }
        _ => PhaseLabel::Undetermined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn temperature_examples() {
        assert!((temperature(5, 101, 1).value() - 33.0 / 101.0).abs() < 1e-15);
        assert!((temperature(3, 11, 2).value() - 9.0 / 22.0).abs() < 1e-15);
        assert_eq!(temperature(1, 1, 1).value(), 3.0);
        let t = temperature_with(3, 11, 1, TemperatureDefinition::TechnicalOnly);
        assert!((t.value() - 8.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn step_examples() {
        assert!(classify_step(&[100.0, 101.0, 102.0, 103.0], 3));
        assert!(!classify_step(&[100.0, 101.0, 100.0, 101.0], 3));
        assert!(classify_step(&[100.0, 99.0, 98.0, 97.0], 3));
        assert!(!classify_step(&[100.0, 101.0, 101.0, 102.0], 2));
        assert!(!classify_step(&[100.0, 101.0], 3));
    }

    #[test]
    fn run_examples() {
        assert_eq!(classify_run(&[100.0; 50], 3, 100.0, 8), PhaseLabel::Fundamental);
        let rising: Vec<f64> = (0..10).map(|k| 100.0 + k as f64).collect();
        for m in 1..=9 {
            assert_eq!(classify_run(&rising, m, 100.0, 0), PhaseLabel::Speculative);
        }
        assert_eq!(classify_run(&[], 3, 100.0, 0), PhaseLabel::Undetermined);
    }

    #[test]
    fn alternating_growth_is_undetermined() {
        // Alternating direction with growing amplitude: leaves the band, never
        // makes a run of two same-sign moves.
        let prices: Vec<f64> = (0..40)
            .map(|k| {
                let amp = 1.0 + 0.05 * k as f64;
                if k % 2 == 0 { 100.0 * amp } else { 100.0 / amp }
            })
            .collect();
        assert!(prices.iter().any(|&p| !in_fundamental_band(p, 100.0)));
        assert_eq!(classify_run(&prices, 2, 100.0, 4), PhaseLabel::Undetermined);
    }

    #[test]
    fn trend_is_checked_before_band() {
        let prices = [100.0, 101.0, 102.0, 103.0, 103.0];
        assert_eq!(classify_run(&prices, 3, 100.0, 0), PhaseLabel::Speculative);
    }

    #[test]
    fn burn_in_covers_whole_run() {
        assert_eq!(classify_run(&[100.0, 200.0, 100.0], 3, 100.0, 2), PhaseLabel::Undetermined);
        assert_eq!(classify_run(&[100.0, 200.0, 100.0, 110.0], 3, 100.0, 2), PhaseLabel::Fundamental);
    }

    #[test]
    fn tracker_reports_direction() {
        let mut t = TrendTracker::new(2);
        assert_eq!(t.push(1.0, 0.5), None);
        assert_eq!(t.push(0.5, 0.25), Some(Trend::Down));
        assert_eq!(t.push(0.25, 0.25), None);
        assert_eq!(t.push(0.25, 0.5), None);
        assert_eq!(t.push(0.5, 0.6), Some(Trend::Up));
    }

    #[test]
    fn label_strings_roundtrip() {
        for l in PhaseLabel::ALL {
            assert_eq!(l.as_str().parse::<PhaseLabel>().unwrap(), l);
        }
    }

    proptest! {
        #[test]
        fn temperature_monotone(m in 1u32..12, n in 1u32..500, s in 1u32..40) {
            let t = temperature(m, n, s).value();
            prop_assert!(temperature(m, n + 1, s).value() < t);
            prop_assert!(temperature(m, n, s + 1).value() < t);
            prop_assert!(temperature(m + 1, n, s).value() > t);
        }

        #[test]
        fn step_scale_invariant(
            prices in proptest::collection::vec(1.0f64..1000.0, 2..12),
            m in 1u32..6,
            scale in 0.01f64..100.0,
        ) {
            // Compare through an exact change-sign sequence: scaling can round
            // two nearly equal prices together, which is the only difference.
            let scaled: Vec<f64> = prices.iter().map(|p| p * scale).collect();
            let same_signs = prices.windows(2).zip(scaled.windows(2))
                .all(|(a, b)| a[1].partial_cmp(&a[0]) == b[1].partial_cmp(&b[0]));
            prop_assume!(same_signs);
            prop_assert_eq!(classify_step(&prices, m), classify_step(&scaled, m));
        }

        #[test]
        fn tracker_agrees_with_window(
            prices in proptest::collection::vec(prop_oneof![Just(99.0f64), Just(100.0), Just(101.0), 90.0f64..110.0], 1..30),
            m in 1u32..5,
        ) {
            let mut t = TrendTracker::new(m);
            for k in 1..prices.len() {
                let fired = t.push(prices[k - 1], prices[k]).is_some();
                prop_assert_eq!(fired, classify_step(&prices[..=k], m));
            }
        }
    }
}
