// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seed::bootstrap_seed;
use crate::config::SimulationConfig;
use crate::engine::RunResult;
use crate::phase::{temperature, PhaseLabel, Temperature};

/// Bootstrap resamples per interval.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// 95% percentile-bootstrap intervals for the label fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionIntervals {
    pub spec: Interval,
    pub fund: Interval,
    pub undet: Interval,
    pub abort: Interval,
}

impl FractionIntervals {
    pub fn get(&self, label: PhaseLabel) -> Interval {
        match label {
            PhaseLabel::Speculative => self.spec,
            PhaseLabel::Fundamental => self.fund,
            PhaseLabel::Undetermined => self.undet,
            PhaseLabel::Aborted => self.abort,
        }
    }
}

/// Label counts and `|o|` statistics of one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub config: SimulationConfig,
    pub master_seed: u64,
    pub realizations: usize,
    pub n_spec: usize,
    pub n_fund: usize,
    pub n_undet: usize,
    pub n_abort: usize,
    pub f_spec: f64,
    pub f_fund: f64,
    pub f_undet: f64,
    pub f_abort: f64,
    /// `Σ|A(t)| / (N · Σ steps)` over the post-burn-in steps of all runs.
    /// `None` when no run got past the burn-in.
    pub mean_abs_o: Option<f64>,
    pub temperature: Temperature,
    pub bootstrap_ci: FractionIntervals,
}

impl EnsembleSummary {
    /// Aggregates `runs`, which must be in run-index order.
    pub fn from_runs(config: &SimulationConfig, master_seed: u64, runs: &[RunResult]) -> Self {
        let labels: Vec<PhaseLabel> = runs.iter().map(|r| r.label).collect();
        let count = |l: PhaseLabel| labels.iter().filter(|&&x| x == l).count();
        let r = labels.len();
        let (n_spec, n_fund, n_undet) = (
            count(PhaseLabel::Speculative),
            count(PhaseLabel::Fundamental),
            count(PhaseLabel::Undetermined),
        );
        let n_abort = r - n_spec - n_fund - n_undet;
        let frac = |k: usize| if r == 0 { 0.0 } else { k as f64 / r as f64 };

        let abs_sum: u64 = runs.iter().map(|r| r.abs_imbalance_sum).sum();
        let post: u64 = runs.iter().map(|r| r.post_burn_in_steps).sum();
        let mean_abs_o =
            (post > 0).then(|| abs_sum as f64 / (post as f64 * config.n_agents as f64));

        let mut rng = ChaCha8Rng::seed_from_u64(bootstrap_seed(master_seed, config));
        let bootstrap_ci = bootstrap(&labels, &mut rng);

        EnsembleSummary {
            config: config.clone(),
            master_seed,
            realizations: r,
            n_spec,
            n_fund,
            n_undet,
            n_abort,
            f_spec: frac(n_spec),
            f_fund: frac(n_fund),
            f_undet: frac(n_undet),
            f_abort: frac(n_abort),
            mean_abs_o,
            temperature: temperature(config.memory, config.n_agents, config.strategies),
            bootstrap_ci,
        }
    }

    pub fn fraction(&self, label: PhaseLabel) -> f64 {
        match label {
            PhaseLabel::Speculative => self.f_spec,
            PhaseLabel::Fundamental => self.f_fund,
            PhaseLabel::Undetermined => self.f_undet,
            PhaseLabel::Aborted => self.f_abort,
        }
    }
}

/// Resamples the run labels with replacement and takes the 2.5% and 97.5%
/// order statistics of each fraction. Intervals are widened if necessary so
/// they contain the point estimate.
fn bootstrap(labels: &[PhaseLabel], rng: &mut ChaCha8Rng) -> FractionIntervals {
    let r = labels.len();
    let point = |l: PhaseLabel| {
        if r == 0 {
            0.0
        } else {
            labels.iter().filter(|&&x| x == l).count() as f64 / r as f64
        }
    };
    if r == 0 {
        let zero = Interval { lo: 0.0, hi: 0.0 };
        return FractionIntervals { spec: zero, fund: zero, undet: zero, abort: zero };
    }
    let mut samples: [Vec<f64>; 4] = Default::default();
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut counts = [0usize; 4];
        for _ in 0..r {
            let l = labels[rng.random_range(0..r)];
            counts[label_index(l)] += 1;
        }
        for k in 0..4 {
            samples[k].push(counts[k] as f64 / r as f64);
        }
    }
    let lo_idx = BOOTSTRAP_RESAMPLES * 25 / 1000;
    let hi_idx = BOOTSTRAP_RESAMPLES * 975 / 1000 - 1;
    let mut out = [Interval { lo: 0.0, hi: 0.0 }; 4];
    for (k, label) in PhaseLabel::ALL.into_iter().enumerate() {
        let s = &mut samples[k];
        s.sort_by(f64::total_cmp);
        let p = point(label);
        out[k] = Interval {
            lo: s[lo_idx].min(p),
            hi: s[hi_idx].max(p),
        };
    }
    FractionIntervals {
        spec: out[0],
        fund: out[1],
        undet: out[2],
        abort: out[3],
    }
}

fn label_index(l: PhaseLabel) -> usize {
    PhaseLabel::ALL.iter().position(|&x| x == l).expect("known label")
}
