// SPDX-License-Identifier: Apache-2.0

//! A deliberately plain implementation of the game, used as a reference for
//! the engine. Tables are `Vec<i8>`, scores are `f64`, and every rule is
//! written out step by step. It consumes the random stream in the same
//! documented order as the engine.

#![allow(dead_code)]

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct ReferenceGame {
    pub n: usize,
    pub m: u32,
    pub s: usize,
    pub lambda: f64,
    pub d: f64,
    pub p_f: f64,
    pub fundamental: bool,
    pub tables: Vec<Vec<Vec<i8>>>,
    pub scores: Vec<Vec<f64>>,
    pub prev_actions: Vec<Vec<i8>>,
    pub history: usize,
    pub log_price: f64,
    pub price: f64,
    pub t: u64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceStep {
    pub actions: Vec<i8>,
    pub imbalance: i64,
    pub ret: f64,
    pub bit: u8,
    pub fundamental_plays: u32,
    pub price: f64,
}

impl ReferenceGame {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        m: u32,
        s: usize,
        lambda: f64,
        d: f64,
        p_f: f64,
        fundamental: bool,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let histories = 1usize << m;
        let history = (rng.next_u64() % histories as u64) as usize;
        let mut tables = Vec::new();
        for _ in 0..n {
            let mut agent = Vec::new();
            for _ in 0..s {
                let words = std::cmp::max(1, histories / 64);
                let raw: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
                let table: Vec<i8> = (0..histories)
                    .map(|h| if (raw[h / 64] >> (h % 64)) & 1 == 1 { 1 } else { -1 })
                    .collect();
                agent.push(table);
            }
            tables.push(agent);
        }
        let prev_actions = tables
            .iter()
            .map(|agent| agent.iter().map(|t| t[history]).collect())
            .collect();
        ReferenceGame {
            n,
            m,
            s,
            lambda,
            d,
            p_f,
            fundamental,
            tables,
            scores: vec![vec![0.0; s]; n],
            prev_actions,
            history,
            log_price: p_f.ln(),
            price: p_f,
            t: 0,
            rng,
        }
    }

    fn best(&mut self, i: usize) -> usize {
        let scores = &self.scores[i];
        let mut max = f64::NEG_INFINITY;
        for &x in scores {
            if x > max {
                max = x;
            }
        }
        let tied: Vec<usize> = (0..self.s).filter(|&j| scores[j] == max).collect();
        if tied.len() == 1 {
            tied[0]
        } else {
            let k = self.rng.random_range(0..tied.len() as u32) as usize;
            tied[k]
        }
    }

    /// Plays one step. `None` when the price leaves the finite positive range.
    pub fn step(&mut self) -> Option<ReferenceStep> {
        let h = self.history;
        let p = if self.fundamental {
            let gamma = (self.price - self.p_f).abs() / self.d;
            if gamma.is_finite() {
                gamma * (-gamma).exp()
            } else {
                0.0
            }
        } else {
            0.0
        };
        let signal: i8 = if self.price > self.p_f {
            -1
        } else if self.price < self.p_f {
            1
        } else {
            0
        };

        let mut actions = Vec::new();
        let mut plays = 0;
        for i in 0..self.n {
            let mut action = 0i8;
            if p > 0.0 {
                let u: f64 = self.rng.random();
                if u < p && signal != 0 {
                    action = signal;
                    plays += 1;
                }
            }
            if action == 0 {
                let j = self.best(i);
                action = self.tables[i][j][h];
            }
            actions.push(action);
        }

        let a: i64 = actions.iter().map(|&x| x as i64).sum();
        let ret = a as f64 / self.lambda;
        let log_price = self.log_price + ret;
        let price = log_price.exp();
        if !price.is_finite() || price <= 0.0 {
            return None;
        }
        let bit = if a > 0 {
            1
        } else if a < 0 {
            0
        } else {
            self.rng.random::<bool>() as u8
        };

        for i in 0..self.n {
            for j in 0..self.s {
                self.scores[i][j] += self.prev_actions[i][j] as f64 * a as f64;
                self.prev_actions[i][j] = self.tables[i][j][h];
            }
        }
        self.history = ((h << 1) | bit as usize) & ((1 << self.m) - 1);
        self.log_price = log_price;
        self.price = price;
        self.t += 1;
        Some(ReferenceStep {
            actions,
            imbalance: a,
            ret,
            bit,
            fundamental_plays: plays,
            price,
        })
    }
}

use dollar_game::engine::{ActionBit, Simulation};
use dollar_game::SimulationConfig;

/// Parameters for one oracle comparison, derived from `seed` so that a run
/// of seeds covers every small shape.
pub fn small_config(seed: u64) -> SimulationConfig {
    let n = 1 + (seed % 5) as u32;
    let m = 1 + ((seed / 5) % 3) as u32;
    let s = 1 + ((seed / 15) % 2) as u32;
    let lambda = [2.0, 5.0, 20.0][(seed % 3) as usize];
    let d = [3.0, 40.0, f64::INFINITY][((seed / 3) % 3) as usize];
    SimulationConfig::new(n, m, s, lambda, d, 100.0)
}

/// Steps the engine and the reference side by side and reports the first
/// difference.
pub fn compare_with_reference(config: &SimulationConfig, seed: u64, steps: u64) -> Result<(), String> {
    let mut sim = Simulation::new(config, seed).map_err(|e| e.to_string())?;
    let mut reference = ReferenceGame::new(
        config.n_agents as usize,
        config.memory,
        config.strategies as usize,
        config.liquidity,
        config.dividend,
        config.fundamental_price,
        config.fundamental,
        seed,
    );
    if sim.state.window.encoded() != reference.history {
        return Err("initial window differs".into());
    }
    for t in 0..steps {
        let expected = reference.step();
        let got = sim.step();
        let (expected, got) = match (expected, got) {
            (None, Err(_)) => return Ok(()),
            (Some(e), Ok(g)) => (e, g),
            (e, g) => return Err(format!("step {t}: abort mismatch {e:?} vs {g:?}")),
        };
        let actions: Vec<i8> = got
            .actions
            .iter()
            .map(|a| if *a == ActionBit::Buy { 1 } else { -1 })
            .collect();
        let same = actions == expected.actions
            && got.imbalance == expected.imbalance
            && got.return_ == expected.ret
            && got.direction_bit == expected.bit
            && got.n_fundamental_plays == expected.fundamental_plays
            && got.price_after == expected.price
            && sim.state.window.encoded() == reference.history;
        if !same {
            return Err(format!("step {t}: engine {got:?} vs reference {expected:?}"));
        }
        for i in 0..reference.n {
            let agent = sim.population.agent(i);
            let prev: Vec<i8> = agent
                .prev_actions
                .iter()
                .map(|a| if *a == ActionBit::Buy { 1 } else { -1 })
                .collect();
            if agent.scores != reference.scores[i] || prev != reference.prev_actions[i] {
                return Err(format!("step {t}: agent {i} bookkeeping differs"));
            }
        }
    }
    Ok(())
}

/// Synthetic inputs for the Ginzburg–Landau utilities.
pub mod synthetic {
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    /// Fifty points of `|o| = (T_c − T)^{1/2}` with `T_c = 1`, evenly spaced
    /// over `T ∈ [0.5, 0.99]`, each multiplied by `1 + noise·z`, `z ~ N(0, 1)`.
    pub fn noisy_critical_pairs<R: Rng>(rng: &mut R, noise: f64) -> Vec<(f64, f64)> {
        let z = Normal::new(0.0, 1.0).unwrap();
        (0..50)
            .map(|k| {
                let t = 0.5 + 0.01 * k as f64;
                let o = (1.0 - t).sqrt() * (1.0 + noise * z.sample(rng));
                (t, o)
            })
            .collect()
    }

    fn clipped<R: Rng>(rng: &mut R, dist: Normal<f64>) -> f64 {
        loop {
            let x = dist.sample(rng);
            if x.abs() <= 1.0 {
                return x;
            }
        }
    }

    /// Symmetric mixture of two normals at ±0.8 with width 0.1.
    pub fn bimodal<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        let d = Normal::new(0.8, 0.1).unwrap();
        (0..n)
            .map(|_| {
                let x = clipped(rng, d);
                if rng.random::<bool>() { x } else { -x }
            })
            .collect()
    }

    /// Normal at 0 with width 0.15.
    pub fn unimodal<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        let d = Normal::new(0.0, 0.15).unwrap();
        (0..n).map(|_| clipped(rng, d)).collect()
    }
}
