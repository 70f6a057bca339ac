// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, RngCore};

use super::history::ActionBit;
use super::strategy::{generate_strategy, StrategyTable};
use crate::error::{Error, Result};

/// Index of the highest score. Ties are broken uniformly among the tied
/// indices: one `random_range(0..k)` draw picks the k-th tied index in
/// ascending order. No draw is made when the maximum is unique.
///
/// Scores must be totally ordered (no NaN).
pub fn best_strategy_index<T, R>(scores: &[T], rng: &mut R) -> usize
where
    T: PartialOrd + Copy,
    R: RngCore + ?Sized,
{
    debug_assert!(!scores.is_empty());
    let mut best = scores[0];
    let mut first = 0;
    let mut ties = 1u32;
    for (j, &x) in scores.iter().enumerate().skip(1) {
        if x > best {
            best = x;
            first = j;
            ties = 1;
        } else if x == best {
            ties += 1;
        }
    }
    if ties == 1 {
        return first;
    }
    let pick = rng.random_range(0..ties);
    scores
        .iter()
        .enumerate()
        .filter(|(_, &x)| x == best)
        .nth(pick as usize)
        .map(|(j, _)| j)
        .expect("tie count matches")
}

/// One agent's strategies and bookkeeping, as a standalone value.
///
/// The engine keeps agents in [`Population`], which stores the same data in a
/// packed layout; [`Population::agent`] materializes this view.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnicalAgent {
    pub id: usize,
    pub strategies: Vec<StrategyTable>,
    /// Cumulative virtual payoff Π of each strategy.
    pub scores: Vec<f64>,
    /// Each strategy's recommendation at the previous step.
    pub prev_actions: Vec<ActionBit>,
    pub played_fundamental_prev: bool,
}

impl TechnicalAgent {
    pub fn best_strategy_index<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        best_strategy_index(&self.scores, rng)
    }

    /// Relative payoff `q = Π[a¹] − Π[a²]`, defined for two-strategy agents.
    pub fn relative_payoff(&self) -> Option<f64> {
        match self.scores.as_slice() {
            [a, b] => Some(a - b),
            _ => None,
        }
    }
}

macro_rules! lane_masks {
    ($t:ty) => {{
        let mut table = [[0 as $t; 8]; 256];
        let mut b = 0;
        while b < 256 {
            let mut k = 0;
            while k < 8 {
                if (b >> k) & 1 == 1 {
                    table[b][k] = -1;
                }
                k += 1;
            }
            b += 1;
        }
        table
    }};
}

/// Integer type holding strategy gains. `i32` doubles the SIMD width and is
/// exact as long as `N · steps` stays below [`Gain::LIMIT`].
pub trait Gain:
    Copy
    + Ord
    + std::fmt::Debug
    + Send
    + Sync
    + std::ops::Add<Output = Self>
    + std::ops::BitAnd<Output = Self>
    + 'static
{
    const ZERO: Self;
    const MIN: Self;
    /// Gain of the padding lanes: below any reachable gain.
    const PADDING: Self;
    /// Largest `Σ |A(t)|` this type represents exactly.
    const LIMIT: u64;
    /// For each mask byte, `-1` (all bits set) in lane `k` iff bit `k` is set.
    const LANE_MASKS: &'static [[Self; 8]; 256];

    fn from_imbalance(a: i64) -> Self;
    fn to_i64(self) -> i64;
}

impl Gain for i32 {
    const ZERO: Self = 0;
    const MIN: Self = i32::MIN;
    const PADDING: Self = i32::MIN / 2;
    const LIMIT: u64 = 1 << 29;
    const LANE_MASKS: &'static [[Self; 8]; 256] = &lane_masks!(i32);

    #[inline]
    fn from_imbalance(a: i64) -> Self {
        a as i32
    }

    fn to_i64(self) -> i64 {
        self as i64
    }
}

impl Gain for i64 {
    const ZERO: Self = 0;
    const MIN: Self = i64::MIN;
    const PADDING: Self = i64::MIN / 4;
    const LIMIT: u64 = 1 << 60;
    const LANE_MASKS: &'static [[Self; 8]; 256] = &lane_masks!(i64);

    #[inline]
    fn from_imbalance(a: i64) -> Self {
        a
    }

    fn to_i64(self) -> i64 {
        self
    }
}

/// All technical agents of one realization in a packed layout.
///
/// For agent `i` and history `h`, the strategies' recommendations are a
/// bitset over strategy indices, one byte per eight strategies (bit set =
/// buy). Instead of the scores Π themselves the population tracks the buy
/// gains `S_j = Σ A(t)` over the steps where strategy `j` recommended buying.
/// Since every increment of Π is `±A(t)`, `Π_j = 2·S_j − Σ A(t)`: the same
/// ordering, in exact integer arithmetic.
#[derive(Debug, Clone)]
pub struct Population<G: Gain = i64> {
    n_agents: usize,
    strategies: usize,
    memory: u32,
    /// Strategies per agent rounded up to a multiple of 8. Padding gains
    /// hold [`Gain::PADDING`] and are never credited.
    stride: usize,
    masks: Vec<u8>,
    gains: Vec<G>,
    /// `Σ A(t)` over all settled steps.
    total_imbalance: i64,
    /// Per agent: maximum gain and the number of strategies attaining it.
    best_gain: Vec<G>,
    best_ties: Vec<u32>,
    played_fundamental: Vec<bool>,
    /// History at which the `prev_actions` of every strategy were evaluated.
    prev_history: usize,
}

impl Population {
    /// Draws `s` tables per agent, agent-major then strategy-major, each with
    /// [`generate_strategy`]. All scores start at zero and `prev_actions`
    /// are evaluated at `initial_history`.
    pub fn generate<R: RngCore + ?Sized>(
        rng: &mut R,
        n_agents: u32,
        strategies: u32,
        memory: u32,
        initial_history: usize,
    ) -> Result<Self> {
        Self::generate_with(rng, n_agents, strategies, memory, initial_history)
    }

    pub fn from_tables(tables: &[Vec<StrategyTable>], initial_history: usize) -> Result<Self> {
        Self::from_tables_with(tables, initial_history)
    }
}

impl<G: Gain> Population<G> {
    pub(crate) fn generate_with<R: RngCore + ?Sized>(
        rng: &mut R,
        n_agents: u32,
        strategies: u32,
        memory: u32,
        initial_history: usize,
    ) -> Result<Self> {
        let tables = (0..n_agents)
            .map(|_| {
                (0..strategies)
                    .map(|_| generate_strategy(rng, memory))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_tables_with(&tables, initial_history)
    }

    pub(crate) fn from_tables_with(tables: &[Vec<StrategyTable>], initial_history: usize) -> Result<Self> {
        let n_agents = tables.len();
        if n_agents == 0 {
            return Err(Error::parameter("N", "need at least one agent"));
        }
        let strategies = tables[0].len();
        if strategies == 0 {
            return Err(Error::parameter("s", "need at least one strategy"));
        }
        let memory = tables[0][0].memory();
        if tables
            .iter()
            .any(|a| a.len() != strategies || a.iter().any(|t| t.memory() != memory))
        {
            return Err(Error::parameter(
                "strategies",
                "all agents need the same number of equally sized tables",
            ));
        }
        let histories = 1usize << memory;
        if initial_history >= histories {
            return Err(Error::parameter("history", "initial history out of range"));
        }
        let stride = strategies.div_ceil(8) * 8;
        let bytes = stride / 8;
        let mut masks = vec![0u8; n_agents * histories * bytes];
        for (i, agent) in tables.iter().enumerate() {
            for (j, table) in agent.iter().enumerate() {
                for (w, &word) in table.words().iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let h = w * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        masks[(i * histories + h) * bytes + j / 8] |= 1 << (j % 8);
                    }
                }
            }
        }
        Ok(Population {
            n_agents,
            strategies,
            memory,
            stride,
            masks,
            gains: (0..n_agents * stride)
                .map(|k| if k % stride < strategies { G::ZERO } else { G::PADDING })
                .collect(),
            total_imbalance: 0,
            best_gain: vec![G::ZERO; n_agents],
            best_ties: vec![strategies as u32; n_agents],
            played_fundamental: vec![false; n_agents],
            prev_history: initial_history,
        })
    }

    pub fn len(&self) -> usize {
        self.n_agents
    }

    pub fn is_empty(&self) -> bool {
        self.n_agents == 0
    }

    pub fn strategies(&self) -> usize {
        self.strategies
    }

    pub fn memory(&self) -> u32 {
        self.memory
    }

    pub fn prev_history(&self) -> usize {
        self.prev_history
    }

    #[inline]
    fn mask(&self, agent: usize, history: usize) -> &[u8] {
        let bytes = self.stride / 8;
        let start = (agent * (1 << self.memory) + history) * bytes;
        &self.masks[start..start + bytes]
    }

    #[inline]
    fn recommends_buy(&self, agent: usize, strategy: usize, history: usize) -> bool {
        (self.mask(agent, history)[strategy / 8] >> (strategy % 8)) & 1 == 1
    }

    #[inline]
    fn gains(&self, agent: usize) -> &[G] {
        &self.gains[agent * self.stride..agent * self.stride + self.strategies]
    }

    /// Cumulative payoffs Π of agent `agent`'s strategies.
    pub fn scores(&self, agent: usize) -> Vec<i64> {
        self.gains(agent)
            .iter()
            .map(|&g| 2 * g.to_i64() - self.total_imbalance)
            .collect()
    }

    /// The action of agent `agent`'s best strategy at `history`. Draws from
    /// `rng` exactly as [`best_strategy_index`] would on the scores.
    #[inline]
    pub(crate) fn technical_action<R: RngCore + ?Sized>(
        &self,
        agent: usize,
        history: usize,
        rng: &mut R,
    ) -> bool {
        let ties = self.best_ties[agent];
        let pick = if ties == 1 {
            0
        } else {
            rng.random_range(0..ties) as usize
        };
        let best = self.best_gain[agent];
        let j = self
            .gains(agent)
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == best)
            .nth(pick)
            .map(|(k, _)| k)
            .expect("tie count matches");
        self.recommends_buy(agent, j, history)
    }

    pub(crate) fn set_played_fundamental(&mut self, agent: usize, played: bool) {
        self.played_fundamental[agent] = played;
    }

    /// Credits every strategy with `prev_action · imbalance`, then makes
    /// `current_history` the new reference for `prev_actions`.
    pub(crate) fn settle(&mut self, imbalance: i64, current_history: usize) {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx2") {
                // SAFETY: the CPU supports AVX2, checked just above.
                unsafe { self.settle_avx2(imbalance) };
                self.finish_settle(imbalance, current_history);
                return;
            }
        }
        self.settle_agents(imbalance);
        self.finish_settle(imbalance, current_history);
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn settle_avx2(&mut self, imbalance: i64) {
        self.settle_agents(imbalance);
    }

    fn finish_settle(&mut self, imbalance: i64, current_history: usize) {
        self.total_imbalance += imbalance;
        self.prev_history = current_history;
    }

    /// Gain update and best-strategy bookkeeping for every agent. Integer
    /// only, so every instruction set gives the same result.
    #[inline(always)]
    fn settle_agents(&mut self, imbalance: i64) {
        let histories = 1usize << self.memory;
        let stride = self.stride;
        let bytes = stride / 8;
        let a = G::from_imbalance(imbalance);
        for i in 0..self.n_agents {
            let mstart = (i * histories + self.prev_history) * bytes;
            let mask = &self.masks[mstart..mstart + bytes];
            let gains = &mut self.gains[i * stride..(i + 1) * stride];
            let mut lane_max = [G::MIN; 8];
            for (block, &byte) in gains.chunks_exact_mut(8).zip(mask) {
                let lanes = &G::LANE_MASKS[byte as usize];
                for k in 0..8 {
                    block[k] = block[k] + (lanes[k] & a);
                    lane_max[k] = lane_max[k].max(block[k]);
                }
            }
            let best = lane_max.iter().copied().fold(G::MIN, G::max);
            let mut lane_ties = [0u32; 8];
            for block in gains.chunks_exact(8) {
                for k in 0..8 {
                    lane_ties[k] += (block[k] == best) as u32;
                }
            }
            let ties = lane_ties.iter().sum::<u32>();
            self.best_gain[i] = best;
            self.best_ties[i] = ties;
        }
    }

    /// Materializes agent `i` as a standalone [`TechnicalAgent`].
    pub fn agent(&self, i: usize) -> TechnicalAgent {
        let histories = 1usize << self.memory;
        let strategies = (0..self.strategies)
            .map(|j| {
                let actions: Vec<ActionBit> = (0..histories)
                    .map(|h| ActionBit::from_bit(self.recommends_buy(i, j, h)))
                    .collect();
                StrategyTable::from_actions(&actions).expect("valid table")
            })
            .collect();
        TechnicalAgent {
            id: i,
            strategies,
            scores: self.scores(i).iter().map(|&x| x as f64).collect(),
            prev_actions: (0..self.strategies)
                .map(|j| ActionBit::from_bit(self.recommends_buy(i, j, self.prev_history)))
                .collect(),
            played_fundamental_prev: self.played_fundamental[i],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unique_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(best_strategy_index(&[3.0, -1.0], &mut rng), 0);
        assert_eq!(best_strategy_index(&[-3, 4, 1], &mut rng), 1);
    }

    #[test]
    fn unique_maximum_draws_nothing() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let b = a.clone();
        best_strategy_index(&[1, 5, 2], &mut a);
        assert_eq!(a, b);
    }

    #[test]
    fn two_way_tie_is_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 10_000;
        let zeros = (0..draws)
            .filter(|_| best_strategy_index(&[2.0, 2.0], &mut rng) == 0)
            .count();
        let p = zeros as f64 / draws as f64;
        assert!((p - 0.5).abs() <= 0.02, "p = {p}");
    }

    #[test]
    fn all_zero_start_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let draws = 10_000;
        let mut counts = [0usize; 18];
        for _ in 0..draws {
            counts[best_strategy_index(&[0i64; 18], &mut rng)] += 1;
        }
        for c in counts {
            let p = c as f64 / draws as f64;
            assert!((p - 1.0 / 18.0).abs() <= 0.02, "p = {p}");
        }
    }

    #[test]
    fn ties_only_among_maxima() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let j = best_strategy_index(&[1, 7, 0, 7, 7, -2], &mut rng);
            assert!([1, 3, 4].contains(&j));
        }
    }

    #[test]
    fn packed_layout_matches_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let tables: Vec<Vec<StrategyTable>> = (0..4)
            .map(|_| (0..70).map(|_| generate_strategy(&mut rng, 4).unwrap()).collect())
            .collect();
        let pop = Population::from_tables(&tables, 5).unwrap();
        for (i, agent_tables) in tables.iter().enumerate() {
            let agent = pop.agent(i);
            assert_eq!(&agent.strategies, agent_tables);
            for (j, t) in agent_tables.iter().enumerate() {
                assert_eq!(agent.prev_actions[j], t.action(5));
            }
        }
    }

    #[test]
    fn settle_applies_prev_action_times_imbalance() {
        use ActionBit::{Buy, Sell};
        let t0 = StrategyTable::from_actions(&[Buy, Sell]).unwrap();
        let t1 = StrategyTable::from_actions(&[Sell, Sell]).unwrap();
        let mut pop = Population::from_tables(&[vec![t0, t1]], 0).unwrap();
        pop.settle(4, 1);
        assert_eq!(pop.scores(0), vec![4, -4]);
        pop.settle(3, 1);
        assert_eq!(pop.scores(0), vec![1, -7]);
        assert_eq!(pop.agent(0).relative_payoff(), Some(8.0));
    }
}
