// SPDX-License-Identifier: Apache-2.0

use crate::config::SimulationConfig;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into one 64-bit value: `h ← mix(h + GOLDEN ^ w)`, starting
/// from `h = 0`. Stable across platforms and releases.
pub fn stable_hash(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0u64, |h, &w| mix(h.wrapping_add(GOLDEN) ^ w))
}

/// Identifies a parameter cell: `(N, m, s, λ, d, P_f)`, floats by their bit
/// patterns. Run-control switches are not part of the key, so toggling for
/// example the fundamental strategy keeps the same strategy draws.
pub fn cell_key(config: &SimulationConfig) -> [u64; 6] {
    [
        config.n_agents as u64,
        config.memory as u64,
        config.strategies as u64,
        config.liquidity.to_bits(),
        config.dividend.to_bits(),
        config.fundamental_price.to_bits(),
    ]
}

/// Seed of realization `run` of a cell:
/// `stable_hash([master_seed, N, m, s, λ, d, P_f, run])`.
pub fn run_seed(master_seed: u64, config: &SimulationConfig, run: u64) -> u64 {
    let key = cell_key(config);
    let mut words = [0u64; 8];
    words[0] = master_seed;
    words[1..7].copy_from_slice(&key);
    words[7] = run;
    stable_hash(&words)
}

/// Seed of the bootstrap stream of a cell. Uses `u64::MAX` in place of the
/// run index.
pub(crate) fn bootstrap_seed(master_seed: u64, config: &SimulationConfig) -> u64 {
    run_seed(master_seed, config, u64::MAX)
}
