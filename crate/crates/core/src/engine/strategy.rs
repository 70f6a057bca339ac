// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;

use super::history::ActionBit;
use crate::config::{validate_memory, MAX_MEMORY};
use crate::error::{Error, Result};

/// A technical strategy: one action for each of the `2^m` histories.
///
/// Entries are bit-packed, 64 per word, with a set bit meaning buy. Entry `h`
/// lives in bit `h % 64` of word `h / 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyTable {
    memory: u32,
    words: Vec<u64>,
}

impl StrategyTable {
    pub fn from_actions(actions: &[ActionBit]) -> Result<Self> {
        let len = actions.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::parameter(
                "actions",
                format!("table length must be 2^m with m >= 1, got {len}"),
            ));
        }
        let memory = len.trailing_zeros();
        validate_memory(memory)?;
        let mut words = vec![0u64; len.div_ceil(64)];
        for (h, a) in actions.iter().enumerate() {
            if *a == ActionBit::Buy {
                words[h / 64] |= 1 << (h % 64);
            }
        }
        Ok(StrategyTable { memory, words })
    }

    pub fn memory(&self) -> u32 {
        self.memory
    }

    pub fn len(&self) -> usize {
        1 << self.memory
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn buys(&self, history: usize) -> bool {
        (self.words[history / 64] >> (history % 64)) & 1 == 1
    }

    #[inline]
    pub fn action(&self, history: usize) -> ActionBit {
        ActionBit::from_bit(self.buys(history))
    }

    pub fn actions(&self) -> Vec<ActionBit> {
        (0..self.len()).map(|h| self.action(h)).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Draws a table with every entry independently uniform over buy/sell, using
/// the default cap `m <= 20`.
///
/// Consumes `max(1, 2^m / 64)` calls to `next_u64`; for `m < 6` only the low
/// `2^m` bits of the single word are kept.
pub fn generate_strategy<R: RngCore + ?Sized>(rng: &mut R, memory: u32) -> Result<StrategyTable> {
    generate_strategy_with_cap(rng, memory, MAX_MEMORY)
}

pub fn generate_strategy_with_cap<R: RngCore + ?Sized>(
    rng: &mut R,
    memory: u32,
    cap: u32,
) -> Result<StrategyTable> {
    if memory > cap {
        return Err(Error::parameter(
            "m",
            format!("memory length {memory} exceeds the table-size cap of {cap}"),
        ));
    }
    validate_memory(memory)?;
    let len = 1usize << memory;
    let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    if len < 64 {
        words[0] &= (1u64 << len) - 1;
    }
    Ok(StrategyTable { memory, words })
}
