// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::config::validate_memory;
use crate::error::{Error, Result};

/// A buy (`+1`) or sell (`-1`) decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionBit {
    Sell,
    Buy,
}

impl ActionBit {
    #[inline]
    pub fn value(self) -> i32 {
        match self {
            ActionBit::Sell => -1,
            ActionBit::Buy => 1,
        }
    }

    /// `true` maps to buy.
    #[inline]
    pub fn from_bit(buy: bool) -> Self {
        if buy {
            ActionBit::Buy
        } else {
            ActionBit::Sell
        }
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            1 => Some(ActionBit::Buy),
            -1 => Some(ActionBit::Sell),
            _ => None,
        }
    }
}

/// Encodes direction bits, oldest first and most recent last, as
/// `h = Σ_j b(t-j+1)·2^(j-1)`: the most recent bit is the least significant.
pub fn encode_history(bits: &[u8], memory: u32) -> Result<usize> {
    validate_memory(memory)?;
    if bits.len() != memory as usize {
        return Err(Error::parameter(
            "bits",
            format!("expected {memory} direction bits, got {}", bits.len()),
        ));
    }
    let mut h = 0usize;
    for (j, &b) in bits.iter().rev().enumerate() {
        match b {
            0 => {}
            1 => h |= 1 << j,
            other => {
                return Err(Error::parameter(
                    "bits",
                    format!("direction bit must be 0 or 1, got {other}"),
                ))
            }
        }
    }
    Ok(h)
}

/// The last `m` price-direction bits, kept in encoded form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryWindow {
    memory: u32,
    encoded: usize,
}

impl HistoryWindow {
    pub fn from_encoded(memory: u32, encoded: usize) -> Result<Self> {
        validate_memory(memory)?;
        if encoded >= 1 << memory {
            return Err(Error::parameter(
                "history",
                format!("encoded history {encoded} out of range for m = {memory}"),
            ));
        }
        Ok(HistoryWindow { memory, encoded })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let memory = bits.len() as u32;
        let encoded = encode_history(bits, memory)?;
        Ok(HistoryWindow { memory, encoded })
    }

    #[inline]
    pub fn encoded(&self) -> usize {
        self.encoded
    }

    pub fn memory(&self) -> u32 {
        self.memory
    }

    /// Direction bits, oldest first.
    pub fn bits(&self) -> Vec<u8> {
        (0..self.memory)
            .rev()
            .map(|j| ((self.encoded >> j) & 1) as u8)
            .collect()
    }

    /// Shift in the newest direction bit; the oldest bit falls out.
    #[inline]
    pub fn push(&mut self, up: bool) {
        let mask = (1usize << self.memory) - 1;
        self.encoded = ((self.encoded << 1) | up as usize) & mask;
    }
}
