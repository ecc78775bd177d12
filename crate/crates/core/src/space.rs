//! Enumeration of joint strategy profiles as integer state indices.
//!
//! Player `i`'s bit is bit `i` of the index, so state 0 is all-zeros and
//! state `2^n - 1` is all-ones. Spin profiles use the same bit encoding
//! (bit 1 = spin +1), keeping one enumeration for every family.

use crate::error::{Error, Result};
use crate::game::{Strategy, StrategyProfile};

/// Largest state count for which full dense matrices are built.
pub const MATRIX_STATE_CAP: usize = 1 << 16;

/// Largest state count for matrix-free distribution evolution.
pub const VECTOR_STATE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSpace {
    n: usize,
    count: usize,
}

impl StateSpace {
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGame("player count must be >= 1".into()));
        }
        if n >= usize::BITS as usize || (1usize << n) > cap {
            return Err(Error::StateSpaceCap { n, cap });
        }
        Ok(StateSpace { n, count: 1 << n })
    }

    pub fn for_matrix(n: usize) -> Result<Self> {
        Self::new(n, MATRIX_STATE_CAP)
    }

    pub fn for_vector(n: usize) -> Result<Self> {
        Self::new(n, VECTOR_STATE_CAP)
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn index_of(&self, profile: &StrategyProfile) -> Result<usize> {
        if profile.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "profile of {} players in space of {}",
                profile.len(),
                self.n
            )));
        }
        Ok(profile
            .bits()
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i)))
    }

    pub fn profile_of(&self, index: usize) -> Result<StrategyProfile> {
        if index >= self.count {
            return Err(Error::DimensionMismatch(format!(
                "state {index} outside 0..{}",
                self.count
            )));
        }
        let bits: Vec<Strategy> = (0..self.n)
            .map(|i| ((index >> i) & 1) as Strategy)
            .collect();
        StrategyProfile::from_bits(&bits)
    }

    /// Number of ones of state `index`.
    pub fn weight(&self, index: usize) -> usize {
        (index & (self.count - 1)).count_ones() as usize
    }

    /// Spin sum of state `index` under the bit-to-spin encoding.
    pub fn magnetization(&self, index: usize) -> i64 {
        2 * self.weight(index) as i64 - self.n as i64
    }
}
