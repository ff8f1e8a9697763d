use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// Geometric level hierarchy `N_ℓ = N₀·2^ℓ`, `ℓ = 0, …, L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelHierarchy {
    n0: usize,
    max_level: usize,
    lambda_t: f64,
}

impl LevelHierarchy {
    pub fn new(h: &Hamiltonian, t: f64, n0: usize, max_level: usize) -> Result<Self> {
        Self::from_lambda_t(h.one_norm() * t, n0, max_level)
    }

    pub fn from_lambda_t(lambda_t: f64, n0: usize, max_level: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidArgument("N₀ must be at least 1".into()));
        }
        if max_level >= 40 || (n0 as u128) << max_level > u64::MAX as u128 {
            return Err(Error::InvalidArgument(format!(
                "level {max_level} overflows the gate count"
            )));
        }
        if !(lambda_t > 0.0) || !lambda_t.is_finite() {
            return Err(Error::InvalidArgument(format!("λt must be positive, got {lambda_t}")));
        }
        Ok(Self {
            n0,
            max_level,
            lambda_t,
        })
    }

    pub fn with_max_level(self, max_level: usize) -> Result<Self> {
        Self::from_lambda_t(self.lambda_t, self.n0, max_level)
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Finest level `L`.
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn num_levels(&self) -> usize {
        self.max_level + 1
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda_t
    }

    /// `N_ℓ = N₀·2^ℓ`.
    pub fn gates(&self, level: usize) -> usize {
        self.n0 << level
    }

    /// `τ_ℓ = λt/N_ℓ`.
    pub fn tau(&self, level: usize) -> f64 {
        self.lambda_t / self.gates(level) as f64
    }

    /// `K_ℓ = N_{ℓ−1}`, the number of coarse blocks of a correction sample.
    pub fn coarse_blocks(&self, level: usize) -> usize {
        debug_assert!(level >= 1);
        self.gates(level - 1)
    }

    /// Gates per sample: `N₀` at level 0, `N_ℓ + N_{ℓ−1}` above.
    pub fn cost(&self, level: usize) -> u64 {
        if level == 0 {
            self.n0 as u64
        } else {
            (self.gates(level) + self.gates(level - 1)) as u64
        }
    }

    pub fn costs(&self) -> Vec<u64> {
        (0..=self.max_level).map(|l| self.cost(l)).collect()
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level > self.max_level {
            return Err(Error::InvalidArgument(format!(
                "level {level} exceeds finest level {}",
                self.max_level
            )));
        }
        Ok(())
    }
}
