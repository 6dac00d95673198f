use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{outer_basis, ComplexMatrix};

/// Rates of one level pair m < n of a single subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRates {
    pub lower: usize,
    pub upper: usize,
    /// Γ⁺, attached to σ⁺ = |n⟩⟨m|.
    pub up: f64,
    /// Γ⁻, attached to σ⁻ = |m⟩⟨n|.
    pub down: f64,
    /// γ, attached to σᶻ = |m⟩⟨m| − |n⟩⟨n|.
    pub dephasing: f64,
}

impl TransitionRates {
    /// Jump operators paired with their rates: (σ⁺, Γ⁺), (σ⁻, Γ⁻), (σᶻ, γ).
    pub fn jump_operators(&self, levels: usize) -> [(ComplexMatrix, f64); 3] {
        let (m, n) = (self.lower, self.upper);
        [
            (outer_basis(levels, n, m), self.up),
            (outer_basis(levels, m, n), self.down),
            (outer_basis(levels, m, m) - outer_basis(levels, n, n), self.dephasing),
        ]
    }
}

/// Lindblad rate table of one subsystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalRates {
    pub levels: usize,
    pub transitions: Vec<TransitionRates>,
}

impl LocalRates {
    /// Every pair m < n present with zero rates.
    pub fn zero(levels: usize) -> Self {
        Self::uniform(levels, 0.0, 0.0, 0.0)
    }

    pub fn uniform(levels: usize, up: f64, down: f64, dephasing: f64) -> Self {
        let mut transitions = Vec::new();
        for lower in 0..levels {
            for upper in lower + 1..levels {
                transitions.push(TransitionRates { lower, upper, up, down, dephasing });
            }
        }
        Self { levels, transitions }
    }

    pub fn get(&self, lower: usize, upper: usize) -> Option<&TransitionRates> {
        self.transitions.iter().find(|t| t.lower == lower && t.upper == upper)
    }

    pub fn get_mut(&mut self, lower: usize, upper: usize) -> Option<&mut TransitionRates> {
        self.transitions.iter_mut().find(|t| t.lower == lower && t.upper == upper)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.transitions {
            if t.lower >= t.upper || t.upper >= self.levels {
                return Err(Error::InvalidParameter(format!(
                    "transition ({}, {}) invalid for {} levels",
                    t.lower, t.upper, self.levels
                )));
            }
            for (name, v) in [("up", t.up), ("down", t.down), ("dephasing", t.dephasing)] {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} rate of transition ({}, {}) is {v}",
                        t.lower, t.upper
                    )));
                }
            }
        }
        Ok(())
    }
}
