use super::layout::{complement, offsets};
use super::{keep_positions, Register};
use crate::{Error, Result};

/// A state diagonal in some product basis, stored as its probabilities.
///
/// Produced by dephasing; which basis it is diagonal in is the caller's
/// business. Marginals are classical marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    register: Register,
    probs: Vec<f64>,
}

impl DiagonalState {
    pub fn new(register: Register, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: probs.len(),
            });
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(sum));
        }
        Ok(DiagonalState { register, probs })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal distribution on `keep`, subsystems in register order.
    pub fn marginal<L: AsRef<str>>(&self, keep: &[L]) -> Result<Vec<f64>> {
        let kept = keep_positions(&self.register, keep)?;
        let dims = self.register.dims();
        let ko = offsets(&dims, &kept);
        let ro = offsets(&dims, &complement(dims.len(), &kept));
        Ok(ko
            .iter()
            .map(|&a| ro.iter().map(|&r| self.probs[a + r]).sum())
            .collect())
    }
}
