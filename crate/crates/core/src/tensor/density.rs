use std::collections::BTreeMap;

use super::eig::{eig_hermitian, eigenvalues_unchecked};
use super::layout::{complement, offsets, permutation_map};
use super::{hermiticity_deviation, keep_positions, permutation_positions, unitary_pattern};
use super::{PureState, Register, Subsystem};
use crate::bases::Basis;
use crate::par::{self, Execution};
use crate::{CMatrix, CVector, Error, Result, C64, EIGEN_CLAMP_TOL, VALIDITY_TOL};

/// Density operator on a register: Hermitian, unit trace, positive
/// semidefinite up to [`EIGEN_CLAMP_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    register: Register,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(register: Register, matrix: CMatrix) -> Result<Self> {
        let rho = DensityOperator { register, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(register: Register, matrix: CMatrix) -> Self {
        DensityOperator { register, matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.to_density()
    }

    pub fn maximally_mixed(register: Register) -> Self {
        let d = register.dim();
        DensityOperator {
            register,
            matrix: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    /// Diagonal state with the given probabilities in the product
    /// computational basis.
    pub fn from_probabilities(register: Register, probs: &[f64]) -> Result<Self> {
        if probs.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: probs.len(),
            });
        }
        let diag = CVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
        DensityOperator::new(register, CMatrix::from_diagonal(&diag))
    }

    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        let d = self.register.dim();
        if self.matrix.nrows() != d || self.matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.matrix.nrows(),
            });
        }
        let dev = hermiticity_deviation(&self.matrix);
        if dev > VALIDITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        self.spectrum().map(|_| ())
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues, descending, with small negatives clamped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        clamp_spectrum(eigenvalues_unchecked(&self.matrix))
    }

    pub fn tensor(parts: &[DensityOperator]) -> Result<DensityOperator> {
        let Some((first, rest)) = parts.split_first() else {
            return Err(Error::EmptySelection);
        };
        let mut register = first.register.clone();
        let mut m = first.matrix.clone();
        for p in rest {
            register = register.concat(&p.register)?;
            m = m.kronecker(&p.matrix);
        }
        Ok(DensityOperator { register, matrix: m })
    }

    /// `rho -> G rho G^dagger` with `G` the embedding of `u` on `labels`.
    pub fn apply_unitary<L: AsRef<str>>(&self, u: &CMatrix, labels: &[L]) -> Result<Self> {
        self.apply_unitary_with(Execution::default(), u, labels)
    }

    pub fn apply_unitary_with<L: AsRef<str>>(
        &self,
        exec: Execution,
        u: &CMatrix,
        labels: &[L],
    ) -> Result<Self> {
        let pattern = unitary_pattern(&self.register, u, labels)?;
        let d = self.dim();
        // G rho, column by column; then (G (G rho)^dagger)^dagger.
        let mut a = self.matrix.clone();
        par::for_each_chunk_mut(exec, a.as_mut_slice(), d, |col| pattern.apply(u, col));
        let mut b = a.adjoint();
        par::for_each_chunk_mut(exec, b.as_mut_slice(), d, |col| pattern.apply(u, col));
        Ok(DensityOperator {
            register: self.register.clone(),
            matrix: b.adjoint(),
        })
    }

    /// Reduced operator on `keep`, subsystems in register order.
    pub fn partial_trace<L: AsRef<str>>(&self, keep: &[L]) -> Result<DensityOperator> {
        let kept = keep_positions(&self.register, keep)?;
        let dims = self.register.dims();
        let ko = offsets(&dims, &kept);
        let to = offsets(&dims, &complement(dims.len(), &kept));
        let m = CMatrix::from_fn(ko.len(), ko.len(), |a, b| {
            to.iter()
                .map(|&t| self.matrix[(ko[a] + t, ko[b] + t)])
                .sum()
        });
        Ok(DensityOperator {
            register: self.register.select(&kept),
            matrix: m,
        })
    }

    pub fn permute<L: AsRef<str>>(&self, order: &[L]) -> Result<DensityOperator> {
        let pos = permutation_positions(&self.register, order)?;
        let map = permutation_map(&self.register.dims(), &pos);
        let n = map.len();
        let m = CMatrix::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        Ok(DensityOperator {
            register: self.register.select(&pos),
            matrix: m,
        })
    }

    /// Zero every off-diagonal element in the product of `bases` (one per
    /// register label); probabilities in that basis are preserved.
    pub fn dephase(&self, bases: &BTreeMap<String, Basis>) -> Result<DensityOperator> {
        let mut rotated = self.clone();
        for s in self.register.subsystems() {
            let b = bases
                .get(&s.label)
                .ok_or_else(|| Error::MissingBasis(s.label.clone()))?;
            if b.dim() != s.dim {
                return Err(Error::DimensionMismatch {
                    expected: s.dim,
                    found: b.dim(),
                });
            }
            rotated = rotated.apply_unitary(&b.columns().adjoint(), &[s.label.as_str()])?;
        }
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                if i != j {
                    rotated.matrix[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        for s in self.register.subsystems() {
            rotated = rotated.apply_unitary(bases[&s.label].columns(), &[s.label.as_str()])?;
        }
        Ok(rotated)
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, psi: &PureState) -> Result<f64> {
        if &self.register != psi.register() {
            return Err(Error::InvalidRegister("registers differ".into()));
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }

    /// Purification `sum_k sqrt(p_k) |v_k>|k>_env` with an environment of
    /// dimension equal to the rank (at least 2).
    pub fn purify(&self, env_label: &str) -> Result<PureState> {
        let eig = eig_hermitian(&self.matrix)?;
        let values = clamp_spectrum(eig.values.clone())?;
        let rank = values.iter().filter(|&&p| p > 1e-13).count().max(2);
        let register = self
            .register
            .concat(&Register::new(vec![Subsystem::environment(env_label, rank)])?)?;
        let d = self.dim();
        let mut amps = CVector::zeros(d * rank);
        for (k, &p) in values.iter().enumerate().take(rank) {
            let w = p.sqrt();
            for i in 0..d {
                amps[i * rank + k] = eig.vectors[(i, k)] * w;
            }
        }
        let norm = amps.norm();
        amps /= C64::new(norm, 0.0);
        PureState::new(register, amps)
    }
}

pub(crate) fn clamp_spectrum(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for v in values.iter_mut() {
        if *v < -EIGEN_CLAMP_TOL {
            return Err(Error::NegativeEigenvalue(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(values)
}
