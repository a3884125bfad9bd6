use std::collections::BTreeMap;

use super::layout::{complement, offsets, permutation_map};
use super::{keep_positions, permutation_positions, unitary_pattern, DensityOperator, DiagonalState};
use super::{Register, Role};
use crate::bases::Basis;
use crate::par::Execution;
use crate::{CMatrix, CVector, Error, Result, C64, VALIDITY_TOL};

/// Normalized state vector on a register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Register,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(register: Register, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { register, amplitudes })
    }

    /// Product basis state with one digit per subsystem.
    pub fn basis_state(register: Register, digits: &[usize]) -> Result<Self> {
        if digits.len() != register.len() {
            return Err(Error::DimensionMismatch {
                expected: register.len(),
                found: digits.len(),
            });
        }
        let mut index = 0;
        for (s, &d) in register.subsystems().iter().zip(digits) {
            if d >= s.dim {
                return Err(Error::DimensionMismatch {
                    expected: s.dim,
                    found: d,
                });
            }
            index = index * s.dim + d;
        }
        let mut amps = CVector::zeros(register.dim());
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { register, amplitudes: amps })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Kronecker product; the register is the concatenation of the parts.
    pub fn tensor(parts: &[PureState]) -> Result<PureState> {
        let Some((first, rest)) = parts.split_first() else {
            return Err(Error::EmptySelection);
        };
        let mut register = first.register.clone();
        let mut amps = first.amplitudes.clone();
        for p in rest {
            register = register.concat(&p.register)?;
            amps = amps.kronecker(&p.amplitudes);
        }
        Ok(PureState { register, amplitudes: amps })
    }

    /// `v -> G v` with `G` the embedding of `u` on `labels` (in that order).
    pub fn apply_unitary<L: AsRef<str>>(&self, u: &CMatrix, labels: &[L]) -> Result<PureState> {
        self.apply_unitary_with(Execution::Sequential, u, labels)
    }

    pub fn apply_unitary_with<L: AsRef<str>>(
        &self,
        exec: Execution,
        u: &CMatrix,
        labels: &[L],
    ) -> Result<PureState> {
        let pattern = unitary_pattern(&self.register, u, labels)?;
        let mut amps = self.amplitudes.clone();
        pattern.apply_with(exec, u, amps.as_mut_slice());
        Ok(PureState {
            register: self.register.clone(),
            amplitudes: amps,
        })
    }

    /// Reorder subsystems; `order` must name every label once.
    pub fn permute<L: AsRef<str>>(&self, order: &[L]) -> Result<PureState> {
        let pos = permutation_positions(&self.register, order)?;
        let map = permutation_map(&self.register.dims(), &pos);
        let amps = CVector::from_iterator(map.len(), map.iter().map(|&old| self.amplitudes[old]));
        Ok(PureState {
            register: self.register.select(&pos),
            amplitudes: amps,
        })
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(
            self.register.clone(),
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }

    /// Coefficient matrix `M[kept, rest]` for the cut `keep : rest`.
    fn cut_matrix(&self, kept: &[usize]) -> CMatrix {
        let dims = self.register.dims();
        let rest = complement(dims.len(), kept);
        let ko = offsets(&dims, kept);
        let ro = offsets(&dims, &rest);
        CMatrix::from_fn(ko.len(), ro.len(), |a, r| self.amplitudes[ko[a] + ro[r]])
    }

    /// Reduced state on `keep`, subsystems in register order.
    pub fn partial_trace<L: AsRef<str>>(&self, keep: &[L]) -> Result<DensityOperator> {
        let kept = keep_positions(&self.register, keep)?;
        let m = self.cut_matrix(&kept);
        Ok(DensityOperator::from_parts_unchecked(
            self.register.select(&kept),
            &m * m.adjoint(),
        ))
    }

    /// Gram matrix on the smaller side of the cut `keep : rest`; its
    /// spectrum equals the nonzero spectrum of the reduced state on `keep`.
    pub(crate) fn schmidt_gram<L: AsRef<str>>(&self, keep: &[L]) -> Result<CMatrix> {
        let kept = keep_positions(&self.register, keep)?;
        let m = self.cut_matrix(&kept);
        Ok(if m.nrows() <= m.ncols() {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        })
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.register != other.register {
            return Err(Error::InvalidRegister("registers differ".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Measurement statistics in the product of `bases`; environment
    /// subsystems are summed over and need no basis.
    pub fn dephase(&self, bases: &BTreeMap<String, Basis>) -> Result<DiagonalState> {
        let mut rotated = self.clone();
        let mut kept = Vec::new();
        for (i, s) in self.register.subsystems().iter().enumerate() {
            if s.role == Role::Environment {
                continue;
            }
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
            kept.push(i);
        }
        let dims = self.register.dims();
        let rest = complement(dims.len(), &kept);
        let ko = offsets(&dims, &kept);
        let ro = offsets(&dims, &rest);
        let probs = ko
            .iter()
            .map(|&a| ro.iter().map(|&r| rotated.amplitudes[a + r].norm_sqr()).sum())
            .collect();
        DiagonalState::new(self.register.select(&kept), probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubits(labels: &[&str]) -> Register {
        Register::principals(&labels.iter().map(|l| (*l, 2)).collect::<Vec<_>>()).unwrap()
    }

    fn plus(label: &str) -> PureState {
        let s = FRAC_1_SQRT_2;
        PureState::new(qubits(&[label]), CVector::from_vec(vec![C64::new(s, 0.0); 2])).unwrap()
    }

    #[test]
    fn tensor_of_zeros() {
        let a = PureState::basis_state(qubits(&["A"]), &[0]).unwrap();
        let b = PureState::basis_state(qubits(&["B"]), &[0]).unwrap();
        let ab = PureState::tensor(&[a, b]).unwrap();
        assert_eq!(ab, PureState::basis_state(qubits(&["A", "B"]), &[0, 0]).unwrap());
    }

    #[test]
    fn tensor_plus_zero() {
        let b = PureState::basis_state(qubits(&["B"]), &[0]).unwrap();
        let ab = PureState::tensor(&[plus("A"), b]).unwrap();
        let expect = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
        for (z, e) in ab.amplitudes().iter().zip(expect) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_rejects_duplicate_label() {
        let err = PureState::tensor(&[plus("A"), plus("A")]).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("A".into()));
    }

    #[test]
    fn unnormalized_rejected() {
        let r = qubits(&["A"]);
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0); 2]);
        assert!(matches!(PureState::new(r, v), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn bit_flip_on_second_qubit() {
        let x = crate::gates::standard(crate::gates::StandardGate::X, 2).unwrap();
        let s = PureState::basis_state(qubits(&["A", "B"]), &[1, 0]).unwrap();
        let out = s.apply_unitary(&x, &["B"]).unwrap();
        assert_eq!(out, PureState::basis_state(qubits(&["A", "B"]), &[1, 1]).unwrap());
    }

    #[test]
    fn label_order_of_the_operator_matters() {
        let cnot = crate::gates::cnot(2);
        let s = PureState::basis_state(qubits(&["A", "B"]), &[0, 1]).unwrap();
        // control B, target A
        let out = s.apply_unitary(&cnot, &["B", "A"]).unwrap();
        assert_eq!(out, PureState::basis_state(qubits(&["A", "B"]), &[1, 1]).unwrap());
    }

    #[test]
    fn rejects_non_unitary_and_unknown_labels() {
        let s = plus("A");
        let m = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(s.apply_unitary(&m, &["A"]), Err(Error::NotUnitary(_))));
        let id = CMatrix::identity(2, 2);
        assert_eq!(
            s.apply_unitary(&id, &["Q"]).unwrap_err(),
            Error::UnknownLabel("Q".into())
        );
    }

    #[test]
    fn permute_moves_amplitudes() {
        let s = PureState::basis_state(qubits(&["A", "B", "C"]), &[1, 0, 0]).unwrap();
        let p = s.permute(&["C", "A", "B"]).unwrap();
        assert_eq!(p.register().labels(), vec!["C", "A", "B"]);
        assert_eq!(p, PureState::basis_state(p.register().clone(), &[0, 1, 0]).unwrap());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]);
        let bell = PureState::new(qubits(&["A", "B"]), v).unwrap();
        let a = bell.partial_trace(&["A"]).unwrap();
        assert!((a.matrix() - CMatrix::identity(2, 2) * C64::new(0.5, 0.0)).norm() < 1e-15);
    }
}
