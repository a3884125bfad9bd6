//! Entropic functionals in bits.
//!
//! Everything is expressed through marginal entropies `S(X)` of label
//! subsets, so the same code serves density operators, state vectors (via
//! the Schmidt cut) and dephased, diagonal states.

use std::collections::BTreeMap;

use crate::par::{self, Execution};
use crate::tensor::eig::eigenvalues_unchecked;
use crate::tensor::{DensityOperator, DiagonalState, PureState, Register};
use crate::{Error, Result, CMI_FLOOR, EIGEN_CLAMP_TOL};

/// A state whose marginal entropies can be evaluated.
pub trait Marginals {
    fn register(&self) -> &Register;

    /// `S(X)` in bits for the subsystems `labels`; zero for the empty set.
    fn marginal_entropy(&self, labels: &[&str]) -> Result<f64>;
}

/// `-sum p log2 p` over a spectrum, clamping round-off negatives.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -EIGEN_CLAMP_TOL {
            return Err(Error::NegativeEigenvalue(v));
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Shannon entropy in bits; `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    entropy_of_spectrum(&rho.spectrum()?)
}

impl Marginals for DensityOperator {
    fn register(&self) -> &Register {
        DensityOperator::register(self)
    }

    fn marginal_entropy(&self, labels: &[&str]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        if labels.len() == self.register().len() {
            self.register().indices_of(labels)?;
            return von_neumann_entropy(self);
        }
        von_neumann_entropy(&self.partial_trace(labels)?)
    }
}

impl Marginals for PureState {
    fn register(&self) -> &Register {
        PureState::register(self)
    }

    fn marginal_entropy(&self, labels: &[&str]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        if labels.len() == self.register().len() {
            self.register().indices_of(labels)?;
            return Ok(0.0);
        }
        entropy_of_spectrum(&eigenvalues_unchecked(&self.schmidt_gram(labels)?))
    }
}

impl Marginals for DiagonalState {
    fn register(&self) -> &Register {
        DiagonalState::register(self)
    }

    fn marginal_entropy(&self, labels: &[&str]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        Ok(shannon_entropy(&self.marginal(labels)?))
    }
}

fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(l) = a.iter().find(|l| b.contains(l)) {
                return Err(Error::OverlappingSets(l.to_string()));
            }
        }
    }
    Ok(())
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// `I(a:b) = S(a) + S(b) - S(ab)`.
pub fn mutual_information<M: Marginals + ?Sized>(state: &M, alpha: &[&str], beta: &[&str]) -> Result<f64> {
    if alpha.is_empty() || beta.is_empty() {
        return Err(Error::EmptySelection);
    }
    check_disjoint(&[alpha, beta])?;
    Ok(state.marginal_entropy(alpha)? + state.marginal_entropy(beta)?
        - state.marginal_entropy(&union(&[alpha, beta]))?)
}

/// `I(a:g|b) = I(a:bg) - I(a:b)`; `beta` may be empty.
pub fn conditional_mutual_information<M: Marginals + ?Sized>(
    state: &M,
    alpha: &[&str],
    gamma: &[&str],
    beta: &[&str],
) -> Result<f64> {
    if alpha.is_empty() || gamma.is_empty() {
        return Err(Error::EmptySelection);
    }
    check_disjoint(&[alpha, gamma, beta])?;
    let mut table = EntropyTable::default();
    for set in cmi_subsets(alpha, gamma, beta) {
        let e = state.marginal_entropy(&set)?;
        table.insert(state.register(), &set, e)?;
    }
    table.cmi(state.register(), alpha, gamma, beta)
}

/// Every subset whose entropy enters `I(a:bg) - I(a:b)`.
pub fn cmi_subsets<'a>(alpha: &[&'a str], gamma: &[&'a str], beta: &[&'a str]) -> Vec<Vec<&'a str>> {
    let mut out = vec![
        alpha.to_vec(),
        union(&[beta, gamma]),
        union(&[alpha, beta, gamma]),
    ];
    if !beta.is_empty() {
        out.push(beta.to_vec());
        out.push(union(&[alpha, beta]));
    }
    out
}

/// Memoized marginal entropies keyed by subsystem positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyTable {
    values: BTreeMap<Vec<usize>, f64>,
}

fn key(register: &Register, labels: &[&str]) -> Result<Vec<usize>> {
    let mut k = register.indices_of(labels)?;
    k.sort_unstable();
    Ok(k)
}

impl EntropyTable {
    /// Evaluate every subset in `subsets` (deduplicated) under `exec`.
    pub fn compute<M>(state: &M, subsets: &[Vec<&str>], exec: Execution) -> Result<Self>
    where
        M: Marginals + Sync + ?Sized,
    {
        let mut keys: Vec<Vec<usize>> = Vec::new();
        for s in subsets {
            let k = key(state.register(), s)?;
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let register = state.register();
        let values = par::try_map(exec, &keys, |k| {
            let labels: Vec<&str> = k
                .iter()
                .map(|&i| register.subsystems()[i].label.as_str())
                .collect();
            state.marginal_entropy(&labels)
        })?;
        Ok(EntropyTable {
            values: keys.into_iter().zip(values).collect(),
        })
    }

    pub fn insert(&mut self, register: &Register, labels: &[&str], value: f64) -> Result<()> {
        self.values.insert(key(register, labels)?, value);
        Ok(())
    }

    pub fn get(&self, register: &Register, labels: &[&str]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        let k = key(register, labels)?;
        self.values
            .get(&k)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(format!("no cached entropy for {labels:?}")))
    }

    /// CMI from cached entropies; fails below [`CMI_FLOOR`].
    pub fn cmi(&self, register: &Register, alpha: &[&str], gamma: &[&str], beta: &[&str]) -> Result<f64> {
        let s = |set: &[&str]| self.get(register, set);
        let i_a_bg = s(alpha)? + s(&union(&[beta, gamma]))? - s(&union(&[alpha, beta, gamma]))?;
        let i_a_b = if beta.is_empty() {
            0.0
        } else {
            s(alpha)? + s(beta)? - s(&union(&[alpha, beta]))?
        };
        let v = i_a_bg - i_a_b;
        if v < CMI_FLOOR {
            return Err(Error::NegativeCmi(v));
        }
        Ok(v)
    }

    /// Entries as `(label set in register order, bits)`.
    pub fn entries<'r>(&self, register: &'r Register) -> Vec<(Vec<&'r str>, f64)> {
        self.values
            .iter()
            .map(|(k, &v)| {
                (
                    k.iter()
                        .map(|&i| register.subsystems()[i].label.as_str())
                        .collect(),
                    v,
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, CVector, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn reg(labels: &[&str]) -> Register {
        Register::principals(&labels.iter().map(|l| (*l, 2)).collect::<Vec<_>>()).unwrap()
    }

    fn diag(labels: &[&str], p: &[f64]) -> DensityOperator {
        DensityOperator::from_probabilities(reg(labels), p).unwrap()
    }

    fn bell() -> PureState {
        let s = FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        PureState::new(reg(&["A", "B"]), CVector::from_vec(vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)]))
            .unwrap()
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        let plus = DensityOperator::new(reg(&["A"]), CMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap();
        assert!(von_neumann_entropy(&plus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn half_identity_is_one_bit() {
        assert!((von_neumann_entropy(&diag(&["A"], &[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_quarter() {
        let closed = 2.0 - 0.75 * 3f64.log2();
        assert!((closed - 0.811278).abs() < 1e-6);
        assert!((von_neumann_entropy(&diag(&["A"], &[0.75, 0.25])).unwrap() - closed).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let rho = diag(&["A", "B"], &[0.375, 0.125, 0.375, 0.125]);
        assert!(mutual_information(&rho, &["A"], &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_pair_carries_two_bits() {
        let b = bell();
        assert!((mutual_information(&b, &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        assert!((mutual_information(&b.to_density(), &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classical_correlation_is_one_bit() {
        let rho = diag(&["A", "B"], &[0.5, 0.0, 0.0, 0.5]);
        assert!((mutual_information(&rho, &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_cmi_is_zero() {
        let rho = DensityOperator::tensor(&[
            diag(&["A"], &[0.3, 0.7]),
            diag(&["B"], &[0.6, 0.4]),
            diag(&["C"], &[0.9, 0.1]),
        ])
        .unwrap();
        assert!(conditional_mutual_information(&rho, &["A"], &["C"], &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let rho = diag(&["A", "B"], &[0.25; 4]);
        assert_eq!(
            mutual_information(&rho, &["A"], &["A"]).unwrap_err(),
            Error::OverlappingSets("A".into())
        );
        assert!(conditional_mutual_information(&rho, &["A"], &["B"], &["B"]).is_err());
    }

    #[test]
    fn diagonal_state_matches_density() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let rho = diag(&["A", "B"], &p);
        let dstate = DiagonalState::new(reg(&["A", "B"]), p.to_vec()).unwrap();
        for set in [vec!["A"], vec!["B"], vec!["A", "B"]] {
            let a = rho.marginal_entropy(&set).unwrap();
            let b = dstate.marginal_entropy(&set).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn table_is_parallel_invariant() {
        let rho = diag(&["A", "B"], &[0.1, 0.2, 0.3, 0.4]);
        let subsets = vec![vec!["A"], vec!["B"], vec!["B", "A"], vec!["A"]];
        let a = EntropyTable::compute(&rho, &subsets, Execution::Parallel).unwrap();
        let b = EntropyTable::compute(&rho, &subsets, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries(rho.register()).len(), 3);
    }
}
