//! Classical digit registers: the same copy / evolve / un-copy scheme on
//! probability distributions, with reversible gates as permutations.

use std::collections::BTreeMap;

use crate::bases::Basis;
use crate::gates::{ChannelSpec, Gate};
use crate::par::Execution;
use crate::protocol::{
    evaluate, FinalState, InputGroup, InputState, Mode, Options, Outcome, Process, ProtocolConfig, Query,
};
use crate::tensor::layout::strides;
use crate::tensor::{DiagonalState, Register};
use crate::{CMatrix, Error, Result, C64};

const PROB_TOL: f64 = 1e-12;

/// Sparse distribution over digit strings of a labeled register.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDist {
    register: Register,
    probs: BTreeMap<Vec<usize>, f64>,
}

impl ClassicalDist {
    /// Zero entries are dropped.
    pub fn new(register: Register, probs: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        let dims = register.dims();
        let mut sum = 0.0;
        for (digits, &p) in &probs {
            if digits.len() != dims.len() {
                return Err(Error::DimensionMismatch {
                    expected: dims.len(),
                    found: digits.len(),
                });
            }
            if let Some((&x, &d)) = digits.iter().zip(&dims).find(|(x, d)| x >= d) {
                return Err(Error::DimensionMismatch { expected: d, found: x });
            }
            if p.is_nan() || p < 0.0 {
                return Err(Error::InvalidDistribution(p));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(sum));
        }
        let probs = probs.into_iter().filter(|(_, p)| *p > 0.0).collect();
        Ok(ClassicalDist { register, probs })
    }

    pub fn deterministic(register: Register, digits: &[usize]) -> Result<Self> {
        ClassicalDist::new(register, BTreeMap::from([(digits.to_vec(), 1.0)]))
    }

    pub fn uniform(register: Register) -> Result<Self> {
        let d = register.dim();
        ClassicalDist::from_dense(register, &vec![1.0 / d as f64; d])
    }

    /// From a dense probability vector in register (row-major) order.
    pub fn from_dense(register: Register, probs: &[f64]) -> Result<Self> {
        if probs.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: probs.len(),
            });
        }
        let dims = register.dims();
        let map = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| (digits_of(i, &dims), p))
            .collect();
        ClassicalDist::new(register, map)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn probabilities(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.probs
    }

    pub fn probability(&self, digits: &[usize]) -> f64 {
        self.probs.get(digits).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let dims = self.register.dims();
        let mut out = vec![0.0; self.register.dim()];
        for (digits, &p) in &self.probs {
            out[index_of(digits, &dims)] += p;
        }
        out
    }

    /// Joint distribution of independent parts, registers concatenated.
    pub fn product(parts: &[ClassicalDist]) -> Result<Self> {
        let (first, rest) = parts.split_first().ok_or(Error::EmptySelection)?;
        let mut acc = first.clone();
        for p in rest {
            let register = acc.register.concat(&p.register)?;
            let mut probs = BTreeMap::new();
            for (a, pa) in &acc.probs {
                for (b, pb) in &p.probs {
                    let mut k = a.clone();
                    k.extend(b);
                    probs.insert(k, pa * pb);
                }
            }
            acc = ClassicalDist { register, probs };
        }
        Ok(acc)
    }

    /// Same distribution with subsystems listed in `order`.
    pub fn reorder<L: AsRef<str>>(&self, order: &[L]) -> Result<Self> {
        let pos = self.register.indices_of(order)?;
        if pos.len() != self.register.len() {
            return Err(Error::InvalidRegister("reorder must name every subsystem".to_string()));
        }
        let register = Register::new(pos.iter().map(|&i| self.register.subsystems()[i].clone()).collect())?;
        let probs = self
            .probs
            .iter()
            .map(|(k, &p)| (pos.iter().map(|&i| k[i]).collect(), p))
            .collect();
        Ok(ClassicalDist { register, probs })
    }

    /// Embedding as a diagonal density matrix in the computational basis.
    pub fn to_density_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.register.dim(),
            self.to_dense().into_iter().map(|p| C64::new(p, 0.0)),
        ))
    }
}

fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
    out
}

fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    strides(dims).iter().zip(digits).map(|(s, x)| s * x).sum()
}

/// Reversible gate as a permutation of the digit strings of `labels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalGate {
    labels: Vec<String>,
    dims: Vec<usize>,
    /// `perm[input] = output`, local row-major indices.
    perm: Vec<usize>,
}

impl ClassicalGate {
    pub fn new(labels: Vec<String>, dims: Vec<usize>, perm: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        let mut hit = vec![false; n];
        if perm.len() != n || labels.len() != dims.len() {
            return Err(Error::NonPermutation);
        }
        for &p in &perm {
            if p >= n || hit[p] {
                return Err(Error::NonPermutation);
            }
            hit[p] = true;
        }
        Ok(ClassicalGate { labels, dims, perm })
    }

    /// Reads the permutation off the gate's matrix; fails unless the matrix
    /// is a 0/1 permutation matrix in the computational basis.
    pub fn from_gate(gate: &Gate, register: &Register) -> Result<Self> {
        let m = gate.matrix(register)?;
        let labels: Vec<String> = gate.labels().iter().map(|l| l.to_string()).collect();
        let dims = labels
            .iter()
            .map(|l| register.get(l).map(|s| s.dim).ok_or_else(|| Error::UnknownLabel(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        let n = m.ncols();
        let mut perm = Vec::with_capacity(n);
        for j in 0..n {
            let mut out = None;
            for i in 0..n {
                let z = m[(i, j)];
                if (z - C64::new(1.0, 0.0)).norm() <= PROB_TOL {
                    if out.is_some() {
                        return Err(Error::NonPermutation);
                    }
                    out = Some(i);
                } else if z.norm() > PROB_TOL {
                    return Err(Error::NonPermutation);
                }
            }
            perm.push(out.ok_or(Error::NonPermutation)?);
        }
        ClassicalGate::new(labels, dims, perm)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn apply(&self, dist: &ClassicalDist) -> Result<ClassicalDist> {
        let pos = dist.register.indices_of(&self.labels)?;
        for (&p, &d) in pos.iter().zip(&self.dims) {
            if dist.register.subsystems()[p].dim != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: dist.register.subsystems()[p].dim,
                });
            }
        }
        let mut probs = BTreeMap::new();
        for (digits, &p) in &dist.probs {
            let local: Vec<usize> = pos.iter().map(|&i| digits[i]).collect();
            let out = digits_of(self.perm[index_of(&local, &self.dims)], &self.dims);
            let mut next = digits.clone();
            for (&i, x) in pos.iter().zip(out) {
                next[i] = x;
            }
            *probs.entry(next).or_insert(0.0) += p;
        }
        Ok(ClassicalDist {
            register: dist.register.clone(),
            probs,
        })
    }
}

/// Every gate of `channel` as a permutation over `register`'s principals.
pub fn channel_gates(channel: &ChannelSpec, register: &Register) -> Result<Vec<ClassicalGate>> {
    channel
        .gates
        .iter()
        .map(|g| ClassicalGate::from_gate(g, register))
        .collect()
}

/// Copy each digit into a zeroed ancilla, apply `channel`, subtract the
/// ancilla from its principal mod d. The result lives on the canonical
/// doubled register `[S1', S1, ...]`.
pub fn classical_final_state(dist: &ClassicalDist, channel: &[ClassicalGate]) -> Result<DiagonalState> {
    let doubled = dist.register.with_ancillas()?;
    let dims = dist.register.dims();
    let mut probs = BTreeMap::new();
    // The ancilla holds the initial digit; pair each string with its image.
    for (digits, &p) in &dist.probs {
        let mut single = ClassicalDist {
            register: dist.register.clone(),
            probs: BTreeMap::from([(digits.clone(), 1.0)]),
        };
        for g in channel {
            single = g.apply(&single)?;
        }
        let out = single.probs.keys().next().cloned().unwrap_or_default();
        let mut key = Vec::with_capacity(2 * dims.len());
        for k in 0..dims.len() {
            key.push(digits[k]);
            key.push((out[k] + dims[k] - digits[k]) % dims[k]);
        }
        *probs.entry(key).or_insert(0.0) += p;
    }
    let full = ClassicalDist {
        register: doubled.clone(),
        probs,
    };
    DiagonalState::new(doubled, full.to_dense())
}

/// Shannon `I(target : source' source | target' given' given)` after the
/// classical scheme.
pub fn run_classical_protocol(dist: &ClassicalDist, channel: &[ClassicalGate], query: &Query) -> Result<f64> {
    let fin = classical_final_state(dist, channel)?;
    let src: Vec<&str> = query.source.iter().map(String::as_str).collect();
    let tgt: Vec<&str> = query.target.iter().map(String::as_str).collect();
    let given: Vec<&str> = query.given.iter().map(String::as_str).collect();
    Ok(evaluate(&fin, &src, &tgt, &given, Execution::Sequential)?.value)
}

/// The quantum scheme with STEP 4 on `dist` embedded as a diagonal state.
pub fn quantum_classical_owi(
    dist: &ClassicalDist,
    channel: &ChannelSpec,
    query: &Query,
    options: &Options,
) -> Result<f64> {
    let labels = dist.register.labels();
    let process = Process::new(
        dist.register.clone(),
        vec![InputGroup::mixed(&labels, dist.to_density_matrix())],
        channel.clone(),
    )
    .with_mode(Mode::QuantumProject)
    .with_query(query.clone());
    Ok(process.run(options)?[0].value)
}

/// Distribution of an input group that is diagonal in the computational
/// basis.
fn group_distribution(register: Register, state: &InputState) -> Result<ClassicalDist> {
    let probs: Vec<f64> = match state {
        InputState::Pure(v) => {
            let p: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
            if p.iter().filter(|&&x| x > PROB_TOL).count() != 1 {
                return Err(Error::Unsupported(
                    "classical mode needs computational basis states".to_string(),
                ));
            }
            p
        }
        InputState::Mixed(m) => {
            let d = m.nrows();
            if (0..d).any(|i| (0..d).any(|j| i != j && m[(i, j)].norm() > 1e-10)) {
                return Err(Error::Unsupported(
                    "classical mode needs diagonal input states".to_string(),
                ));
            }
            m.diagonal().iter().map(|z| z.re).collect()
        }
    };
    let total: f64 = probs.iter().sum();
    ClassicalDist::from_dense(register, &probs.iter().map(|p| p / total).collect::<Vec<_>>())
}

pub(crate) fn execute_process(process: &Process) -> Result<Outcome> {
    let principals = &process.principals;
    for (label, b) in process.ref_bases.iter().chain(&process.copy_bases) {
        if !b.same_up_to_phases(&Basis::computational(b.dim())?, 1e-12) {
            return Err(Error::Unsupported(format!(
                "classical mode works in the computational basis ({label})"
            )));
        }
    }
    let mut parts = Vec::with_capacity(process.inputs.len());
    let mut seen = 0;
    for g in &process.inputs {
        let subs = g
            .labels
            .iter()
            .map(|l| {
                principals
                    .get(l)
                    .cloned()
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        seen += subs.len();
        parts.push(group_distribution(Register::new(subs)?, &g.state)?);
    }
    let joint = ClassicalDist::product(&parts)?;
    if seen != principals.len() {
        let missing = principals
            .labels()
            .into_iter()
            .find(|l| !joint.register.contains(l))
            .unwrap_or_default();
        return Err(Error::MissingInput(missing.to_string()));
    }
    let joint = joint.reorder(&principals.labels())?;
    let gates = channel_gates(&process.channel, principals)?;
    let fin = classical_final_state(&joint, &gates)?;
    let mut config = ProtocolConfig {
        copy_bases: BTreeMap::new(),
        ref_bases: BTreeMap::new(),
        mode: Mode::Classical,
    };
    for s in principals.principals_iter() {
        config.copy_bases.insert(s.label.clone(), Basis::computational(s.dim)?);
        config.ref_bases.insert(s.label.clone(), Basis::computational(s.dim)?);
    }
    let input = DiagonalState::new(principals.clone(), joint.to_dense())?;
    Ok(Outcome::new(FinalState::Diagonal(fin), Some(input.into()), config, Vec::new()))
}
