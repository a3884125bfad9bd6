use std::collections::HashSet;

use crate::{Error, Result};

/// What a subsystem is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// A system the channel acts on.
    Principal,
    /// The primed copy partner of a principal.
    Ancilla,
    /// A purifying reference for a mixed input; never queried.
    Environment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
    pub role: Role,
    pub paired_with: Option<String>,
}

impl Subsystem {
    pub fn principal(label: impl Into<String>, dim: usize) -> Self {
        Subsystem {
            label: label.into(),
            dim,
            role: Role::Principal,
            paired_with: None,
        }
    }

    /// The ancilla `S'` paired with principal `S`.
    pub fn ancilla_of(principal: &Subsystem) -> Self {
        Subsystem {
            label: ancilla_label(&principal.label),
            dim: principal.dim,
            role: Role::Ancilla,
            paired_with: Some(principal.label.clone()),
        }
    }

    pub fn environment(label: impl Into<String>, dim: usize) -> Self {
        Subsystem {
            label: label.into(),
            dim,
            role: Role::Environment,
            paired_with: None,
        }
    }
}

/// Label of the ancilla paired with `principal`.
pub fn ancilla_label(principal: &str) -> String {
    format!("{principal}'")
}

/// Ordered, labeled collection of subsystems.
///
/// Labels are unique. An ancilla whose partner is present must match the
/// partner's dimension, and no principal has two ancillas. Marginal
/// registers may hold an ancilla without its partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    subsystems: Vec<Subsystem>,
}

impl Register {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &subsystems {
            if s.dim < 2 {
                return Err(Error::InvalidDimension(s.dim));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        let mut paired = HashSet::new();
        for s in &subsystems {
            match (s.role, &s.paired_with) {
                (Role::Ancilla, None) => {
                    return Err(Error::InvalidRegister(format!(
                        "ancilla `{}` has no partner",
                        s.label
                    )))
                }
                (Role::Ancilla, Some(p)) => {
                    if !paired.insert(p.as_str()) {
                        return Err(Error::InvalidRegister(format!(
                            "principal `{p}` has two ancillas"
                        )));
                    }
                    if let Some(partner) = subsystems.iter().find(|q| &q.label == p) {
                        if partner.role != Role::Principal {
                            return Err(Error::InvalidRegister(format!(
                                "ancilla `{}` is paired with non-principal `{p}`",
                                s.label
                            )));
                        }
                        if partner.dim != s.dim {
                            return Err(Error::DimensionMismatch {
                                expected: partner.dim,
                                found: s.dim,
                            });
                        }
                    }
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidRegister(format!(
                        "only ancillas can be paired (`{}`)",
                        s.label
                    )))
                }
                _ => {}
            }
        }
        Ok(Register { subsystems })
    }

    /// Register of principal systems only, in the given order.
    pub fn principals<L: AsRef<str>>(decls: &[(L, usize)]) -> Result<Self> {
        Register::new(
            decls
                .iter()
                .map(|(l, d)| Subsystem::principal(l.as_ref(), *d))
                .collect(),
        )
    }

    /// Canonical doubled register `[S1', S1, S2', S2, ...]` followed by any
    /// environment subsystems. Fails if ancillas are already attached.
    pub fn with_ancillas(&self) -> Result<Register> {
        let mut out = Vec::with_capacity(2 * self.subsystems.len());
        for s in &self.subsystems {
            if s.role == Role::Principal {
                out.push(Subsystem::ancilla_of(s));
                out.push(s.clone());
            } else if s.role == Role::Ancilla {
                return Err(Error::InvalidRegister(
                    "ancillas already attached".to_string(),
                ));
            }
        }
        out.extend(
            self.subsystems
                .iter()
                .filter(|s| s.role == Role::Environment)
                .cloned(),
        );
        Register::new(out)
    }

    /// True when every principal has its ancilla present.
    pub fn is_doubled(&self) -> bool {
        self.principals_iter().all(|p| {
            self.subsystems
                .iter()
                .any(|s| s.paired_with.as_deref() == Some(p.label.as_str()))
        }) && self.principals_iter().next().is_some()
    }

    pub fn concat(&self, other: &Register) -> Result<Register> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        Register::new(subs)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn get(&self, label: &str) -> Option<&Subsystem> {
        self.subsystems.iter().find(|s| s.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.get(label).is_some()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Positions of `labels`, in the order given. Rejects repeats.
    pub fn indices_of<L: AsRef<str>>(&self, labels: &[L]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.index_of(l.as_ref())?;
            if out.contains(&i) {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Sub-register made of `positions`, in the order given.
    pub(crate) fn select(&self, positions: &[usize]) -> Register {
        Register {
            subsystems: positions
                .iter()
                .map(|&i| self.subsystems[i].clone())
                .collect(),
        }
    }

    pub fn principals_iter(&self) -> impl Iterator<Item = &Subsystem> {
        self.subsystems.iter().filter(|s| s.role == Role::Principal)
    }

    pub fn principal_labels(&self) -> Vec<&str> {
        self.principals_iter().map(|s| s.label.as_str()).collect()
    }

    /// Dimension of the doubled principal-plus-ancilla space.
    pub fn doubled_dim(&self) -> usize {
        self.principals_iter().map(|s| s.dim * s.dim).product()
    }
}
