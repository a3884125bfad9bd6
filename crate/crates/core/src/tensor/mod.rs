//! Labeled multi-subsystem dense linear algebra.
//!
//! States live on a [`Register`]: an ordered list of labeled subsystems.
//! Amplitude and matrix indices follow the Kronecker convention, with the
//! first subsystem most significant. Every operation that takes labels
//! resolves them against the register, so results never depend on where a
//! subsystem happens to sit.

mod density;
mod diagonal;
pub(crate) mod eig;
pub(crate) mod layout;
mod pure;
mod register;

pub use density::DensityOperator;
pub use diagonal::DiagonalState;
pub use eig::{eig_hermitian, hermitian_eigenvalues, HermitianEigen};
pub use pure::PureState;
pub use register::{ancilla_label, Register, Role, Subsystem};

use crate::{CMatrix, Error, Result, C64, VALIDITY_TOL};

/// Kronecker product of a list of matrices, left factor most significant.
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let mut acc = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub(crate) fn check_unitary(u: &CMatrix) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev > VALIDITY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Largest entry of `|H - H^dagger|`.
pub fn hermiticity_deviation(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    let n = h.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Resolve `labels`, check `u` is a unitary of the matching size, and build
/// the gather/scatter pattern.
pub(crate) fn unitary_pattern<L: AsRef<str>>(
    register: &Register,
    u: &CMatrix,
    labels: &[L],
) -> Result<layout::LocalPattern> {
    if labels.is_empty() {
        return Err(Error::EmptySelection);
    }
    let positions = register.indices_of(labels)?;
    let k: usize = positions.iter().map(|&p| register.subsystems()[p].dim).product();
    if u.nrows() != k || u.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: u.nrows(),
        });
    }
    check_unitary(u)?;
    Ok(layout::LocalPattern::new(&register.dims(), &positions))
}

/// Positions of `keep` sorted into register order.
pub(crate) fn keep_positions<L: AsRef<str>>(register: &Register, keep: &[L]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut pos = register.indices_of(keep)?;
    pos.sort_unstable();
    Ok(pos)
}

/// Positions of `order` after checking it is a permutation of the register.
pub(crate) fn permutation_positions<L: AsRef<str>>(
    register: &Register,
    order: &[L],
) -> Result<Vec<usize>> {
    let pos = register.indices_of(order)?;
    if pos.len() != register.len() {
        return Err(Error::InvalidRegister(format!(
            "permutation names {} of {} subsystems",
            pos.len(),
            register.len()
        )));
    }
    Ok(pos)
}
