//! One-way information (OWI) through unitary channels.
//!
//! The crate implements an ancilla-based detection scheme: every principal
//! system is coupled to a primed ancilla with a controlled shift (copy), the
//! unknown channel acts on the principals, and a second round of controlled
//! shifts in the reference bases undoes the copy. Correlations left in the
//! final state measure how much information each system sent to each other
//! one, as conditional mutual informations in bits.
//!
//! Module map:
//!
//! - [`tensor`]: labeled registers, pure and mixed states, partial traces,
//!   Hermitian eigendecomposition and dephasing.
//! - [`bases`]: computational, Fourier and copy bases.
//! - [`gates`]: controlled shifts, Toffoli-style gates, standard gates and
//!   channel composition.
//! - [`entropy`]: von Neumann entropy, mutual information and CMI.
//! - [`protocol`]: the couple / evolve / decouple pipeline, OWI queries and
//!   causal matrices.
//! - [`classical`]: the classical-register counterpart and the projected
//!   quantum variant.
//! - [`specfile`]: the textual process-specification format.
//! - [`tables`]: built-in reproduction scenarios with closed-form values.

#![forbid(unsafe_code)]

pub mod bases;
pub mod classical;
pub mod entropy;
mod error;
pub mod gates;
pub mod par;
pub mod protocol;
pub mod random;
pub mod specfile;
pub mod tables;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and bases.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector used for state amplitudes.
pub type CVector = nalgebra::DVector<C64>;

/// Tolerance for unitarity, hermiticity, trace and normalization checks.
pub const VALIDITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLAMP_TOL, 0)` are clamped to zero.
pub const EIGEN_CLAMP_TOL: f64 = 1e-9;
/// Conditional mutual information below this is an integrity error.
pub const CMI_FLOOR: f64 = -1e-8;
/// Default cap on the doubled Hilbert dimension of a protocol run.
pub const DEFAULT_MAX_DIM: usize = 4096;
