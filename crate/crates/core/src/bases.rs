//! Orthonormal bases of single subsystems.

use std::f64::consts::PI;

use crate::tensor::{check_unitary, eig_hermitian, DensityOperator};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Orthonormal basis of a `d`-dimensional space; the kets are the columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    columns: CMatrix,
}

impl Basis {
    pub fn new(columns: CMatrix) -> Result<Self> {
        if !columns.is_square() {
            return Err(Error::DimensionMismatch {
                expected: columns.nrows(),
                found: columns.ncols(),
            });
        }
        if columns.nrows() < 2 {
            return Err(Error::InvalidDimension(columns.nrows()));
        }
        check_unitary(&columns)?;
        Ok(Basis { columns })
    }

    pub fn computational(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Basis {
            columns: CMatrix::identity(d, d),
        })
    }

    /// `f_j = d^{-1/2} sum_k w^{jk} e_k`, `w = exp(2 pi i / d)`, where `e_k`
    /// are the reference kets. Mutually unbiased with the reference.
    pub fn fourier(reference: &Basis) -> Basis {
        let d = reference.dim();
        let dft = dft_matrix(d);
        Basis {
            columns: &reference.columns * dft,
        }
    }

    /// Fourier transform of the computational basis; `{|+>, |->}` for `d = 2`.
    pub fn fourier_of_computational(d: usize) -> Result<Self> {
        Ok(Basis::fourier(&Basis::computational(d)?))
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn ket(&self, i: usize) -> CVector {
        self.columns.column(i).into_owned()
    }

    /// Entry-wise complex conjugate basis.
    pub fn conjugate(&self) -> Basis {
        Basis {
            columns: self.columns.map(|z| z.conj()),
        }
    }

    /// `max_{j,k} | |<self_j|other_k>|^2 - 1/d |`.
    pub fn unbiasedness_deviation(&self, other: &Basis) -> f64 {
        let d = self.dim() as f64;
        let overlaps = self.columns.adjoint() * &other.columns;
        overlaps
            .iter()
            .map(|z| (z.norm_sqr() - 1.0 / d).abs())
            .fold(0.0, f64::max)
    }

    /// Short name used in reports: `comp`, `fourier`, or `custom`.
    pub fn describe(&self) -> &'static str {
        let d = self.dim();
        if (&self.columns - CMatrix::identity(d, d)).norm() < 1e-12 {
            "comp"
        } else if (&self.columns - dft_matrix(d)).norm() < 1e-12 {
            "fourier"
        } else {
            "custom"
        }
    }

    /// True if every ket is, up to phase, a ket of `other`.
    pub fn same_up_to_phases(&self, other: &Basis, tol: f64) -> bool {
        let overlaps = self.columns.adjoint() * &other.columns;
        overlaps
            .iter()
            .all(|z| z.norm() < tol || (z.norm() - 1.0).abs() < tol)
    }
}

fn dft_matrix(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |k, j| {
        let phase = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        C64::from_polar(norm, phase)
    })
}

pub fn computational_basis(d: usize) -> Result<Basis> {
    Basis::computational(d)
}

pub fn fourier_basis(reference: &Basis) -> Basis {
    Basis::fourier(reference)
}

/// Copy basis for a single-subsystem input: the Fourier transform of the
/// deterministic eigenbasis of `rho`. A pure input is maximally coherent in
/// the result.
pub fn copy_basis_for(rho: &DensityOperator) -> Result<Basis> {
    if rho.register().len() != 1 {
        return Err(Error::InvalidRegister(format!(
            "copy basis needs a single subsystem, got {}",
            rho.register().len()
        )));
    }
    let eig = eig_hermitian(rho.matrix())?;
    Ok(Basis::fourier(&Basis::new(eig.vectors)?))
}

/// Basis named in a spec or a gate, resolved against a dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    Computational,
    Fourier,
    Custom(Basis),
}

impl BasisSpec {
    pub fn resolve(&self, d: usize) -> Result<Basis> {
        match self {
            BasisSpec::Computational => Basis::computational(d),
            BasisSpec::Fourier => Basis::fourier_of_computational(d),
            BasisSpec::Custom(b) if b.dim() == d => Ok(b.clone()),
            BasisSpec::Custom(b) => Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            }),
        }
    }
}
