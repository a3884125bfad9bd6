use nalgebra::SymmetricEigen;

use super::hermiticity_deviation;
use crate::{CMatrix, Error, Result, C64, VALIDITY_TOL};

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector's first entry of
/// largest modulus is real and positive, so the output is deterministic up
/// to rotations inside degenerate eigenspaces.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let lambda = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * lambda * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(h: &CMatrix) -> Result<HermitianEigen> {
    let dev = hermiticity_deviation(h);
    if dev > VALIDITY_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(symmetrized(h));
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(v.as_mut_slice());
        vectors.set_column(col, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let dev = hermiticity_deviation(h);
    if dev > VALIDITY_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(eigenvalues_unchecked(h))
}

pub(crate) fn eigenvalues_unchecked(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 1 {
        return vec![h[(0, 0)].re];
    }
    let mut v: Vec<f64> = symmetrized(h).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn symmetrized(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * C64::new(0.5, 0.0)
}

fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let Some(pivot) = v.iter().position(|z| z.norm() >= max - 1e-12) else {
        return;
    };
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
