//! Seeded random states and unitaries for scenarios and property sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{DensityOperator, PureState, Register};
use crate::{CMatrix, CVector, Result, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed `d x d` unitary (QR of a Ginibre matrix with the phases
/// of `R`'s diagonal absorbed).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly random pure amplitudes.
pub fn random_amplitudes<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_pure<R: Rng + ?Sized>(register: Register, rng: &mut R) -> Result<PureState> {
    let d = register.dim();
    PureState::new(register, random_amplitudes(d, rng))
}

/// Full-rank mixed state `G G^dagger / tr` from a Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    let rho = rho / tr;
    (&rho + rho.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_density<R: Rng + ?Sized>(register: Register, rng: &mut R) -> Result<DensityOperator> {
    let d = register.dim();
    DensityOperator::new(register, random_density_matrix(d, rng))
}
