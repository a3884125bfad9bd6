#![allow(dead_code)]

use owi_core::gates::{ChannelSpec, Gate};
use owi_core::protocol::{InputGroup, Options, Process, Query};
use owi_core::tensor::Register;
use owi_core::{CMatrix, CVector, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn ket(amps: &[f64]) -> CVector {
    CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a)))
}

pub fn ket0() -> CVector {
    ket(&[1.0, 0.0])
}

pub fn ket1() -> CVector {
    ket(&[0.0, 1.0])
}

pub fn plus() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(&[s, s])
}

pub fn minus() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(&[s, -s])
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn qubits(labels: &[&str]) -> Register {
    let decl: Vec<(&str, usize)> = labels.iter().map(|&l| (l, 2)).collect();
    Register::principals(&decl).unwrap()
}

/// Two-qubit process on product pure inputs.
pub fn pair(channel: Vec<Gate>, a: CVector, b: CVector) -> Process {
    Process::new(
        qubits(&["A", "B"]),
        vec![InputGroup::pure(&["A"], a), InputGroup::pure(&["B"], b)],
        ChannelSpec::new(channel),
    )
}

pub fn owi(process: &Process, source: &[&str], target: &[&str]) -> f64 {
    process
        .execute(&Options::default())
        .unwrap()
        .query(&Query::new(source, target), Default::default())
        .unwrap()
        .value
}

pub fn owi_pair(process: &Process) -> (f64, f64) {
    let out = process.execute(&Options::default()).unwrap();
    let ab = out.owi(&["A"], &["B"]).unwrap().value;
    let ba = out.owi(&["B"], &["A"]).unwrap().value;
    (ab, ba)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
