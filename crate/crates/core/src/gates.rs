//! Gate matrices and channel composition.
//!
//! Controlled shifts are basis-relative: `C = sum_i |b_i><b_i| (x) X_c^{s i}`
//! with `X_c |c_j> = |c_{j+1 mod d}>`. CNOT is the qubit computational case;
//! in the `{+,-}` bases the same matrix reads as a controlled gate with the
//! roles of control and target exchanged.

use crate::bases::{Basis, BasisSpec};
use crate::tensor::layout::LocalPattern;
use crate::tensor::{check_unitary, Register, Role};
use crate::{CMatrix, Error, Result, C64};

/// Direction of a controlled shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

impl ShiftSign {
    pub fn as_i64(self) -> i64 {
        match self {
            ShiftSign::Plus => 1,
            ShiftSign::Minus => -1,
        }
    }
}

/// Generalized Pauli shift `X|j> = |j+1 mod d>`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Generalized Pauli clock `Z|j> = w^j |j>`.
pub fn clock(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn shift_power(target: &Basis, power: i64) -> CMatrix {
    let d = target.dim();
    let p = power.rem_euclid(d as i64) as usize;
    let mut x = CMatrix::identity(d, d);
    let s = shift(d);
    for _ in 0..p {
        x = &s * x;
    }
    target.columns() * x * target.columns().adjoint()
}

/// Controlled shift with control kets from `control` and the shift acting
/// cyclically on the kets of `target`.
pub fn controlled_shift(control: &Basis, target: &Basis, sign: ShiftSign) -> Result<CMatrix> {
    let d = control.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: target.dim(),
        });
    }
    let mut u = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        let b = control.ket(i);
        let proj = &b * b.adjoint();
        u += proj.kronecker(&shift_power(target, sign.as_i64() * i as i64));
    }
    Ok(u)
}

/// Qubit or qudit CNOT in the computational basis.
pub fn cnot(d: usize) -> CMatrix {
    let comp = Basis::computational(d).expect("d >= 2");
    controlled_shift(&comp, &comp, ShiftSign::Plus).expect("equal dims")
}

/// `sum_i |i><i| (x) X_c^{shifts[i]}` with computational-basis controls;
/// `shifts` is indexed by the control multi-index (first control most
/// significant).
pub fn multi_controlled(control_dims: &[usize], shifts: &[i64], target: &Basis) -> Result<CMatrix> {
    let n: usize = control_dims.iter().product();
    if control_dims.is_empty() || shifts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: shifts.len(),
        });
    }
    if let Some(&d) = control_dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidDimension(d));
    }
    let dt = target.dim();
    let mut u = CMatrix::zeros(n * dt, n * dt);
    for (i, &s) in shifts.iter().enumerate() {
        let block = shift_power(target, s);
        u.view_mut((i * dt, i * dt), (dt, dt)).copy_from(&block);
    }
    Ok(u)
}

/// Shift table of `predicate` over every control multi-index.
pub fn shift_table<F: Fn(&[usize]) -> i64>(control_dims: &[usize], predicate: F) -> Vec<i64> {
    let n: usize = control_dims.iter().product();
    let mut digits = vec![0usize; control_dims.len()];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(predicate(&digits));
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < control_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

/// Toffoli table: flip the target when both controls are 1.
pub fn toffoli_table() -> Vec<i64> {
    shift_table(&[2, 2], |c| (c[0] & c[1]) as i64)
}

pub fn ccnot() -> CMatrix {
    multi_controlled(&[2, 2], &toffoli_table(), &Basis::computational(2).expect("d = 2"))
        .expect("valid table")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGate {
    X,
    Z,
    H,
    Swap,
}

impl StandardGate {
    pub fn name(self) -> &'static str {
        match self {
            StandardGate::X => "x",
            StandardGate::Z => "z",
            StandardGate::H => "h",
            StandardGate::Swap => "swap",
        }
    }
}

/// Standard gate for local dimension `d`. `H` exists only for qubits;
/// `X`/`Z` are the shift and clock.
pub fn standard(kind: StandardGate, d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    match kind {
        StandardGate::X => Ok(shift(d)),
        StandardGate::Z => Ok(clock(d)),
        StandardGate::H if d == 2 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok(CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
            ))
        }
        StandardGate::H => Err(Error::Unsupported(format!("Hadamard for d = {d}"))),
        StandardGate::Swap => Ok(CMatrix::from_fn(d * d, d * d, |r, c| {
            let (i, j) = (c / d, c % d);
            if r == j * d + i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })),
    }
}

/// One gate of a channel, acting on named principal systems.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    ControlledShift {
        control: String,
        target: String,
        control_basis: BasisSpec,
        target_basis: BasisSpec,
        sign: ShiftSign,
    },
    MultiControlled {
        controls: Vec<String>,
        target: String,
        target_basis: BasisSpec,
        shifts: Vec<i64>,
    },
    Swap(String, String),
    /// Single-system `X`, `Z` or `H`.
    Local { gate: StandardGate, label: String },
    Custom { matrix: CMatrix, labels: Vec<String> },
}

impl Gate {
    pub fn cnot(control: &str, target: &str) -> Gate {
        Gate::ControlledShift {
            control: control.into(),
            target: target.into(),
            control_basis: BasisSpec::Computational,
            target_basis: BasisSpec::Computational,
            sign: ShiftSign::Plus,
        }
    }

    pub fn ccnot(c1: &str, c2: &str, target: &str) -> Gate {
        Gate::MultiControlled {
            controls: vec![c1.into(), c2.into()],
            target: target.into(),
            target_basis: BasisSpec::Computational,
            shifts: toffoli_table(),
        }
    }

    pub fn local(gate: StandardGate, label: &str) -> Gate {
        Gate::Local {
            gate,
            label: label.into(),
        }
    }

    /// Labels the matrix acts on, in matrix tensor order.
    pub fn labels(&self) -> Vec<&str> {
        match self {
            Gate::ControlledShift { control, target, .. } => vec![control, target],
            Gate::MultiControlled { controls, target, .. } => {
                let mut v: Vec<&str> = controls.iter().map(String::as_str).collect();
                v.push(target);
                v
            }
            Gate::Swap(a, b) => vec![a, b],
            Gate::Local { label, .. } => vec![label],
            Gate::Custom { labels, .. } => labels.iter().map(String::as_str).collect(),
        }
    }

    /// Matrix over [`Gate::labels`], validated against `register`.
    pub fn matrix(&self, register: &Register) -> Result<CMatrix> {
        let labels = self.labels();
        let mut dims = Vec::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::OverlappingSets(l.to_string()));
            }
            let s = register
                .get(l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            match s.role {
                Role::Principal => {}
                Role::Ancilla => return Err(Error::AncillaInChannel(l.to_string())),
                Role::Environment => return Err(Error::NotPrincipal(l.to_string())),
            }
            dims.push(s.dim);
        }
        let u = match self {
            Gate::ControlledShift {
                control_basis,
                target_basis,
                sign,
                ..
            } => {
                if dims[0] != dims[1] {
                    return Err(Error::DimensionMismatch {
                        expected: dims[0],
                        found: dims[1],
                    });
                }
                controlled_shift(&control_basis.resolve(dims[0])?, &target_basis.resolve(dims[1])?, *sign)?
            }
            Gate::MultiControlled {
                target_basis, shifts, ..
            } => {
                let (target_dim, control_dims) = dims.split_last().expect("non-empty");
                multi_controlled(control_dims, shifts, &target_basis.resolve(*target_dim)?)?
            }
            Gate::Swap(..) => {
                if dims[0] != dims[1] {
                    return Err(Error::DimensionMismatch {
                        expected: dims[0],
                        found: dims[1],
                    });
                }
                standard(StandardGate::Swap, dims[0])?
            }
            Gate::Local { gate, .. } => {
                if *gate == StandardGate::Swap {
                    return Err(Error::Unsupported("swap is a two-system gate".into()));
                }
                standard(*gate, dims[0])?
            }
            Gate::Custom { matrix, .. } => {
                let k: usize = dims.iter().product();
                if matrix.nrows() != k || matrix.ncols() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        found: matrix.nrows(),
                    });
                }
                matrix.clone()
            }
        };
        check_unitary(&u)?;
        Ok(u)
    }
}

/// Ordered gate list composing the unknown unitary; the first gate acts
/// first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelSpec {
    pub gates: Vec<Gate>,
}

impl ChannelSpec {
    pub fn new(gates: Vec<Gate>) -> Self {
        ChannelSpec { gates }
    }

    pub fn identity() -> Self {
        ChannelSpec::default()
    }

    /// Product of the embedded gate matrices over the principal systems of
    /// `register`, in register order.
    pub fn compose(&self, register: &Register) -> Result<CMatrix> {
        compose(self, register)
    }
}

/// See [`ChannelSpec::compose`].
pub fn compose(channel: &ChannelSpec, register: &Register) -> Result<CMatrix> {
    let principal_positions: Vec<usize> = register
        .subsystems()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.role == Role::Principal)
        .map(|(i, _)| i)
        .collect();
    if principal_positions.is_empty() {
        return Err(Error::EmptySelection);
    }
    let principals = Register::new(
        principal_positions
            .iter()
            .map(|&i| register.subsystems()[i].clone())
            .collect(),
    )?;
    let n = principals.dim();
    let dims = principals.dims();
    let mut total = CMatrix::identity(n, n);
    for gate in &channel.gates {
        let g = gate.matrix(register)?;
        let pos = principals.indices_of(&gate.labels())?;
        let pattern = LocalPattern::new(&dims, &pos);
        for col in total.as_mut_slice().chunks_mut(n) {
            pattern.apply(&g, col);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::unitarity_deviation;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn perm(d: usize, map: &[usize]) -> CMatrix {
        CMatrix::from_fn(d, d, |r, col| if map[col] == r { c(1.0) } else { c(0.0) })
    }

    fn qubits(labels: &[&str]) -> Register {
        Register::principals(&labels.iter().map(|l| (*l, 2)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cnot_in_computational_basis() {
        assert!((cnot(2) - perm(4, &[0, 1, 3, 2])).norm() < 1e-15);
    }

    #[test]
    fn computational_control_plus_minus_target_is_cz() {
        // independent route: sum_i |i><i| (x) Z^i
        let z = clock(2);
        let mut cz = CMatrix::zeros(4, 4);
        cz.view_mut((0, 0), (2, 2)).copy_from(&CMatrix::identity(2, 2));
        cz.view_mut((2, 2), (2, 2)).copy_from(&z);
        let g = controlled_shift(
            &Basis::computational(2).unwrap(),
            &Basis::fourier_of_computational(2).unwrap(),
            ShiftSign::Plus,
        )
        .unwrap();
        assert!((&g - &cz).norm() < 1e-14);
        let expect = CMatrix::from_diagonal(&crate::CVector::from_vec(vec![c(1.0), c(1.0), c(1.0), c(-1.0)]));
        assert!((g - expect).norm() < 1e-14);
    }

    #[test]
    fn plus_minus_cnot_is_reversed_cnot() {
        let pm = Basis::fourier_of_computational(2).unwrap();
        let g = controlled_shift(&pm, &pm, ShiftSign::Plus).unwrap();
        let reversed = standard(StandardGate::Swap, 2).unwrap() * cnot(2) * standard(StandardGate::Swap, 2).unwrap();
        assert!((g - reversed).norm() < 1e-14);
    }

    #[test]
    fn minus_sign_inverts() {
        for d in 2..6 {
            let comp = Basis::computational(d).unwrap();
            let f = Basis::fourier(&comp);
            let p = controlled_shift(&f, &comp, ShiftSign::Plus).unwrap();
            let m = controlled_shift(&f, &comp, ShiftSign::Minus).unwrap();
            assert!((p * m - CMatrix::identity(d * d, d * d)).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_sign_irrelevant() {
        let comp = Basis::computational(2).unwrap();
        let p = controlled_shift(&comp, &comp, ShiftSign::Plus).unwrap();
        let m = controlled_shift(&comp, &comp, ShiftSign::Minus).unwrap();
        assert!((p - m).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Basis::computational(2).unwrap();
        let b = Basis::computational(3).unwrap();
        assert!(matches!(
            controlled_shift(&a, &b, ShiftSign::Plus),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn toffoli_truth_table() {
        let t = ccnot();
        let mut expect = (0..8).collect::<Vec<_>>();
        expect.swap(6, 7);
        assert!((t - perm(8, &expect)).norm() < 1e-15);
        assert_eq!(toffoli_table(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn zero_predicate_is_identity() {
        let table = shift_table(&[2, 3], |_| 0);
        let u = multi_controlled(&[2, 3], &table, &Basis::computational(2).unwrap()).unwrap();
        assert!((u - CMatrix::identity(12, 12)).norm() < 1e-15);
    }

    #[test]
    fn table_length_checked() {
        assert!(multi_controlled(&[2, 2], &[0, 1], &Basis::computational(2).unwrap()).is_err());
    }

    #[test]
    fn standard_gates() {
        assert!((standard(StandardGate::Swap, 2).unwrap() - perm(4, &[0, 2, 1, 3])).norm() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
        assert!((standard(StandardGate::H, 2).unwrap() - h).norm() < 1e-15);
        assert!((standard(StandardGate::X, 3).unwrap() - perm(3, &[1, 2, 0])).norm() < 1e-15);
        assert!(matches!(standard(StandardGate::H, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn every_constructed_gate_is_unitary() {
        for d in 2..5 {
            let comp = Basis::computational(d).unwrap();
            let f = Basis::fourier(&comp);
            for (a, b) in [(&comp, &comp), (&comp, &f), (&f, &f), (&f, &comp)] {
                for s in [ShiftSign::Plus, ShiftSign::Minus] {
                    assert!(unitarity_deviation(&controlled_shift(a, b, s).unwrap()) < 1e-10);
                }
            }
            for k in [StandardGate::X, StandardGate::Z, StandardGate::Swap] {
                assert!(unitarity_deviation(&standard(k, d).unwrap()) < 1e-10);
            }
        }
        assert!(unitarity_deviation(&ccnot()) < 1e-10);
    }

    #[test]
    fn compose_single_cnot() {
        let r = qubits(&["A", "B"]);
        let u = ChannelSpec::new(vec![Gate::cnot("A", "B")]).compose(&r).unwrap();
        assert!((u - cnot(2)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_sandwich_reverses_cnot() {
        let r = qubits(&["A", "B"]);
        let hh = |l: &str| Gate::local(StandardGate::H, l);
        let u = ChannelSpec::new(vec![hh("A"), hh("B"), Gate::cnot("B", "A"), hh("A"), hh("B")])
            .compose(&r)
            .unwrap();
        assert!((u - cnot(2)).norm() < 1e-14);
    }

    #[test]
    fn three_cnots_make_a_swap() {
        // product of the three permutation matrices computed directly
        let ab = perm(4, &[0, 1, 3, 2]);
        let ba = perm(4, &[0, 3, 2, 1]);
        let direct = &ab * &ba * &ab;
        assert!((&direct - perm(4, &[0, 2, 1, 3])).norm() < 1e-15);
        let r = qubits(&["A", "B"]);
        let u = ChannelSpec::new(vec![Gate::cnot("A", "B"), Gate::cnot("B", "A"), Gate::cnot("A", "B")])
            .compose(&r)
            .unwrap();
        assert!((&u - &direct).norm() < 1e-15);
        let mono = ChannelSpec::new(vec![Gate::Swap("A".into(), "B".into())]).compose(&r).unwrap();
        assert!((u - mono).norm() < 1e-15);
    }

    #[test]
    fn swap_decomposition_in_qutrits() {
        // SWAP = C_AB C^-_BA C_AB X-free decomposition for any d
        let r = Register::principals(&[("A", 3), ("B", 3)]).unwrap();
        let minus_ba = Gate::ControlledShift {
            control: "B".into(),
            target: "A".into(),
            control_basis: BasisSpec::Computational,
            target_basis: BasisSpec::Computational,
            sign: ShiftSign::Minus,
        };
        let neg_a = Gate::Custom {
            matrix: perm(3, &[0, 2, 1]),
            labels: vec!["A".into()],
        };
        let u = ChannelSpec::new(vec![Gate::cnot("A", "B"), minus_ba, Gate::cnot("A", "B"), neg_a])
            .compose(&r)
            .unwrap();
        let mono = ChannelSpec::new(vec![Gate::Swap("A".into(), "B".into())]).compose(&r).unwrap();
        assert!((u - mono).norm() < 1e-14);
    }

    #[test]
    fn channel_rejects_ancilla_and_overlap() {
        let r = qubits(&["A", "B"]).with_ancillas().unwrap();
        let err = ChannelSpec::new(vec![Gate::cnot("A'", "B")]).compose(&r).unwrap_err();
        assert_eq!(err, Error::AncillaInChannel("A'".into()));
        let err = ChannelSpec::new(vec![Gate::cnot("A", "A")]).compose(&r).unwrap_err();
        assert_eq!(err, Error::OverlappingSets("A".into()));
    }

    #[test]
    fn custom_must_be_unitary() {
        let r = qubits(&["A"]);
        let g = Gate::Custom {
            matrix: CMatrix::from_element(2, 2, c(1.0)),
            labels: vec!["A".into()],
        };
        assert!(matches!(g.matrix(&r), Err(Error::NotUnitary(_))));
    }
}
