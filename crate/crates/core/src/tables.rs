//! Built-in bipartite and tripartite scenarios with closed-form OWI values.
//!
//! Table 1 covers two `d`-dimensional systems `A, B` and reports
//! `C(A->B)`, `C(B->A)`. Table 2 covers three qubits `E, A, B` and reports
//! `C(EA->B)`, `C(A->B|E)`, `C(A->B)`. Rows marked "arbitrary" use seeded
//! random states and unitaries.

use rand::Rng;

use crate::bases::BasisSpec;
use crate::gates::{toffoli_table, ChannelSpec, Gate, ShiftSign};
use crate::par::{self, Execution};
use crate::protocol::{InputGroup, Options, Process, Query};
use crate::random::{haar_unitary, random_amplitudes, random_density_matrix, seeded};
use crate::tensor::Register;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Closed-form expectation: the formula as printed and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub formula: &'static str,
    pub value: f64,
}

/// One table row ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub process: Process,
    pub expected: Vec<Expected>,
}

/// A row after evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    pub label: String,
    pub columns: Vec<String>,
    pub computed: Vec<f64>,
    pub expected: Vec<Expected>,
}

impl RowResult {
    pub fn max_diff(&self) -> f64 {
        self.computed
            .iter()
            .zip(&self.expected)
            .map(|(c, e)| (c - e.value).abs())
            .fold(0.0, f64::max)
    }
}

impl Scenario {
    pub fn run(&self, options: &Options) -> Result<RowResult> {
        let results = self.process.run(options)?;
        Ok(RowResult {
            label: self.label.clone(),
            columns: self.process.queries.iter().map(Query::describe).collect(),
            computed: results.iter().map(|r| r.value).collect(),
            expected: self.expected.clone(),
        })
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn log2(x: f64) -> f64 {
    x.log2()
}

fn e(formula: &'static str, value: f64) -> Expected {
    Expected { formula, value }
}

/// `sum_i |ii><ii| / d` over a pair of `d`-level systems.
pub fn classical_copy_state(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        m[(i * d + i, i * d + i)] = c(1.0 / d as f64);
    }
    m
}

fn maximally_mixed(d: usize) -> CMatrix {
    CMatrix::identity(d, d) * c(1.0 / d as f64)
}

fn two_party(d: usize, inputs: Vec<InputGroup>, gates: Vec<Gate>) -> Result<Process> {
    let reg = Register::principals(&[("A", d), ("B", d)])?;
    Ok(Process::new(reg, inputs, ChannelSpec::new(gates))
        .with_query(Query::new(&["A"], &["B"]))
        .with_query(Query::new(&["B"], &["A"])))
}

fn random_pure_inputs<R: Rng>(d: usize, rng: &mut R) -> Vec<InputGroup> {
    vec![
        InputGroup::pure(&["A"], random_amplitudes(d, rng)),
        InputGroup::pure(&["B"], random_amplitudes(d, rng)),
    ]
}

fn uniform_inputs(d: usize) -> Vec<InputGroup> {
    vec![
        InputGroup::mixed(&["A"], maximally_mixed(d)),
        InputGroup::mixed(&["B"], maximally_mixed(d)),
    ]
}

fn controlled(control: &str, target: &str, cb: BasisSpec, tb: BasisSpec) -> Gate {
    Gate::ControlledShift {
        control: control.into(),
        target: target.into(),
        control_basis: cb,
        target_basis: tb,
        sign: ShiftSign::Plus,
    }
}

fn swap() -> Gate {
    Gate::Swap("A".into(), "B".into())
}

/// Table 1 scenarios for dimension `d`: nine rows at `d = 2`, the seven
/// `d`-generic rows otherwise.
pub fn table1(d: usize, seed: u64) -> Result<Vec<Scenario>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut rng = seeded(seed);
    let ld = log2(d as f64);
    let mut rows = Vec::new();
    let mut push = |label: &str, process: Process, expected: Vec<Expected>| {
        rows.push(Scenario {
            label: label.to_string(),
            process,
            expected,
        })
    };

    let local = vec![
        Gate::Custom {
            matrix: haar_unitary(d, &mut rng),
            labels: vec!["A".into()],
        },
        Gate::Custom {
            matrix: haar_unitary(d, &mut rng),
            labels: vec!["B".into()],
        },
    ];
    let mixed = vec![
        InputGroup::mixed(&["A"], random_density_matrix(d, &mut rng)),
        InputGroup::mixed(&["B"], random_density_matrix(d, &mut rng)),
    ];
    push("V_A (x) W_B on rho_A (x) rho_B", two_party(d, mixed, local)?, vec![e("0", 0.0), e("0", 0.0)]);

    let inputs = random_pure_inputs(d, &mut rng);
    push(
        "C_{A->B} on psi_A (x) phi_B",
        two_party(d, inputs, vec![Gate::cnot("A", "B")])?,
        vec![e("2*log2(d)", 2.0 * ld), e("0", 0.0)],
    );
    let inputs = random_pure_inputs(d, &mut rng);
    push(
        "C_{B->A} on psi_A (x) phi_B",
        two_party(d, inputs, vec![Gate::cnot("B", "A")])?,
        vec![e("0", 0.0), e("2*log2(d)", 2.0 * ld)],
    );
    if d == 2 {
        let inputs = random_pure_inputs(d, &mut rng);
        push(
            "C^{0,1->+,-}_{A->B} on psi_A (x) phi_B",
            two_party(
                d,
                inputs,
                vec![controlled("A", "B", BasisSpec::Computational, BasisSpec::Fourier)],
            )?,
            vec![e("0", 0.0), e("0", 0.0)],
        );
        let inputs = random_pure_inputs(d, &mut rng);
        push(
            "C^{+,-->+,-}_{A->B} on psi_A (x) phi_B",
            two_party(d, inputs, vec![controlled("A", "B", BasisSpec::Fourier, BasisSpec::Fourier)])?,
            vec![e("0", 0.0), e("2", 2.0)],
        );
    }
    push(
        "C_{A->B} on I/d (x) I/d",
        two_party(d, uniform_inputs(d), vec![Gate::cnot("A", "B")])?,
        vec![e("log2(d)", ld), e("0", 0.0)],
    );
    push(
        "C_{B->A} on I/d (x) I/d",
        two_party(d, uniform_inputs(d), vec![Gate::cnot("B", "A")])?,
        vec![e("0", 0.0), e("log2(d)", ld)],
    );
    let inputs = random_pure_inputs(d, &mut rng);
    push(
        "SWAP on psi_A (x) phi_B",
        two_party(d, inputs, vec![swap()])?,
        vec![e("2*log2(d)", 2.0 * ld), e("2*log2(d)", 2.0 * ld)],
    );
    push(
        "SWAP on I/d (x) I/d",
        two_party(d, uniform_inputs(d), vec![swap()])?,
        vec![e("log2(d)", ld), e("log2(d)", ld)],
    );
    Ok(rows)
}

fn three_party(inputs: Vec<InputGroup>, gates: Vec<Gate>) -> Result<Process> {
    let reg = Register::principals(&[("E", 2), ("A", 2), ("B", 2)])?;
    Ok(Process::new(reg, inputs, ChannelSpec::new(gates))
        .with_query(Query::new(&["E", "A"], &["B"]))
        .with_query(Query::given(&["A"], &["B"], &["E"]))
        .with_query(Query::new(&["A"], &["B"])))
}

fn bell() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)])
}

fn ccnot() -> Gate {
    Gate::MultiControlled {
        controls: vec!["E".into(), "A".into()],
        target: "B".into(),
        target_basis: BasisSpec::Computational,
        shifts: toffoli_table(),
    }
}

/// Inputs `psi_EA (x) phi_B` with the given `psi_EA`.
pub fn entangled_ea_inputs<R: Rng>(psi_ea: CVector, rng: &mut R) -> Vec<InputGroup> {
    vec![
        InputGroup::pure(&["E", "A"], psi_ea),
        InputGroup::pure(&["B"], random_amplitudes(2, rng)),
    ]
}

/// The `C_{A->B}` on `psi_EA (x) phi_B` row with a caller-chosen `psi_EA`
/// (the table pins the Bell state).
pub fn table2_entangled_row<R: Rng>(psi_ea: CVector, rng: &mut R) -> Result<Process> {
    three_party(entangled_ea_inputs(psi_ea, rng), vec![Gate::cnot("A", "B")])
}

/// Table 2 scenarios (three qubits).
pub fn table2(seed: u64) -> Result<Vec<Scenario>> {
    let mut rng = seeded(seed);
    let l = log2(4.0 / 3.0);
    let ld = 1.0;
    let mut rows = Vec::new();
    let mut push = |label: &str, process: Process, expected: Vec<Expected>| {
        rows.push(Scenario {
            label: label.to_string(),
            process,
            expected,
        })
    };
    let classical_ea = || {
        vec![
            InputGroup::mixed(&["E", "A"], classical_copy_state(2)),
            InputGroup::mixed(&["B"], maximally_mixed(2)),
        ]
    };
    let random_product = |rng: &mut crate::random::SeededRng| {
        vec![
            InputGroup::pure(&["E"], random_amplitudes(2, rng)),
            InputGroup::pure(&["A"], random_amplitudes(2, rng)),
            InputGroup::pure(&["B"], random_amplitudes(2, rng)),
        ]
    };

    let local = vec![
        Gate::Custom {
            matrix: haar_unitary(4, &mut rng),
            labels: vec!["E".into(), "A".into()],
        },
        Gate::Custom {
            matrix: haar_unitary(2, &mut rng),
            labels: vec!["B".into()],
        },
    ];
    let inputs = vec![
        InputGroup::mixed(&["E", "A"], random_density_matrix(4, &mut rng)),
        InputGroup::mixed(&["B"], random_density_matrix(2, &mut rng)),
    ];
    push(
        "V_EA (x) W_B on rho_EA (x) rho_B",
        three_party(inputs, local)?,
        vec![e("0", 0.0), e("0", 0.0), e("0", 0.0)],
    );
    push(
        "C_{A->B} on (|00>+|11>)_EA/sqrt2 (x) phi_B",
        table2_entangled_row(bell(), &mut rng)?,
        vec![e("2*log2(d)", 2.0 * ld), e("log2(d)", ld), e("log2(d)", ld)],
    );
    let psi = random_amplitudes(4, &mut rng);
    push(
        "C_{B->A} on psi_EA (x) phi_B",
        three_party(entangled_ea_inputs(psi, &mut rng), vec![Gate::cnot("B", "A")])?,
        vec![e("0", 0.0), e("0", 0.0), e("0", 0.0)],
    );
    push(
        "C_{A->B} on xi_E (x) psi_A (x) phi_B",
        three_party(random_product(&mut rng), vec![Gate::cnot("A", "B")])?,
        vec![e("2*log2(d)", 2.0 * ld), e("2*log2(d)", 2.0 * ld), e("2*log2(d)", 2.0 * ld)],
    );
    push(
        "C_{A->B} on sum_ij |ii><ii|_EA |j><j|_B / d^2",
        three_party(classical_ea(), vec![Gate::cnot("A", "B")])?,
        vec![e("log2(d)", ld), e("0", 0.0), e("log2(d)", ld)],
    );
    push(
        "CCNOT on (|00>+|11>)_EA/sqrt2 (x) phi_B",
        three_party(entangled_ea_inputs(bell(), &mut rng), vec![ccnot()])?,
        vec![e("2", 2.0), e("1", 1.0), e("1", 1.0)],
    );
    push(
        "CCNOT on xi_E (x) psi_A (x) phi_B",
        three_party(random_product(&mut rng), vec![ccnot()])?,
        vec![
            e("3/2*log2(4/3)+1", 1.5 * l + 1.0),
            e("3/4*log2(4/3)+1/2", 0.75 * l + 0.5),
            e("3/4*log2(4/3)+1/2", 0.75 * l + 0.5),
        ],
    );
    push(
        "CCNOT on sum_ij |ii><ii|_EA |j><j|_B / 4",
        three_party(classical_ea(), vec![ccnot()])?,
        vec![e("1", 1.0), e("0", 0.0), e("1", 1.0)],
    );
    let uniform = vec![InputGroup::mixed(&["E", "A", "B"], maximally_mixed(8))];
    push(
        "CCNOT on sum_mij |mij><mij|_EAB / 8",
        three_party(uniform, vec![ccnot()])?,
        vec![e("3/4*log2(4/3)+1/2", 0.75 * l + 0.5), e("1/2", 0.5), e("3/4*log2(4/3)", 0.75 * l)],
    );
    Ok(rows)
}

/// Scenarios of table `table` (1 or 2) at dimension `d`.
pub fn scenarios(table: u8, d: usize, seed: u64) -> Result<Vec<Scenario>> {
    match (table, d) {
        (1, d) => table1(d, seed),
        (2, 2) => table2(seed),
        _ => Err(Error::Unsupported(format!("table {table} at d={d}"))),
    }
}

/// Run every row; rows are independent and evaluated under `exec`.
pub fn run_table(table: u8, d: usize, seed: u64, options: &Options) -> Result<Vec<RowResult>> {
    let rows = scenarios(table, d, seed)?;
    par::try_map(options.exec, &rows, |s| {
        s.run(&Options {
            exec: Execution::Sequential,
            ..*options
        })
    })
}

/// Seed used by the CLI and the reproduction tests.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn check(table: u8, d: usize) -> usize {
        let rows = run_table(table, d, DEFAULT_SEED, &Options::default()).unwrap();
        for r in &rows {
            assert!(r.max_diff() < TOL, "{}: {:?} vs {:?}", r.label, r.computed, r.expected);
        }
        rows.len()
    }

    #[test]
    fn table1_qubits() {
        assert_eq!(check(1, 2), 9);
    }

    #[test]
    fn table1_qutrits() {
        assert_eq!(check(1, 3), 7);
    }

    #[test]
    fn table2_qubits() {
        assert_eq!(check(2, 2), 9);
    }

    #[test]
    fn other_seeds_agree() {
        for seed in 1..4 {
            for (t, d) in [(1, 2), (1, 3), (2, 2)] {
                for r in run_table(t, d, seed, &Options::default()).unwrap() {
                    assert!(r.max_diff() < TOL, "seed {seed} {}: {:?}", r.label, r.computed);
                }
            }
        }
    }

    #[test]
    fn unsupported_pairs() {
        assert!(matches!(scenarios(2, 3, 0), Err(Error::Unsupported(_))));
        assert!(matches!(scenarios(3, 2, 0), Err(Error::Unsupported(_))));
        assert!(matches!(scenarios(1, 1, 0), Err(Error::InvalidDimension(1))));
    }
}
