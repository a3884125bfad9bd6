mod common;

use common::{ket, ket0, ket1, owi_pair, pair, plus, qubits};
use owi_core::bases::{Basis, BasisSpec};
use owi_core::gates::{shift_table, ChannelSpec, Gate, ShiftSign, StandardGate};
use owi_core::protocol::{Engine, FinalState, InputGroup, Options, Process};
use owi_core::random::{haar_unitary, random_amplitudes, random_density_matrix, seeded, SeededRng};
use owi_core::tensor::{ancilla_label, Register};
use owi_core::entropy::mutual_information;
use owi_core::{CMatrix, CVector, C64};

fn custom(matrix: CMatrix, labels: &[&str]) -> Gate {
    Gate::Custom {
        matrix,
        labels: labels.iter().map(|l| l.to_string()).collect(),
    }
}

fn random_pure_inputs(labels: &[&str], d: usize, rng: &mut SeededRng) -> Vec<InputGroup> {
    labels
        .iter()
        .map(|l| InputGroup::pure(&[*l], random_amplitudes(d, rng)))
        .collect()
}

#[test]
fn local_channels_send_nothing() {
    let mut rng = seeded(11);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let d = if k % 4 == 3 { 3 } else { 2 };
        let reg = Register::principals(&[("A", d), ("B", d)]).unwrap();
        let inputs = if k % 2 == 0 {
            random_pure_inputs(&["A", "B"], d, &mut rng)
        } else {
            vec![
                InputGroup::mixed(&["A"], random_density_matrix(d, &mut rng)),
                InputGroup::mixed(&["B"], random_density_matrix(d, &mut rng)),
            ]
        };
        let channel = ChannelSpec::new(vec![
            custom(haar_unitary(d, &mut rng), &["A"]),
            custom(haar_unitary(d, &mut rng), &["B"]),
        ]);
        let (ab, ba) = owi_pair(&Process::new(reg, inputs, channel));
        worst = worst.max(ab).max(ba);
    }
    assert!(worst <= 1e-8, "largest OWI through a local channel: {worst}");
}

#[test]
fn chain_rule_over_haar_unitaries() {
    let mut rng = seeded(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let channel = ChannelSpec::new(vec![custom(haar_unitary(8, &mut rng), &["E", "A", "B"])]);
        let inputs = random_pure_inputs(&["E", "A", "B"], 2, &mut rng);
        let out = Process::new(qubits(&["E", "A", "B"]), inputs, channel)
            .execute(&Options::default())
            .unwrap();
        let total = out.owi(&["E", "A"], &["B"]).unwrap().value;
        let first = out.owi(&["E"], &["B"]).unwrap().value;
        let second = out.conditional_owi(&["A"], &["B"], &["E"]).unwrap().value;
        worst = worst.max((total - first - second).abs());
        let m = out.causal_matrix(Default::default()).unwrap();
        for chain in &m.chains {
            worst = worst.max(chain.residual().abs());
        }
    }
    assert!(worst <= 1e-8, "chain rule residual {worst}");
}

#[test]
fn causation_without_correlation() {
    let cnot = pair(vec![Gate::cnot("A", "B")], ket1(), ket0());
    let flip = pair(vec![Gate::local(StandardGate::X, "B")], ket1(), ket0());
    let (caused, _) = owi_pair(&cnot);
    let (flipped, _) = owi_pair(&flip);
    assert!(caused > 1.0, "{caused}");
    assert!(flipped < 1e-8, "{flipped}");
}

#[test]
fn swap_decomposition_is_invisible() {
    let mut rng = seeded(9);
    for _ in 0..10 {
        let (a, b) = (random_amplitudes(2, &mut rng), random_amplitudes(2, &mut rng));
        let whole = owi_pair(&pair(vec![Gate::Swap("A".into(), "B".into())], a.clone(), b.clone()));
        let three = owi_pair(&pair(
            vec![Gate::cnot("A", "B"), Gate::cnot("B", "A"), Gate::cnot("A", "B")],
            a,
            b,
        ));
        assert!((whole.0 - three.0).abs() <= 1e-10 && (whole.1 - three.1).abs() <= 1e-10);
        assert!((whole.0 - 2.0).abs() <= 1e-9 && (whole.1 - 2.0).abs() <= 1e-9);
    }
}

#[test]
fn two_way_flow() {
    let v = pair(vec![Gate::cnot("B", "A"), Gate::cnot("A", "B")], plus(), plus());
    let (ab, ba) = owi_pair(&v);
    assert!((ab - 2.0).abs() <= 1e-9 && (ba - 2.0).abs() <= 1e-9, "{ab} {ba}");
}

#[test]
fn measure_is_not_additive() {
    let h = || vec![Gate::local(StandardGate::H, "A"), Gate::local(StandardGate::H, "B")];
    let mut composed = h();
    composed.push(Gate::cnot("B", "A"));
    composed.extend(h());
    let whole = owi_pair(&pair(composed, plus(), ket0())).0;
    let parts: f64 = [h(), vec![Gate::cnot("B", "A")], h()]
        .into_iter()
        .map(|g| owi_pair(&pair(g, plus(), ket0())).0)
        .sum();
    assert!((whole - 2.0).abs() <= 1e-9);
    assert!((whole - parts).abs() > 1.0, "{whole} vs {parts}");
}

#[test]
fn controlled_gates_are_maximal() {
    let mut rng = seeded(4);
    for d in [2usize, 3, 4] {
        let reg = Register::principals(&[("A", d), ("B", d)]).unwrap();
        let gate = Gate::ControlledShift {
            control: "A".into(),
            target: "B".into(),
            control_basis: BasisSpec::Computational,
            target_basis: BasisSpec::Computational,
            sign: ShiftSign::Plus,
        };
        let pure = Process::new(reg.clone(), random_pure_inputs(&["A", "B"], d, &mut rng), ChannelSpec::new(vec![gate.clone()]));
        let (ab, _) = owi_pair(&pure);
        assert!((ab - 2.0 * (d as f64).log2()).abs() <= 1e-9, "d={d}: {ab}");
        let mixed = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        let noisy = Process::new(
            reg,
            vec![InputGroup::mixed(&["A"], mixed.clone()), InputGroup::mixed(&["B"], mixed)],
            ChannelSpec::new(vec![gate]),
        );
        let (ab, _) = owi_pair(&noisy);
        assert!((ab - (d as f64).log2()).abs() <= 1e-9, "d={d}: {ab}");
    }
}

/// A basis in which `psi` has flat overlaps `1/d`, randomized by a unitary
/// acting on the complement of `psi`.
fn flat_basis_for(psi: &CVector, rng: &mut SeededRng) -> Basis {
    let d = psi.len();
    let mut seed = haar_unitary(d, rng);
    seed.set_column(0, psi);
    let w = seed.qr().q();
    let mut inner = CMatrix::identity(d, d);
    inner.view_mut((1, 1), (d - 1, d - 1)).copy_from(&haar_unitary(d - 1, rng));
    let f = Basis::fourier_of_computational(d).unwrap();
    Basis::new(w * inner * f.columns()).unwrap()
}

#[test]
fn pure_inputs_do_not_depend_on_the_copy_basis() {
    let mut rng = seeded(21);
    for d in [2usize, 3] {
        let reg = Register::principals(&[("A", d), ("B", d)]).unwrap();
        let (a, b) = (random_amplitudes(d, &mut rng), random_amplitudes(d, &mut rng));
        let channel = ChannelSpec::new(vec![custom(haar_unitary(d * d, &mut rng), &["A", "B"])]);
        let base = Process::new(
            reg,
            vec![InputGroup::pure(&["A"], a.clone()), InputGroup::pure(&["B"], b.clone())],
            channel,
        );
        let reference = owi_pair(&base);
        for _ in 0..10 {
            let p = base
                .clone()
                .with_copy_basis("A", flat_basis_for(&a, &mut rng))
                .with_copy_basis("B", flat_basis_for(&b, &mut rng));
            let got = owi_pair(&p);
            assert!(
                (got.0 - reference.0).abs() <= 1e-9 && (got.1 - reference.1).abs() <= 1e-9,
                "d={d}: {got:?} vs {reference:?}"
            );
        }
    }
}

#[test]
fn engines_agree_on_mixed_inputs() {
    let mut rng = seeded(31);
    for (da, db) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let reg = Register::principals(&[("A", da), ("B", db)]).unwrap();
        let p = Process::new(
            reg,
            vec![
                InputGroup::mixed(&["A"], random_density_matrix(da, &mut rng)),
                InputGroup::mixed(&["B"], random_density_matrix(db, &mut rng)),
            ],
            ChannelSpec::new(vec![custom(haar_unitary(da * db, &mut rng), &["A", "B"])]),
        );
        let sv = p.execute(&Options::default()).unwrap();
        let dm = p
            .execute(&Options {
                engine: Engine::DensityMatrix,
                ..Options::default()
            })
            .unwrap();
        for (s, t) in [("A", "B"), ("B", "A")] {
            let x = sv.owi(&[s], &[t]).unwrap().value;
            let y = dm.owi(&[s], &[t]).unwrap().value;
            assert!((x - y).abs() <= 1e-9, "{da}x{db} {s}->{t}: {x} vs {y}");
        }
    }
}

/// Final pure state of the four-system example with computational copy and
/// reference bases and amplitudes `c`, `d` on `A`, `B`.
fn example_final(channel: Vec<Gate>, c: &CVector, d: &CVector) -> owi_core::tensor::PureState {
    let n = c.len();
    let reg = Register::principals(&[("A", n), ("B", n)]).unwrap();
    let comp = Basis::computational(n).unwrap();
    let p = Process::new(
        reg,
        vec![InputGroup::pure(&["A"], c.clone()), InputGroup::pure(&["B"], d.clone())],
        ChannelSpec::new(channel),
    )
    .with_copy_basis("A", comp.clone())
    .with_copy_basis("B", comp.clone())
    .with_ref_basis("A", comp.clone())
    .with_ref_basis("B", comp);
    match p.execute(&Options::default()).unwrap().state {
        FinalState::Pure(s) => s,
        other => panic!("expected a pure final state, got {other:?}"),
    }
}

fn shannon(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

#[test]
fn illustrative_processes() {
    let c = ket(&[0.6, 0.0, 0.8]);
    let d = ket(&[0.5, 0.5, std::f64::consts::FRAC_1_SQRT_2]);
    let n = 3;
    let ctrl = |from: &str, to: &str| Gate::MultiControlled {
        controls: vec![from.into()],
        target: to.into(),
        target_basis: BasisSpec::Computational,
        shifts: shift_table(&[n], |x| x[0] as i64),
    };
    let (ap, bp) = (ancilla_label("A"), ancilla_label("B"));
    let zero = {
        let mut z = CMatrix::zeros(n, n);
        z[(0, 0)] = C64::new(1.0, 0.0);
        z
    };
    let assert_zero = |s: &owi_core::tensor::PureState, l: &str| {
        let r = s.partial_trace(&[l]).unwrap();
        assert!(common::max_abs_diff(r.matrix(), &zero) <= 1e-12, "{l} not in |0>");
    };

    let idle = example_final(vec![], &c, &d);
    assert_zero(&idle, "A");
    assert_zero(&idle, "B");
    let mi = mutual_information(&idle, &[&ap, "A"], &["B", &bp]).unwrap();
    assert!(mi.abs() <= 1e-9);

    let forward = example_final(vec![ctrl("A", "B")], &c, &d);
    assert_zero(&forward, "A");
    let mi = mutual_information(&forward, &[&ap], &["B"]).unwrap();
    assert!((mi - 2.0 * shannon(&c)).abs() <= 1e-9, "{mi}");
    assert!(mutual_information(&forward, &["A"], &[&bp]).unwrap().abs() <= 1e-9);

    let backward = example_final(vec![ctrl("B", "A")], &c, &d);
    assert_zero(&backward, "B");
    let mi = mutual_information(&backward, &["A"], &[&bp]).unwrap();
    assert!((mi - 2.0 * shannon(&d)).abs() <= 1e-9, "{mi}");
    assert!(mutual_information(&backward, &[&ap], &["B"]).unwrap().abs() <= 1e-9);
}

#[test]
fn every_pipeline_stage_is_a_valid_state() {
    use owi_core::protocol::{prepare_density, run_steps, ProtocolConfig};
    use owi_core::tensor::{hermitian_eigenvalues, hermiticity_deviation};
    let mut rng = seeded(41);
    let reg = qubits(&["A", "B"]);
    let inputs = vec![
        InputGroup::mixed(&["A"], random_density_matrix(2, &mut rng)),
        InputGroup::mixed(&["B"], random_density_matrix(2, &mut rng)),
    ];
    let p = Process::new(reg.clone(), inputs.clone(), ChannelSpec::new(vec![Gate::cnot("A", "B")]));
    let input = prepare_density(&reg, &inputs).unwrap();
    let config = ProtocolConfig::resolve(&p, &input).unwrap();
    let coupled = owi_core::protocol::step1_couple(&input, &config).unwrap();
    let evolved = owi_core::protocol::step2_evolve(&coupled, &p.channel, Default::default()).unwrap();
    let last = run_steps(&input, &p.channel, &config, Default::default()).unwrap();
    let dephased = last.dephase(&config.dephasing_bases()).unwrap();
    for rho in [&input, &coupled, &evolved, &last, &dephased] {
        assert!(hermiticity_deviation(rho.matrix()) <= 1e-10);
        assert!((rho.trace() - 1.0).abs() <= 1e-10);
        assert!(hermitian_eigenvalues(rho.matrix()).unwrap().iter().all(|&l| l >= -1e-9));
    }
}
