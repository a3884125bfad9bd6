//! Seeded generator of well-formed process specs.

use owi_core::bases::{Basis, BasisSpec};
use owi_core::gates::{shift_table, ChannelSpec, Gate, ShiftSign, StandardGate};
use owi_core::protocol::{Mode, Query};
use owi_core::random::{haar_unitary, random_amplitudes, random_density_matrix, seeded, SeededRng};
use owi_core::specfile::{BasisDecl, ProcessSpec, StateDecl, StateKind};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

fn label(rng: &mut SeededRng, taken: &[(String, usize)]) -> String {
    loop {
        let len = rng.random_range(0..4);
        let mut s = String::new();
        s.push((b'A' + rng.random_range(0..26)) as char);
        for _ in 0..len {
            let pool = b"abcxyz0123_";
            s.push(*pool.choose(rng).unwrap() as char);
        }
        if !taken.iter().any(|(l, _)| *l == s) {
            return s;
        }
    }
}

fn state_kind(dims: &[usize], rng: &mut SeededRng) -> StateKind {
    let total: usize = dims.iter().product();
    match rng.random_range(0..5) {
        0 => StateKind::Ket(
            dims.iter()
                .map(|&d| match rng.random_range(0..4) {
                    0 => '+',
                    1 if d == 2 => '-',
                    _ => char::from_digit(rng.random_range(0..d as u32), 10).unwrap(),
                })
                .collect(),
        ),
        1 => StateKind::Amplitudes(random_amplitudes(total, rng).iter().copied().collect()),
        2 => StateKind::Mixed(random_density_matrix(total, rng)),
        3 => StateKind::MaximallyMixed,
        _ if dims.iter().all(|&d| d <= 10) => {
            let n = rng.random_range(1..=total.min(4));
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(rng);
            let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let fix: f64 = 1.0 - w[1..].iter().sum::<f64>();
            w[0] = fix;
            StateKind::Classical(idx[..n]
                .iter()
                .zip(w)
                .map(|(&i, p)| {
                    let mut digits = vec![0; dims.len()];
                    let mut rest = i;
                    for k in (0..dims.len()).rev() {
                        digits[k] = rest % dims[k];
                        rest /= dims[k];
                    }
                    (digits, p)
                })
                .collect())
        }
        _ => StateKind::MaximallyMixed,
    }
}

fn basis_decl(d: usize, rng: &mut SeededRng) -> BasisDecl {
    match rng.random_range(0..4) {
        0 => BasisDecl::Auto,
        1 => BasisDecl::Comp,
        2 => BasisDecl::Fourier,
        _ => BasisDecl::Custom(haar_unitary(d, rng)),
    }
}

fn gate_basis(d: usize, rng: &mut SeededRng) -> BasisSpec {
    match rng.random_range(0..3) {
        0 => BasisSpec::Computational,
        1 => BasisSpec::Fourier,
        _ => BasisSpec::Custom(Basis::new(haar_unitary(d, rng)).unwrap()),
    }
}

fn gate(systems: &[(String, usize)], rng: &mut SeededRng) -> Gate {
    let mut order: Vec<&(String, usize)> = systems.iter().collect();
    order.shuffle(rng);
    let (a, da) = (order[0].0.clone(), order[0].1);
    let (b, db) = (order[1].0.clone(), order[1].1);
    match rng.random_range(0..8) {
        0 if da == db => Gate::cnot(&a, &b),
        1 if da == db => Gate::ControlledShift {
            control: a,
            target: b,
            control_basis: gate_basis(da, rng),
            target_basis: gate_basis(db, rng),
            sign: if rng.random_bool(0.5) { ShiftSign::Plus } else { ShiftSign::Minus },
        },
        2 if da == db => Gate::Swap(a, b),
        3 if da == 2 => Gate::local(StandardGate::H, &a),
        4 => Gate::local(*[StandardGate::X, StandardGate::Z].choose(rng).unwrap(), &a),
        5 if order.len() > 2 && da == 2 && db == 2 && order[2].1 == 2 && rng.random_bool(0.5) => {
            Gate::ccnot(&a, &b, &order[2].0)
        }
        5 if order.len() > 2 => Gate::MultiControlled {
            controls: vec![a, b],
            target: order[2].0.clone(),
            target_basis: gate_basis(order[2].1, rng),
            shifts: shift_table(&[da, db], |x| (x[0] * x[1]) as i64 - 1),
        },
        6 => Gate::Custom {
            matrix: haar_unitary(da * db, rng),
            labels: vec![a, b],
        },
        _ => Gate::Custom {
            matrix: haar_unitary(da, rng),
            labels: vec![a],
        },
    }
}

pub fn random_spec(seed: u64) -> ProcessSpec {
    let mut rng = seeded(seed);
    let n = rng.random_range(2..=4);
    let mut systems = Vec::new();
    for _ in 0..n {
        let l = label(&mut rng, &systems);
        systems.push((l, rng.random_range(2..=4)));
    }
    let mut labels: Vec<String> = systems.iter().map(|(l, _)| l.clone()).collect();
    labels.shuffle(&mut rng);
    let mut states = Vec::new();
    let mut rest = &labels[..];
    while !rest.is_empty() {
        let k = rng.random_range(1..=rest.len().min(2));
        let group: Vec<String> = rest[..k].to_vec();
        let dims: Vec<usize> = group
            .iter()
            .map(|l| systems.iter().find(|(x, _)| x == l).unwrap().1)
            .collect();
        states.push(StateDecl {
            kind: state_kind(&dims, &mut rng),
            labels: group,
        });
        rest = &rest[k..];
    }
    let mut copy_bases = Vec::new();
    let mut ref_bases = Vec::new();
    for (l, d) in &systems {
        if rng.random_bool(0.4) {
            copy_bases.push((l.clone(), basis_decl(*d, &mut rng)));
        }
        if rng.random_bool(0.4) {
            ref_bases.push((l.clone(), basis_decl(*d, &mut rng)));
        }
    }
    let gates = (0..rng.random_range(0..5)).map(|_| gate(&systems, &mut rng)).collect();
    let mut queries = Vec::new();
    for _ in 0..rng.random_range(1..4) {
        labels.shuffle(&mut rng);
        let s = rng.random_range(1..labels.len());
        let t = rng.random_range(s + 1..=labels.len());
        let g = rng.random_range(t..=labels.len());
        queries.push(Query::given(&labels[..s], &labels[s..t], &labels[t..g]));
    }
    let mode = *[Mode::Quantum, Mode::QuantumProject, Mode::Classical].choose(&mut rng).unwrap();
    ProcessSpec {
        systems,
        states,
        copy_bases,
        ref_bases,
        channel: ChannelSpec::new(gates),
        queries,
        mode,
    }
}
