mod common;

use owi_core::entropy::{conditional_mutual_information, von_neumann_entropy};
use owi_core::random::{haar_unitary, random_density, seeded};
use owi_core::tensor::{DensityOperator, Register};
use owi_core::CMI_FLOOR;
use proptest::prelude::*;

fn reg(labels: &[&str]) -> Register {
    let decl: Vec<(&str, usize)> = labels.iter().map(|&l| (l, 2)).collect();
    Register::principals(&decl).unwrap()
}

#[test]
fn binary_entropy_of_quarter() {
    let rho = DensityOperator::from_probabilities(reg(&["a"]), &[0.75, 0.25]).unwrap();
    let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((von_neumann_entropy(&rho).unwrap() - h).abs() <= 1e-12);
    assert!((h - 0.811278).abs() < 1e-6);
}

#[test]
fn strong_subadditivity_on_500_states() {
    let mut rng = seeded(500);
    let mut worst = f64::INFINITY;
    for _ in 0..500 {
        let rho = random_density(reg(&["a", "b", "c"]), &mut rng).unwrap();
        for (a, g, b) in [("a", "c", "b"), ("b", "a", "c"), ("c", "b", "a")] {
            let v = conditional_mutual_information(&rho, &[a], &[g], &[b]).unwrap();
            worst = worst.min(v);
        }
    }
    assert!(worst >= CMI_FLOOR, "min CMI {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_additive(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_density(reg(&["a"]), &mut rng).unwrap();
        let b = random_density(reg(&["b", "c"]), &mut rng).unwrap();
        let ab = DensityOperator::tensor(&[a.clone(), b.clone()]).unwrap();
        let lhs = von_neumann_entropy(&ab).unwrap();
        let rhs = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let rho = random_density(reg(&["a", "b"]), &mut rng).unwrap();
        let u = haar_unitary(4, &mut rng);
        let out = rho.apply_unitary(&u, &["a", "b"]).unwrap();
        prop_assert!((von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&out).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn cmi_chain_rule(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let rho = random_density(reg(&["a", "g1", "g2", "b"]), &mut rng).unwrap();
        let whole = conditional_mutual_information(&rho, &["a"], &["g1", "g2"], &["b"]).unwrap();
        let first = conditional_mutual_information(&rho, &["a"], &["g1"], &["b"]).unwrap();
        let second = conditional_mutual_information(&rho, &["a"], &["g2"], &["b", "g1"]).unwrap();
        prop_assert!((whole - first - second).abs() <= 1e-9);
    }
}
