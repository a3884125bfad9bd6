#[path = "support/specgen.rs"]
mod specgen;

use owi_core::specfile::{parse, serialize, SpecErrorKind};
use proptest::prelude::*;
use specgen::random_spec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let text = serialize(&spec).unwrap();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(serialize(&back).unwrap(), text);
    }
}

#[test]
fn output_is_stable_across_runs() {
    let a = serialize(&random_spec(7)).unwrap();
    let b = serialize(&random_spec(7)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn custom_bases_print_seventeen_significant_digits() {
    let text = "system A dim 2\nstate A pure \"0\"\nrefbasis A custom [[0.6, 0.8], [0.8, -0.6]]\nchannel { }\nquery owi A -> A\n";
    // A query from a system to itself is rejected; use two systems.
    assert!(parse(text).is_err());
    let text = text.replace("system A dim 2\n", "system A dim 2\nsystem B dim 2\nstate B pure \"1\"\n").replace("A -> A", "A -> B");
    let out = serialize(&parse(&text).unwrap()).unwrap();
    assert!(out.contains("refbasis A custom [[5.9999999999999998e-1, 8.0000000000000004e-1], [8.0000000000000004e-1, -5.9999999999999998e-1]]"), "{out}");
    assert!(out.contains("state A pure \"0\""));
}

#[test]
fn three_error_classes_carry_line_numbers() {
    let good = "system A dim 2\nsystem B dim 2\nstate A pure \"+\"\nstate B pure \"0\"\nchannel { cnot A B }\nquery owi A -> B\n";
    let bad_syntax = good.replace("query owi A -> B", "query owi A => B");
    let e = parse(&bad_syntax).unwrap_err();
    assert!(matches!(e.kind, SpecErrorKind::Syntax(_)) && e.line == 6, "{e}");
    let undeclared = good.replace("query owi A -> B", "query owi A -> C");
    let e = parse(&undeclared).unwrap_err();
    assert!(matches!(e.kind, SpecErrorKind::UndeclaredLabel(_)) && e.line == 6, "{e}");
    let non_unitary = good.replace("cnot A B", "unitary [[1, 0], [0, 2]] on B");
    let e = parse(&non_unitary).unwrap_err();
    assert!(matches!(e.kind, SpecErrorKind::Invalid(owi_core::Error::NotUnitary(_))) && e.line == 5, "{e}");
    for err in [parse(&bad_syntax), parse(&undeclared), parse(&non_unitary)] {
        assert!(err.unwrap_err().to_string().starts_with("line "));
    }
}

#[test]
fn generated_specs_build_processes() {
    for seed in 0..50 {
        let spec = random_spec(seed);
        spec.to_process().unwrap();
    }
}
