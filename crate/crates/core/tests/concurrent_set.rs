mod common;

#[test]
fn stress_matches_shadow_model() {
    let report = common::concurrent_set_stress(8, 1_000_000, 42);
    assert_eq!(report.operations, 1_000_000);
    assert_eq!(report.mismatches, 0);
    assert!(report.final_matches);
}

#[test]
fn stress_with_two_threads() {
    let report = common::concurrent_set_stress(2, 100_000, 7);
    assert_eq!(report.mismatches, 0);
    assert!(report.final_matches);
}
