//! One test per acceptance criterion, each printing a single pass/fail line.

use stftpr_core::acceptance::{run_criterion, DEFAULT_SEED};

fn check(id: usize) {
    let report = run_criterion(id, DEFAULT_SEED).unwrap();
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_ambiguity_relation() {
    check(1);
}

#[test]
fn criterion_02_orthogonality_constant() {
    check(2);
}

#[test]
fn criterion_03_generic_window_recovery() {
    check(3);
}

#[test]
fn criterion_04_disconnected_signals() {
    check(4);
}

#[test]
fn criterion_05_punctured_center_window() {
    check(5);
}

#[test]
fn criterion_06_punctured_dc_window() {
    check(6);
}

#[test]
fn criterion_07_hole_based_recovery() {
    check(7);
}

#[test]
fn criterion_08_counterexample_suite() {
    check(8);
}

#[test]
fn criterion_09_line_mode() {
    check(9);
}

#[test]
fn criterion_10_oracle_equivalence() {
    check(10);
}
