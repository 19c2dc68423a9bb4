//! One test per reproduction criterion. Each prints a PASS/FAIL line, then
//! asserts it.

use alpha_selfaction::verify::{self, Outcome};

fn report(o: Outcome) {
    println!("{}", o.line());
    assert!(o.passed, "{}", o.line());
}

#[test]
fn criterion_1_coefficient_exactness() {
    report(verify::coefficients());
}

#[test]
fn criterion_2_product_exactness() {
    report(verify::products());
}

#[test]
fn criterion_3_moment_identities() {
    report(verify::moments());
}

#[test]
fn criterion_4_beta_relation() {
    report(verify::beta_relation());
}

#[test]
fn criterion_5_alpha_root() {
    report(verify::alpha_root());
}

#[test]
fn criterion_6_refinement_convergence() {
    report(verify::refinement());
}

#[test]
fn criterion_7_series_vs_ode() {
    report(verify::series_ode());
}

#[test]
fn criterion_8_density_tables() {
    report(verify::density_tables());
}

#[test]
fn criterion_9_structural_checks() {
    report(verify::structural());
}
