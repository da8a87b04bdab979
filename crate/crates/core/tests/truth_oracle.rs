//! Truth functions against hand-computed evidence arithmetic.

use feq_core::truth::{analogy, comparison, deduction, expectation, induction_from_counts, revise};
use feq_core::{Evidence, TruthValue};

fn tv(f: f64, c: f64) -> TruthValue {
    TruthValue::new(f, c).unwrap()
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn expectation_of_default_input() {
    // 0.9 * (1.0 - 0.5) + 0.5
    close(expectation(tv(1.0, 0.9)), 0.95);
}

#[test]
fn revision_pools_weights() {
    // c = 0.5 at k = 1 is one unit of evidence; two units give 2/3
    let r = revise(tv(1.0, 0.5), tv(1.0, 0.5), 1.0);
    close(r.frequency(), 1.0);
    close(r.confidence(), 2.0 / 3.0);
    let r = revise(tv(1.0, 0.5), tv(0.0, 0.5), 1.0);
    close(r.frequency(), 0.5);
    close(r.confidence(), 2.0 / 3.0);
}

#[test]
fn induction_from_trial_counts() {
    for (pos, total, f, c) in [(1.0, 1.0, 1.0, 0.5), (2.0, 2.0, 1.0, 2.0 / 3.0), (1.0, 2.0, 0.5, 2.0 / 3.0)] {
        let t = induction_from_counts(Evidence::new(pos, total).unwrap(), 1.0).unwrap();
        close(t.frequency(), f);
        close(t.confidence(), c);
    }
}

#[test]
fn deduction_of_two_inputs() {
    let d = deduction(tv(1.0, 0.9), tv(1.0, 0.9));
    close(d.frequency(), 1.0);
    close(d.confidence(), 0.81);
}

#[test]
fn comparison_of_two_inputs() {
    // shared weight 0.9 * 0.9 = 0.81 evidence units
    let t = comparison(tv(1.0, 0.9), tv(1.0, 0.9), 1.0);
    close(t.frequency(), 1.0);
    close(t.confidence(), 0.81 / 1.81);
    close(t.confidence(), 0.447514);
}

#[test]
fn analogy_across_equivalence() {
    let eq = tv(1.0, 0.81 / 1.81);
    let t = analogy(tv(1.0, 0.9), eq);
    close(t.frequency(), 1.0);
    close(t.confidence(), 0.9 * 0.81 / 1.81);
    close(t.confidence(), 0.402762);
}

#[test]
fn scenario_decision_values() {
    // equivalence from two single-trial contingencies: w = 0.5 * 0.5
    let eq = comparison(tv(1.0, 0.5), tv(1.0, 0.5), 1.0);
    close(eq.confidence(), 0.25 / 1.25);
    // substituted event
    let s = analogy(tv(1.0, 0.9), eq);
    close(s.confidence(), 0.18);
    // goal, single-trial rule, substituted precondition
    let d = deduction(deduction(tv(1.0, 0.9), tv(1.0, 0.5)), s);
    close(expectation(d), 0.5 + 0.5 * 0.9 * 0.5 * 0.18);
    close(expectation(d), 0.5405);
    // rule pooled over three trials: w = 3, c = 0.75
    let d = deduction(deduction(tv(1.0, 0.9), tv(1.0, 0.75)), s);
    close(expectation(d), 0.56075);
}
