#![allow(dead_code)]

use std::path::PathBuf;

use feq_core::harness::{run_fixture, Fixture, Report};
use feq_core::{EngineConfig, Term, Var};
use proptest::prelude::*;
use rand::Rng;

pub const FIXTURES: &[&str] = &["s3_minimal", "s3_transfer", "s3_gate", "s4_reading", "s4_mirror"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.nal"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn run(name: &str) -> Report {
    let fixture = Fixture::parse(name, &fixture_text(name)).expect("fixture parses");
    run_fixture(&fixture, EngineConfig::default()).expect("fixture runs")
}

const NAMES: &[&str] = &["a", "B", "left", "r-e-d", "c-a-t", "x_1", "loc", "G", "sample", "q9"];
const OPS: &[&str] = &["say", "select", "match", "op1"];

/// Random syntactically valid term of at most `depth` levels.
pub fn random_term(rng: &mut impl Rng, depth: u32) -> Term {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..10) {
            0 => Term::IndependentVar(rng.random_range(1..5)),
            1 => Term::DependentVar(rng.random_range(1..5)),
            2 => Term::SelfMarker,
            3 => Term::operator(OPS[rng.random_range(0..OPS.len())]),
            _ => Term::atom(NAMES[rng.random_range(0..NAMES.len())]),
        };
    }
    let a = random_term(rng, depth - 1);
    let b = random_term(rng, depth - 1);
    match rng.random_range(0..5) {
        0 => Term::product(a, b),
        1 => Term::inheritance(a, b),
        2 => Term::sequence(a, b),
        3 => Term::implication(a, b),
        _ => Term::equivalence(a, b),
    }
}

/// Random ground term (no variables).
pub fn random_ground(rng: &mut impl Rng, depth: u32) -> Term {
    let t = random_term(rng, depth);
    ground(&t)
}

pub fn ground(t: &Term) -> Term {
    match t {
        Term::IndependentVar(i) | Term::DependentVar(i) => Term::atom(&format!("k{i}")),
        _ => match t.children() {
            Some((a, b)) => rebuild(t, ground(a), ground(b)),
            None => t.clone(),
        },
    }
}

fn rebuild(t: &Term, a: Term, b: Term) -> Term {
    match t {
        Term::Product(..) => Term::product(a, b),
        Term::Inheritance(..) => Term::inheritance(a, b),
        Term::Sequence(..) => Term::sequence(a, b),
        Term::Implication(..) => Term::implication(a, b),
        Term::Equivalence(..) => Term::equivalence(a, b),
        _ => unreachable!(),
    }
}

pub fn arb_leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => proptest::sample::select(NAMES).prop_map(Term::atom),
        1 => (1u32..5).prop_map(|i| Term::var(Var::independent(i))),
        1 => (1u32..5).prop_map(|i| Term::var(Var::dependent(i))),
        1 => Just(Term::SelfMarker),
        1 => proptest::sample::select(OPS).prop_map(Term::operator),
    ]
}

pub fn arb_term() -> impl Strategy<Value = Term> {
    arb_leaf().prop_recursive(4, 32, 2, |inner| {
        (0u8..5, inner.clone(), inner).prop_map(|(k, a, b)| match k {
            0 => Term::product(a, b),
            1 => Term::inheritance(a, b),
            2 => Term::sequence(a, b),
            3 => Term::implication(a, b),
            _ => Term::equivalence(a, b),
        })
    })
}

pub fn arb_ground_term() -> impl Strategy<Value = Term> {
    arb_term().prop_map(|t| ground(&t))
}
