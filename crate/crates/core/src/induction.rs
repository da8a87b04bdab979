//! Temporal induction of `<(preconditions &/ op) =/> outcome>` contingencies.
//!
//! A trial is the run of input observations after the previous operation (or
//! the previous trial's outcome), followed by an operation and then its
//! outcome: the first input observation after the operation, within the
//! temporal window. Candidate preconditions are anchored at the first event
//! of the trial: `(P1)` and `(P1 &/ Pj)` for each later `Pj`.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::EngineConfig;
use crate::memory::{Contingency, ContingencyTable, EventFifo, FifoEntry, StoreStatus};
use crate::term::{Symbol, Term, Var, VarKind};
use crate::truth::Evidence;

/// Result of inducing on one outcome event.
#[derive(Clone, Debug)]
pub struct Induction {
    pub operation: Term,
    pub consequent: Term,
    pub stored: Vec<(Contingency, StoreStatus)>,
}

/// The operation whose outcome `outcome_seq` is, if any.
pub fn find_trigger(fifo: &EventFifo, outcome_seq: u64, window: u64) -> Option<&FifoEntry> {
    let outcome = fifo.get(outcome_seq)?;
    if !outcome.event.is_input_observation() {
        return None;
    }
    for entry in fifo.before(outcome_seq) {
        let e = &entry.event;
        if !e.is_belief() || e.derived {
            continue;
        }
        if e.is_operation() {
            return (outcome.event.occurrence - e.occurrence <= window).then_some(entry);
        }
        // an earlier observation already closed this operation's trial
        return None;
    }
    None
}

/// Input observations that precede the operation `op_seq` in its trial, in
/// temporal order.
pub fn trial_segment(fifo: &EventFifo, op_seq: u64, window: u64) -> Vec<&FifoEntry> {
    let Some(op) = fifo.get(op_seq) else {
        return Vec::new();
    };
    let mut segment = Vec::new();
    for entry in fifo.before(op_seq) {
        let e = &entry.event;
        if !e.is_belief() || e.derived {
            continue;
        }
        if e.is_operation() || entry.outcome || op.event.occurrence - e.occurrence > window {
            break;
        }
        segment.push(entry);
    }
    segment.reverse();
    segment
}

/// Index selections into a trial segment, anchored at its first event.
pub fn anchored_selections(len: usize, max_events: usize, max_candidates: usize) -> Vec<Vec<usize>> {
    if len == 0 || max_events == 0 {
        return Vec::new();
    }
    let mut out = vec![vec![0]];
    let mut tails: Vec<Vec<usize>> = Vec::new();
    fn extend(start: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            return;
        }
        for i in start..len {
            cur.push(i);
            out.push(cur.clone());
            extend(i + 1, len, left - 1, cur, out);
            cur.pop();
        }
    }
    extend(1, len, max_events - 1, &mut Vec::new(), &mut tails);
    // most recent tail events first
    tails.sort_by(|a, b| b.iter().rev().cmp(a.iter().rev()).then(a.len().cmp(&b.len())));
    out.extend(tails.into_iter().map(|t| std::iter::once(0).chain(t).collect()));
    out.truncate(max_candidates);
    out
}

/// Induce contingencies for `outcome_seq` and store them, ground and
/// generalized.
pub fn on_outcome(
    outcome_seq: u64,
    fifo: &mut EventFifo,
    table: &mut ContingencyTable,
    now: u64,
    config: &EngineConfig,
) -> Option<Induction> {
    let window = config.temporal_window;
    let op_entry = find_trigger(fifo, outcome_seq, window)?;
    let op_seq = op_entry.seq;
    let operation = op_entry.event.term.clone();
    let outcome = fifo.get(outcome_seq)?.event.clone();

    let segment: Vec<_> = trial_segment(fifo, op_seq, window)
        .into_iter()
        .map(|e| e.event.clone())
        .collect();
    let op_stamp = op_entry.event.stamp.clone();
    fifo.mark_outcome(outcome_seq);

    let mut stored = Vec::new();
    let selections =
        anchored_selections(segment.len(), config.max_precondition_events, config.max_candidates_per_outcome);
    for selection in selections {
        let preconditions: Vec<Term> = selection.iter().map(|&i| segment[i].term.clone()).collect();
        let stamp = selection
            .iter()
            .fold(op_stamp.merge(&outcome.stamp, config.stamp_capacity), |acc, &i| {
                acc.merge(&segment[i].stamp, config.stamp_capacity)
            });
        let Ok(ground) = Contingency::from_parts(
            &preconditions,
            operation.clone(),
            outcome.term.clone(),
            Evidence::confirmation(),
            stamp,
            now,
            config.horizon,
        ) else {
            continue;
        };
        let general = introduce_variables_implication(&ground, config);
        for c in [Some(ground.clone()), (general != ground).then_some(general)].into_iter().flatten() {
            let status = table.store(c.clone());
            let current = table.get(c.term()).cloned().unwrap_or(c);
            stored.push((current, status));
        }
    }
    Some(Induction { operation, consequent: outcome.term, stored })
}

/// Abstract atoms shared between components of a contingency.
///
/// Components are the precondition events, the operation and the
/// consequent. An atom found in two or more components becomes a dependent
/// variable, or an independent one when the consequent mentions it.
pub fn introduce_variables_implication(c: &Contingency, config: &EngineConfig) -> Contingency {
    let mut components: Vec<&Term> = c.precondition_events();
    components.push(c.operation());
    components.push(c.consequent());
    let consequent_index = components.len() - 1;

    let mut seen_in: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
    for (i, comp) in components.iter().enumerate() {
        for atom in term_position_atoms(comp) {
            if !config.is_reserved(&atom) {
                seen_in.entry(atom).or_default().insert(i);
            }
        }
    }
    let mut mapping: BTreeMap<Symbol, Term> = BTreeMap::new();
    let (mut next_dep, mut next_indep) = (0u32, 0u32);
    for (atom, comps) in seen_in {
        if comps.len() < 2 {
            continue;
        }
        let var = if comps.contains(&consequent_index) {
            next_indep += 1;
            Var { kind: VarKind::Independent, index: next_indep }
        } else {
            next_dep += 1;
            Var { kind: VarKind::Dependent, index: next_dep }
        };
        mapping.insert(atom, Term::var(var));
    }
    if mapping.is_empty() {
        return c.clone();
    }
    let term = abstract_atoms(c.term(), &mapping);
    Contingency::new(term, c.evidence, c.stamp.clone(), c.last_confirmed, config.horizon)
        .map(|mut g| {
            g.truth = c.truth;
            g
        })
        .unwrap_or_else(|_| c.clone())
}

/// Atoms sitting inside compound terms, skipping atoms that stand for a
/// whole statement (an element of a sequence, a side of a copula).
pub fn term_position_atoms(statement: &Term) -> Vec<Symbol> {
    let mut out = Vec::new();
    fn statement_level(t: &Term, out: &mut Vec<Symbol>) {
        match t {
            Term::Sequence(a, b) | Term::Implication(a, b) | Term::Equivalence(a, b) => {
                statement_level(a, out);
                statement_level(b, out);
            }
            Term::Atom(_) | Term::IndependentVar(_) | Term::DependentVar(_) => {}
            other => other.walk(&mut |s| {
                if let Term::Atom(name) = s {
                    out.push(name.clone());
                }
            }),
        }
    }
    statement_level(statement, &mut out);
    out
}

/// Replace term-position atoms according to `mapping`.
pub fn abstract_atoms(statement: &Term, mapping: &BTreeMap<Symbol, Term>) -> Term {
    fn term_level(t: &Term, mapping: &BTreeMap<Symbol, Term>) -> Term {
        match t {
            Term::Atom(name) => mapping.get(name).cloned().unwrap_or_else(|| t.clone()),
            Term::Product(a, b) => Term::product(term_level(a, mapping), term_level(b, mapping)),
            Term::Inheritance(a, b) => Term::inheritance(term_level(a, mapping), term_level(b, mapping)),
            Term::Sequence(a, b) => Term::sequence(term_level(a, mapping), term_level(b, mapping)),
            Term::Implication(a, b) => Term::implication(term_level(a, mapping), term_level(b, mapping)),
            Term::Equivalence(a, b) => Term::equivalence(term_level(a, mapping), term_level(b, mapping)),
            other => other.clone(),
        }
    }
    match statement {
        Term::Sequence(a, b) => Term::sequence(abstract_atoms(a, mapping), abstract_atoms(b, mapping)),
        Term::Implication(a, b) => Term::implication(abstract_atoms(a, mapping), abstract_atoms(b, mapping)),
        Term::Equivalence(a, b) => Term::equivalence(abstract_atoms(a, mapping), abstract_atoms(b, mapping)),
        Term::Atom(_) => statement.clone(),
        other => term_level(other, mapping),
    }
}
