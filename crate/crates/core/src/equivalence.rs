//! Functional equivalence: two preconditions that let the same operation
//! reach the same consequent are interchangeable, and events can be carried
//! from one side of a stored equivalence to the other.

use std::collections::{BTreeMap, HashSet};

use crate::config::EngineConfig;
use crate::induction::{abstract_atoms, term_position_atoms};
use crate::memory::{
    Contingency, ContingencyTable, EquivalenceRecord, EquivalenceTable, Event, Side, StoreStatus,
};
use crate::term::{normalize, substitute, Symbol, Term, Var};
use crate::truth::{analogy, comparison};

/// Ground contingencies for `op` and `consequent` eligible for equivalence
/// derivation, in table order.
pub fn eligible<'a>(
    table: &'a ContingencyTable,
    op: &Term,
    consequent: &Term,
    config: &EngineConfig,
) -> Vec<&'a Contingency> {
    let op = normalize(op);
    let consequent = normalize(consequent);
    // stored terms are normalized, and a ground subterm of a normalized term
    // is itself normalized
    table
        .iter()
        .filter(|c| {
            c.truth.confidence() >= config.min_equivalence_confidence
                && c.operation() == &op
                && c.consequent() == &consequent
                && c.term().is_ground()
        })
        .collect()
}

/// Derive and store equivalences licensed by an execution of `op` that led
/// to `consequent`. Only pairs involving a `fresh` contingency (one just
/// confirmed) are compared; older pairs were compared when they were fresh.
/// Returns every record offered to the store.
pub fn derive_on_execution(
    op: &Term,
    consequent: &Term,
    fresh: &[Term],
    contingencies: &ContingencyTable,
    equivalences: &mut EquivalenceTable,
    now: u64,
    config: &EngineConfig,
) -> Vec<(EquivalenceRecord, StoreStatus)> {
    let candidates = eligible(contingencies, op, consequent, config);
    let mut derived = Vec::new();
    for (i, a) in candidates.iter().enumerate() {
        for b in &candidates[i + 1..] {
            let involves_fresh = fresh.contains(a.term()) || fresh.contains(b.term());
            if !involves_fresh || a.precondition() == b.precondition() || a.stamp.overlaps(&b.stamp) {
                continue;
            }
            let Ok(record) = EquivalenceRecord::new(
                a.precondition().clone(),
                b.precondition().clone(),
                comparison(a.truth, b.truth, config.horizon),
                a.stamp.merge(&b.stamp, config.stamp_capacity),
                op.clone(),
                now,
            ) else {
                continue;
            };
            let reduced = cancel_common_conjunct(&record);
            let mut batch = vec![record];
            batch.extend(reduced);
            let general: Vec<_> = batch
                .iter()
                .map(|r| introduce_variables_equiv(r, config))
                .filter(|g| !batch.contains(g))
                .collect();
            batch.extend(general);
            derived.extend(batch);
        }
    }
    let mut out: Vec<(EquivalenceRecord, StoreStatus)> = Vec::new();
    let mut seen = HashSet::new();
    for r in derived {
        if !seen.insert((r.term(), r.stamp.clone())) {
            continue;
        }
        let status = equivalences.store(r.clone());
        let current = equivalences.get(&r.term()).cloned().unwrap_or(r);
        out.push((current, status));
    }
    out
}

/// `<(X &/ A) <=> (X &/ B)>` becomes `<A <=> B>`, and likewise for a shared
/// trailing conjunct.
pub fn cancel_common_conjunct(r: &EquivalenceRecord) -> Option<EquivalenceRecord> {
    let (Term::Sequence(x, a), Term::Sequence(y, b)) = (r.left(), r.right()) else {
        return None;
    };
    let (left, right) = if x == y {
        (a, b)
    } else if a == b {
        (x, y)
    } else {
        return None;
    };
    EquivalenceRecord::new(
        (**left).clone(),
        (**right).clone(),
        r.truth,
        r.stamp.clone(),
        r.trigger_op.clone(),
        r.created_at,
    )
    .ok()
}

/// Abstract every non-reserved atom that occurs in a term position on both
/// sides into an independent variable.
pub fn introduce_variables_equiv(r: &EquivalenceRecord, config: &EngineConfig) -> EquivalenceRecord {
    let left = term_position_atoms(r.left());
    let right = term_position_atoms(r.right());
    let mut mapping: BTreeMap<Symbol, Term> = BTreeMap::new();
    for atom in left {
        if right.contains(&atom) && !config.is_reserved(&atom) && !mapping.contains_key(&atom) {
            let index = mapping.len() as u32 + 1;
            mapping.insert(atom, Term::var(Var::independent(index)));
        }
    }
    if mapping.is_empty() {
        return r.clone();
    }
    EquivalenceRecord::new(
        abstract_atoms(r.left(), &mapping),
        abstract_atoms(r.right(), &mapping),
        r.truth,
        r.stamp.clone(),
        r.trigger_op.clone(),
        r.created_at,
    )
    .unwrap_or_else(|_| r.clone())
}

/// Events obtained by carrying `event` across a stored equivalence, one hop.
pub fn substitute_event(event: &Event, store: &EquivalenceTable, config: &EngineConfig) -> Vec<Event> {
    if !event.is_belief() || event.derived || event.is_operation() {
        return Vec::new();
    }
    let mut out: Vec<Event> = Vec::new();
    for (record, side, bindings) in store.query(&event.term) {
        let other = match side {
            Side::Left => record.right(),
            Side::Right => record.left(),
        };
        let term = substitute(other, &bindings);
        if !term.is_ground() || term == event.term || term.is_operation() {
            continue;
        }
        let derived = Event {
            term,
            truth: analogy(event.truth, record.truth),
            occurrence: event.occurrence,
            punctuation: event.punctuation,
            stamp: event.stamp.merge(&record.stamp, config.stamp_capacity),
            derived: true,
        };
        match out.iter_mut().find(|e| e.term == derived.term) {
            Some(existing) if existing.truth.confidence() < derived.truth.confidence() => *existing = derived,
            Some(_) => {}
            None => out.push(derived),
        }
    }
    out
}
