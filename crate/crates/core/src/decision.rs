//! Goal-driven operation selection.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::memory::{ContingencyTable, Event, EventFifo, FifoEntry};
use crate::term::{substitute, unify_into, Bindings, Symbol, Term};
use crate::truth::{deduction, TruthValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("operator slots start at 1 (got {0})")]
    Slot(u32),
    #[error("invalid operator name {0:?}")]
    Name(String),
}

/// Numbered operator slots, as set by `*setopname`.
#[derive(Clone, Debug, Default)]
pub struct OperatorRegistry {
    slots: BTreeMap<u32, Symbol>,
}

impl OperatorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, slot: u32, name: &str) -> Result<(), RegistryError> {
        if slot < 1 {
            return Err(RegistryError::Slot(slot));
        }
        let bare = name.strip_prefix('^').unwrap_or(name);
        if bare.is_empty() {
            return Err(RegistryError::Name(name.to_string()));
        }
        self.slots.insert(slot, Symbol::from(bare));
        Ok(())
    }

    pub fn slot(&self, slot: u32) -> Option<&Symbol> {
        self.slots.get(&slot)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.slots.values().any(|s| &**s == name)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Symbol)> {
        self.slots.iter().map(|(k, v)| (*k, v))
    }
}

/// One way of reaching a goal: a contingency whose preconditions hold in
/// recent memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub operation: Term,
    pub desire: TruthValue,
    pub expectation: f64,
    pub contingency: Term,
    pub contingency_confidence: f64,
    pub last_confirmed: u64,
    /// FIFO sequence numbers of the matched precondition events.
    pub matched: Vec<u64>,
}

impl Candidate {
    fn recency(&self) -> Vec<u64> {
        let mut m = self.matched.clone();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    /// Whether `self` should be preferred over `other`.
    fn beats(&self, other: &Candidate) -> bool {
        self.expectation
            .total_cmp(&other.expectation)
            .then(self.contingency_confidence.total_cmp(&other.contingency_confidence))
            .then(self.last_confirmed.cmp(&other.last_confirmed))
            .then_with(|| self.recency().cmp(&other.recency()))
            .is_gt()
    }
}

/// Every executable candidate for `goal` at time `now`.
pub fn candidates(
    goal: &Event,
    fifo: &EventFifo,
    table: &ContingencyTable,
    registry: &OperatorRegistry,
    now: u64,
    window: u64,
) -> Vec<Candidate> {
    let beliefs: Vec<&FifoEntry> = fifo
        .iter()
        .filter(|e| e.event.is_belief() && !e.event.is_operation() && now.saturating_sub(e.event.occurrence) <= window)
        .collect();
    let mut out = Vec::new();
    for (c, bindings) in table.query(&goal.term) {
        let pre = c.precondition_events();
        let mut found = Vec::new();
        match_preconditions(&pre, &beliefs, bindings, &mut Vec::new(), &mut found);
        for (b, matched) in found {
            let operation = substitute(c.operation(), &b);
            let registered = operation.operator_name().is_some_and(|n| registry.contains(n));
            if !operation.is_ground() || !registered {
                continue;
            }
            let weakest = matched
                .iter()
                .map(|e: &&FifoEntry| e.event.truth)
                .min_by(|a, b| a.expectation().total_cmp(&b.expectation()))
                .expect("at least one precondition");
            let desire = deduction(deduction(goal.truth, c.truth), weakest);
            out.push(Candidate {
                operation,
                desire,
                expectation: desire.expectation(),
                contingency: c.term().clone(),
                contingency_confidence: c.truth.confidence(),
                last_confirmed: c.last_confirmed,
                matched: matched.iter().map(|e| e.seq).collect(),
            });
        }
    }
    out
}

fn match_preconditions<'a>(
    pre: &[&Term],
    beliefs: &[&'a FifoEntry],
    bindings: Bindings,
    chosen: &mut Vec<&'a FifoEntry>,
    found: &mut Vec<(Bindings, Vec<&'a FifoEntry>)>,
) {
    let Some((first, rest)) = pre.split_first() else {
        found.push((bindings, chosen.clone()));
        return;
    };
    let pattern = substitute(first, &bindings);
    let floor = chosen.last().map_or(0, |e| e.event.occurrence);
    for entry in beliefs {
        if entry.event.occurrence < floor
            || chosen.iter().any(|c| c.seq == entry.seq || c.event.term == entry.event.term)
        {
            continue;
        }
        let mut b = bindings.clone();
        if !unify_into(&pattern, &entry.event.term, &mut b) {
            continue;
        }
        chosen.push(entry);
        match_preconditions(rest, beliefs, b, chosen, found);
        chosen.pop();
    }
}

/// The preferred candidate: highest expectation, then contingency
/// confidence, then recency.
pub fn best(candidates: &[Candidate]) -> Option<&Candidate> {
    let mut best: Option<&Candidate> = None;
    for c in candidates {
        if best.is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    best
}

/// What a goal led to.
#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    Execute(Candidate),
    Babble(Term),
}

impl Decision {
    pub fn operation(&self) -> &Term {
        match self {
            Decision::Execute(c) => &c.operation,
            Decision::Babble(t) => t,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecisionMaker {
    pub registry: OperatorRegistry,
    pub threshold: f64,
    pub babbling_rate: f64,
    pub babbling_ops: u32,
    rng: ChaCha8Rng,
}

impl DecisionMaker {
    pub fn new(threshold: f64, babbling_rate: f64, babbling_ops: u32, seed: u64) -> Self {
        DecisionMaker {
            registry: OperatorRegistry::new(),
            threshold,
            babbling_rate,
            babbling_ops,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn decide(
        &mut self,
        goal: &Event,
        fifo: &EventFifo,
        table: &ContingencyTable,
        now: u64,
        window: u64,
    ) -> Option<Decision> {
        let all = candidates(goal, fifo, table, &self.registry, now, window);
        match best(&all) {
            Some(c) if c.expectation > self.threshold => Some(Decision::Execute(c.clone())),
            _ => self.babble().map(Decision::Babble),
        }
    }

    /// With probability `babbling_rate`, a random operation from the first
    /// `babbling_ops` slots.
    pub fn babble(&mut self) -> Option<Term> {
        if self.babbling_rate <= 0.0 || self.babbling_ops == 0 {
            return None;
        }
        if self.rng.random::<f64>() >= self.babbling_rate {
            return None;
        }
        let ops: Vec<&Symbol> = self
            .registry
            .iter()
            .filter(|(slot, _)| *slot <= self.babbling_ops)
            .map(|(_, name)| name)
            .collect();
        if ops.is_empty() {
            return None;
        }
        let pick = ops[self.rng.random_range(0..ops.len())];
        Some(Term::operation(pick, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{Contingency, Stamp};
    use crate::narsese::parse_term;
    use crate::truth::Evidence;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn setup(contingencies: &[&str], events: &[(&str, u64)]) -> (EventFifo, ContingencyTable, DecisionMaker) {
        let mut table = ContingencyTable::new(256, 1.0, 16);
        for (i, c) in contingencies.iter().enumerate() {
            table.store(Contingency::new(t(c), Evidence::confirmation(), Stamp::single(100 + i as u64), 0, 1.0).unwrap());
        }
        let mut fifo = EventFifo::new(20);
        for (i, (e, occ)) in events.iter().enumerate() {
            fifo.push(Event::belief(t(e), TruthValue::default(), *occ, Stamp::single(i as u64)));
        }
        let mut dm = DecisionMaker::new(0.51, 0.0, 0, 0);
        for (slot, op) in ["op1", "select", "say"].iter().enumerate() {
            dm.registry.register(slot as u32 + 1, op).unwrap();
        }
        (fifo, table, dm)
    }

    fn goal(now: u64) -> Event {
        Event::goal(t("G"), TruthValue::default(), now, Stamp::single(999))
    }

    #[test]
    fn registry_rejects_slot_zero() {
        let mut r = OperatorRegistry::new();
        assert_eq!(r.register(0, "^x"), Err(RegistryError::Slot(0)));
        r.register(1, "^x").unwrap();
        assert!(r.contains("x"));
    }

    #[test]
    fn executes_matching_contingency() {
        let (fifo, table, mut dm) = setup(&["<(A &/ <{SELF} --> ^op1>) =/> G>"], &[("A", 0)]);
        let d = dm.decide(&goal(1), &fifo, &table, 2, 10).unwrap();
        let Decision::Execute(c) = d else { panic!() };
        assert_eq!(c.operation, t("<{SELF} --> ^op1>"));
        // (1, 0.5) ded (1, 0.9) ded (1, 0.9) at the goal's (1, 0.9)
        assert!((c.desire.confidence() - 0.9 * 0.5 * 0.9).abs() < 1e-12);
    }

    #[test]
    fn stale_precondition_is_ignored() {
        let (fifo, table, mut dm) = setup(&["<(A &/ <{SELF} --> ^op1>) =/> G>"], &[("A", 0)]);
        assert!(dm.decide(&goal(20), &fifo, &table, 20, 10).is_none());
    }

    #[test]
    fn variable_binding_flows_to_operation() {
        let (fifo, table, mut dm) = setup(
            &["<(<(#1 * red) --> (loc * color)> &/ <({SELF} * #1) --> ^select>) =/> G>"],
            &[("<(up * red) --> (loc * color)>", 0)],
        );
        let d = dm.decide(&goal(1), &fifo, &table, 2, 10).unwrap();
        assert_eq!(d.operation(), &t("<({SELF} * up) --> ^select>"));
    }

    #[test]
    fn unregistered_operation_not_executed() {
        let (fifo, table, mut dm) = setup(&["<(A &/ <{SELF} --> ^fly>) =/> G>"], &[("A", 0)]);
        assert!(dm.decide(&goal(1), &fifo, &table, 2, 10).is_none());
    }

    #[test]
    fn two_preconditions_in_order() {
        let c = "<((A &/ B) &/ <{SELF} --> ^op1>) =/> G>";
        let (fifo, table, mut dm) = setup(&[c], &[("B", 0), ("A", 1)]);
        assert!(dm.decide(&goal(2), &fifo, &table, 3, 10).is_none());
        let (fifo, table, mut dm) = setup(&[c], &[("A", 0), ("B", 1)]);
        assert!(dm.decide(&goal(2), &fifo, &table, 3, 10).is_some());
    }

    #[test]
    fn below_threshold_without_babbling_does_nothing() {
        let (fifo, table, mut dm) = setup(&["<(A &/ <{SELF} --> ^op1>) =/> G>"], &[("A", 0)]);
        dm.threshold = 0.99;
        assert!(dm.decide(&goal(1), &fifo, &table, 2, 10).is_none());
    }

    #[test]
    fn babbling_is_seeded() {
        let run = |seed| {
            let mut dm = DecisionMaker::new(0.51, 0.5, 3, seed);
            for (slot, op) in ["a", "b", "c", "d"].iter().enumerate() {
                dm.registry.register(slot as u32 + 1, op).unwrap();
            }
            (0..50).map(|_| dm.babble()).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        let picks = run(7);
        assert!(picks.iter().flatten().all(|t| t != &Term::operation("d", None)));
        assert!(picks.iter().any(Option::is_some) && picks.iter().any(Option::is_none));
    }

    #[test]
    fn tie_prefers_higher_confidence_then_recency() {
        let base = Candidate {
            operation: t("<{SELF} --> ^op1>"),
            desire: TruthValue::default(),
            expectation: 0.6,
            contingency: t("<(A &/ <{SELF} --> ^op1>) =/> G>"),
            contingency_confidence: 0.5,
            last_confirmed: 1,
            matched: vec![1],
        };
        let confident = Candidate { contingency_confidence: 0.6, ..base.clone() };
        let recent = Candidate { matched: vec![5], ..base.clone() };
        assert_eq!(best(&[base.clone(), confident.clone()]), Some(&confident));
        assert_eq!(best(&[recent.clone(), base.clone()]), Some(&recent));
        assert_eq!(best(&[base.clone(), base.clone()]), Some(&base));
    }
}
