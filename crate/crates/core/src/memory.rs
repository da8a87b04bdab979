//! Bounded stores: the recent-event FIFO, the contingency table and the
//! equivalence table.
//!
//! Every store has a hard capacity. Tables evict by the expectation (or
//! confidence) of their entries, oldest first on ties.

use std::collections::VecDeque;

use indexmap::IndexMap;

use crate::narsese::Punctuation;
use crate::term::{normalize, unify, Bindings, Term};
use crate::truth::{expectation, induction_from_counts, revise, Evidence, TruthValue};

/// Evidential base: ids of the input events an item was derived from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Stamp {
    ids: Vec<u64>,
}

impl Stamp {
    pub fn single(id: u64) -> Self {
        Stamp { ids: vec![id] }
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn overlaps(&self, other: &Stamp) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
        false
    }

    /// Union, keeping the `cap` most recent ids.
    pub fn merge(&self, other: &Stamp, cap: usize) -> Stamp {
        let mut ids: Vec<u64> = self.ids.iter().chain(&other.ids).copied().collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() > cap {
            ids.drain(..ids.len() - cap);
        }
        Stamp { ids }
    }
}

impl FromIterator<u64> for Stamp {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut ids: Vec<u64> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Stamp { ids }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub term: Term,
    pub truth: TruthValue,
    pub occurrence: u64,
    pub punctuation: Punctuation,
    pub stamp: Stamp,
    /// Produced by substitution rather than input.
    pub derived: bool,
}

impl Event {
    pub fn belief(term: Term, truth: TruthValue, occurrence: u64, stamp: Stamp) -> Self {
        Event { term, truth, occurrence, punctuation: Punctuation::Belief, stamp, derived: false }
    }

    pub fn goal(term: Term, truth: TruthValue, occurrence: u64, stamp: Stamp) -> Self {
        Event { term, truth, occurrence, punctuation: Punctuation::Goal, stamp, derived: false }
    }

    pub fn is_belief(&self) -> bool {
        self.punctuation == Punctuation::Belief
    }

    pub fn is_operation(&self) -> bool {
        self.is_belief() && self.term.is_operation()
    }

    /// Input belief that is not an operation.
    pub fn is_input_observation(&self) -> bool {
        self.is_belief() && !self.derived && !self.term.is_operation()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FifoEntry {
    /// Monotone push counter; orders events that share a time step.
    pub seq: u64,
    pub event: Event,
    /// This event closed a trial as the outcome of an operation.
    pub outcome: bool,
    /// Operation chosen by the engine itself (decision or babbling).
    pub executed: bool,
}

/// Recent events, oldest first.
#[derive(Clone, Debug)]
pub struct EventFifo {
    entries: VecDeque<FifoEntry>,
    capacity: usize,
    next_seq: u64,
}

impl EventFifo {
    pub fn new(capacity: usize) -> Self {
        EventFifo { entries: VecDeque::with_capacity(capacity), capacity: capacity.max(1), next_seq: 0 }
    }

    pub fn push(&mut self, event: Event) -> u64 {
        self.push_entry(event, false)
    }

    pub fn push_executed(&mut self, event: Event) -> u64 {
        self.push_entry(event, true)
    }

    fn push_entry(&mut self, event: Event, executed: bool) -> u64 {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.entries.push_back(FifoEntry { seq, event, outcome: false, executed });
        seq
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &FifoEntry> {
        self.entries.iter()
    }

    /// Most recent first.
    pub fn recent(&self) -> impl Iterator<Item = &FifoEntry> {
        self.entries.iter().rev()
    }

    pub fn get(&self, seq: u64) -> Option<&FifoEntry> {
        self.entries.iter().find(|e| e.seq == seq)
    }

    pub fn mark_outcome(&mut self, seq: u64) {
        if let Some(e) = self.entries.iter_mut().find(|e| e.seq == seq) {
            e.outcome = true;
        }
    }

    /// Entries preceding `seq` (exclusive), most recent first.
    pub fn before(&self, seq: u64) -> impl Iterator<Item = &FifoEntry> {
        self.entries.iter().rev().filter(move |e| e.seq < seq)
    }

    /// Whether a recent event within `window` of `now` already carries `term`.
    pub fn holds_recent(&self, term: &Term, now: u64, window: u64) -> bool {
        self.entries
            .iter()
            .any(|e| e.event.is_belief() && &e.event.term == term && now.saturating_sub(e.event.occurrence) <= window)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreStatus {
    Inserted,
    Revised,
    /// Overlapping evidence; the stored entry was kept or replaced by the
    /// more confident one without pooling.
    Chosen { replaced: bool },
    /// Inserted and then immediately evicted.
    Rejected,
}

impl StoreStatus {
    pub fn changed(self) -> bool {
        matches!(self, StoreStatus::Inserted | StoreStatus::Revised | StoreStatus::Chosen { replaced: true })
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ContingencyError {
    #[error("not a contingency (expected <(... &/ op) =/> consequent>): {0}")]
    Shape(Term),
    #[error(transparent)]
    Truth(#[from] crate::truth::TruthError),
}

/// Learned `<(preconditions &/ op) =/> consequent>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contingency {
    term: Term,
    pub evidence: Evidence,
    pub truth: TruthValue,
    pub stamp: Stamp,
    pub last_confirmed: u64,
}

impl Contingency {
    pub fn new(
        term: Term,
        evidence: Evidence,
        stamp: Stamp,
        time: u64,
        horizon: f64,
    ) -> Result<Self, ContingencyError> {
        let term = normalize(&term);
        let ok = match &term {
            Term::Implication(antecedent, consequent) => {
                matches!(**antecedent, Term::Sequence(..))
                    && antecedent.sequence_elements().last().is_some_and(|t| t.is_operation())
                    && !consequent.is_operation()
            }
            _ => false,
        };
        if !ok {
            return Err(ContingencyError::Shape(term));
        }
        let truth = induction_from_counts(evidence, horizon)?;
        Ok(Contingency { term, evidence, truth, stamp, last_confirmed: time })
    }

    /// Contingency from precondition events, an operation and an outcome.
    pub fn from_parts(
        preconditions: &[Term],
        operation: Term,
        consequent: Term,
        evidence: Evidence,
        stamp: Stamp,
        time: u64,
        horizon: f64,
    ) -> Result<Self, ContingencyError> {
        let antecedent = Term::sequence_of(preconditions.iter().cloned().chain([operation]))
            .expect("at least the operation");
        let term = Term::implication(antecedent, consequent);
        if preconditions.is_empty() {
            return Err(ContingencyError::Shape(term));
        }
        Contingency::new(term, evidence, stamp, time, horizon)
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn antecedent(&self) -> &Term {
        match &self.term {
            Term::Implication(a, _) => a,
            _ => unreachable!("checked at construction"),
        }
    }

    pub fn consequent(&self) -> &Term {
        match &self.term {
            Term::Implication(_, c) => c,
            _ => unreachable!("checked at construction"),
        }
    }

    /// The precondition part: everything before the trailing operation.
    pub fn precondition(&self) -> &Term {
        match self.antecedent() {
            Term::Sequence(p, _) => p,
            _ => unreachable!("checked at construction"),
        }
    }

    pub fn operation(&self) -> &Term {
        match self.antecedent() {
            Term::Sequence(_, op) => op,
            _ => unreachable!("checked at construction"),
        }
    }

    /// Precondition event terms in temporal order.
    pub fn precondition_events(&self) -> Vec<&Term> {
        self.precondition().sequence_elements()
    }

    pub fn expectation(&self) -> f64 {
        expectation(self.truth)
    }
}

/// Contingencies indexed by their normalized term.
#[derive(Clone, Debug)]
pub struct ContingencyTable {
    entries: IndexMap<Term, Contingency>,
    capacity: usize,
    horizon: f64,
    stamp_capacity: usize,
}

impl ContingencyTable {
    pub fn new(capacity: usize, horizon: f64, stamp_capacity: usize) -> Self {
        ContingencyTable { entries: IndexMap::new(), capacity: capacity.max(1), horizon, stamp_capacity }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, term: &Term) -> Option<&Contingency> {
        self.entries.get(&normalize(term))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Contingency> {
        self.entries.values()
    }

    /// Insert, or pool evidence into the stored entry with the same term.
    pub fn store(&mut self, c: Contingency) -> StoreStatus {
        let key = c.term.clone();
        if let Some(existing) = self.entries.get_mut(&key) {
            if existing.stamp.overlaps(&c.stamp) {
                let replace = c.truth.confidence() > existing.truth.confidence();
                if replace {
                    *existing = c;
                }
                return StoreStatus::Chosen { replaced: replace };
            }
            let evidence = existing.evidence.pooled(&c.evidence);
            existing.truth = induction_from_counts(evidence, self.horizon).expect("pooled evidence is positive");
            existing.evidence = evidence;
            existing.stamp = existing.stamp.merge(&c.stamp, self.stamp_capacity);
            existing.last_confirmed = existing.last_confirmed.max(c.last_confirmed);
            return StoreStatus::Revised;
        }
        self.entries.insert(key.clone(), c);
        if self.entries.len() > self.capacity {
            let victim = self.weakest().expect("non-empty");
            self.entries.shift_remove(&victim);
            if victim == key {
                return StoreStatus::Rejected;
            }
        }
        StoreStatus::Inserted
    }

    fn weakest(&self) -> Option<Term> {
        self.entries
            .values()
            .min_by(|a, b| {
                a.expectation()
                    .total_cmp(&b.expectation())
                    .then(a.last_confirmed.cmp(&b.last_confirmed))
            })
            .map(|c| c.term.clone())
    }

    /// Contingencies whose consequent matches `goal`, with the bindings.
    pub fn query(&self, goal: &Term) -> Vec<(&Contingency, Bindings)> {
        self.entries
            .values()
            .filter_map(|c| unify(c.consequent(), goal).map(|b| (c, b)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A derived `<left <=> right>` with its truth and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRecord {
    left: Term,
    right: Term,
    pub truth: TruthValue,
    pub stamp: Stamp,
    /// Operation whose execution licensed the derivation.
    pub trigger_op: Term,
    pub created_at: u64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("an equivalence needs two different sides: {0}")]
pub struct SelfEquivalence(pub Term);

impl EquivalenceRecord {
    pub fn new(
        left: Term,
        right: Term,
        truth: TruthValue,
        stamp: Stamp,
        trigger_op: Term,
        created_at: u64,
    ) -> Result<Self, SelfEquivalence> {
        let term = normalize(&Term::equivalence(left, right));
        let (left, right) = match term {
            Term::Equivalence(l, r) => (*l, *r),
            _ => unreachable!(),
        };
        if left == right {
            return Err(SelfEquivalence(left));
        }
        Ok(EquivalenceRecord { left, right, truth, stamp, trigger_op, created_at })
    }

    pub fn left(&self) -> &Term {
        &self.left
    }

    pub fn right(&self) -> &Term {
        &self.right
    }

    pub fn side(&self, side: Side) -> &Term {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn term(&self) -> Term {
        Term::equivalence(self.left.clone(), self.right.clone())
    }

    pub fn is_ground(&self) -> bool {
        self.left.is_ground() && self.right.is_ground()
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceTable {
    entries: IndexMap<Term, EquivalenceRecord>,
    capacity: usize,
    horizon: f64,
    stamp_capacity: usize,
}

impl EquivalenceTable {
    pub fn new(capacity: usize, horizon: f64, stamp_capacity: usize) -> Self {
        EquivalenceTable { entries: IndexMap::new(), capacity: capacity.max(1), horizon, stamp_capacity }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &EquivalenceRecord> {
        self.entries.values()
    }

    pub fn get(&self, term: &Term) -> Option<&EquivalenceRecord> {
        self.entries.get(&normalize(term))
    }

    pub fn store(&mut self, r: EquivalenceRecord) -> StoreStatus {
        let key = r.term();
        if let Some(existing) = self.entries.get_mut(&key) {
            if existing.stamp.overlaps(&r.stamp) {
                let replace = r.truth.confidence() > existing.truth.confidence();
                if replace {
                    existing.truth = r.truth;
                    existing.stamp = r.stamp;
                }
                return StoreStatus::Chosen { replaced: replace };
            }
            existing.truth = revise(existing.truth, r.truth, self.horizon);
            existing.stamp = existing.stamp.merge(&r.stamp, self.stamp_capacity);
            return StoreStatus::Revised;
        }
        self.entries.insert(key.clone(), r);
        if self.entries.len() > self.capacity {
            let victim = self
                .entries
                .values()
                .min_by(|a, b| {
                    a.truth
                        .confidence()
                        .total_cmp(&b.truth.confidence())
                        .then(a.created_at.cmp(&b.created_at))
                })
                .map(EquivalenceRecord::term)
                .expect("non-empty");
            self.entries.shift_remove(&victim);
            if victim == key {
                return StoreStatus::Rejected;
            }
        }
        StoreStatus::Inserted
    }

    /// Records with a side matching `t`, once per matching side.
    pub fn query(&self, t: &Term) -> Vec<(&EquivalenceRecord, Side, Bindings)> {
        let mut out = Vec::new();
        for r in self.entries.values() {
            for side in [Side::Left, Side::Right] {
                if let Some(b) = unify(r.side(side), t) {
                    out.push((r, side, b));
                }
            }
        }
        out
    }
}
