//! The reasoning cycle: event intake, induction, equivalence derivation,
//! substitution and goal processing, with a volume-gated transcript.

use std::fmt;

use crate::config::EngineConfig;
use crate::decision::{Decision, DecisionMaker, RegistryError};
use crate::equivalence::{derive_on_execution, substitute_event};
use crate::induction::on_outcome;
use crate::memory::{
    Contingency, ContingencyError, ContingencyTable, EquivalenceTable, Event, EventFifo, Stamp,
};
use crate::narsese::{Punctuation, Statement};
use crate::term::{normalize, Term};
use crate::truth::{Evidence, TruthValue};

/// Volume from which Input, Derived and Substituted lines are printed.
pub const VOLUME_EVENTS: u32 = 50;
/// Volume from which decision details are printed.
pub const VOLUME_DEBUG: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmissionKind {
    Input,
    Derived,
    Substituted,
    Executed,
    Decision,
}

impl EmissionKind {
    fn min_volume(self) -> u32 {
        match self {
            EmissionKind::Executed => 0,
            EmissionKind::Input | EmissionKind::Derived | EmissionKind::Substituted => VOLUME_EVENTS,
            EmissionKind::Decision => VOLUME_DEBUG,
        }
    }
}

/// One transcript line.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub kind: EmissionKind,
    pub term: Term,
    pub text: String,
    pub time: u64,
}

impl fmt::Display for Emission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug)]
struct PendingGoal {
    event: Event,
    done: bool,
}

/// Operations are written either as full statements or as a bare `^op`;
/// the bare form stands for `<{SELF} --> ^op>`.
pub fn canonical_event_term(term: Term) -> Term {
    match term {
        Term::Operator(name) => Term::operation(&name, None),
        other => other,
    }
}

#[derive(Clone, Debug)]
pub struct Engine {
    config: EngineConfig,
    time: u64,
    next_stamp: u64,
    fifo: EventFifo,
    contingencies: ContingencyTable,
    equivalences: EquivalenceTable,
    decisions: DecisionMaker,
    goals: Vec<PendingGoal>,
    output: Vec<Emission>,
    execution_count: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine {
            time: 0,
            next_stamp: 0,
            fifo: EventFifo::new(config.fifo_capacity),
            contingencies: ContingencyTable::new(config.contingency_capacity, config.horizon, config.stamp_capacity),
            equivalences: EquivalenceTable::new(config.equivalence_capacity, config.horizon, config.stamp_capacity),
            decisions: DecisionMaker::new(
                config.decision_threshold,
                config.babbling_rate,
                config.babbling_ops,
                config.seed,
            ),
            goals: Vec::new(),
            output: Vec::new(),
            execution_count: 0,
            config,
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn fifo(&self) -> &EventFifo {
        &self.fifo
    }

    pub fn contingencies(&self) -> &ContingencyTable {
        &self.contingencies
    }

    pub fn equivalences(&self) -> &EquivalenceTable {
        &self.equivalences
    }

    pub fn execution_count(&self) -> u64 {
        self.execution_count
    }

    pub fn register_operator(&mut self, slot: u32, name: &str) -> Result<(), RegistryError> {
        self.decisions.registry.register(slot, name)
    }

    pub fn set_babbling_ops(&mut self, n: u32) {
        self.config.babbling_ops = n;
        self.decisions.babbling_ops = n;
    }

    pub fn set_babbling_rate(&mut self, rate: f64) {
        self.config.babbling_rate = rate;
        self.decisions.babbling_rate = rate;
    }

    pub fn set_volume(&mut self, volume: u32) {
        self.config.volume = volume;
    }

    pub fn set_threshold(&mut self, threshold: f64) {
        self.config.decision_threshold = threshold;
        self.decisions.threshold = threshold;
    }

    /// Transcript lines produced since the last call.
    pub fn take_output(&mut self) -> Vec<Emission> {
        std::mem::take(&mut self.output)
    }

    fn fresh_stamp(&mut self) -> Stamp {
        self.next_stamp += 1;
        Stamp::single(self.next_stamp)
    }

    fn emit(&mut self, kind: EmissionKind, term: Term, text: String) {
        if self.config.volume >= kind.min_volume() {
            self.output.push(Emission { kind, term, text, time: self.time });
        }
    }

    /// Feed a present-tense statement and run one cycle.
    pub fn input(&mut self, statement: &Statement) {
        let term = canonical_event_term(statement.term.clone());
        let truth = statement.truth.unwrap_or_default();
        self.input_event(term, statement.punctuation, truth);
    }

    pub fn input_event(&mut self, term: Term, punctuation: Punctuation, truth: TruthValue) {
        let stamp = self.fresh_stamp();
        let occurrence = self.time;
        let event = match punctuation {
            Punctuation::Belief => Event::belief(term, truth, occurrence, stamp),
            Punctuation::Goal => Event::goal(term, truth, occurrence, stamp),
        };
        let text = format!(
            "Input: {}{} :|: occurrenceTime={} {}",
            event.term,
            punctuation.mark(),
            occurrence,
            truth
        );
        self.emit(EmissionKind::Input, event.term.clone(), text);
        let seq = self.fifo.push(event.clone());
        if punctuation == Punctuation::Goal {
            self.goals.push(PendingGoal { event: event.clone(), done: false });
        }
        self.time += 1;
        self.cycle(Some((seq, event)));
    }

    /// Run `n` idle cycles.
    pub fn advance(&mut self, n: u64) {
        // goals expire after the window; later idle cycles change nothing
        let busy = (self.config.temporal_window + 1).min(n);
        for _ in 0..busy {
            self.time += 1;
            self.cycle(None);
        }
        self.time += n - busy;
        self.goals.clear();
    }

    fn cycle(&mut self, new: Option<(u64, Event)>) {
        let now = self.time;
        if let Some((seq, event)) = new {
            if event.is_input_observation() {
                self.learn(seq, now);
                self.substitute(&event, now);
            }
        }
        self.process_goals(now);
    }

    fn learn(&mut self, seq: u64, now: u64) {
        let Some(induction) = on_outcome(seq, &mut self.fifo, &mut self.contingencies, now, &self.config) else {
            return;
        };
        for (c, status) in &induction.stored {
            if status.changed() {
                let text = format!("Derived: {}. {}", c.term(), c.truth);
                self.emit(EmissionKind::Derived, c.term().clone(), text);
            }
        }
        let fresh: Vec<Term> = induction.stored.iter().map(|(c, _)| c.term().clone()).collect();
        let derived = derive_on_execution(
            &induction.operation,
            &induction.consequent,
            &fresh,
            &self.contingencies,
            &mut self.equivalences,
            now,
            &self.config,
        );
        for (r, status) in derived {
            if status.changed() {
                let term = r.term();
                let text = format!("Derived: {}. {}", term, r.truth);
                self.emit(EmissionKind::Derived, term, text);
            }
        }
    }

    fn substitute(&mut self, event: &Event, now: u64) {
        for d in substitute_event(event, &self.equivalences, &self.config) {
            if self.fifo.holds_recent(&d.term, now, self.config.temporal_window) {
                continue;
            }
            let text = format!("Substituted: {}. :|: occurrenceTime={} {}", d.term, d.occurrence, d.truth);
            self.emit(EmissionKind::Substituted, d.term.clone(), text);
            self.fifo.push(d);
        }
    }

    fn process_goals(&mut self, now: u64) {
        let window = self.config.temporal_window;
        self.goals.retain(|g| !g.done && now.saturating_sub(g.event.occurrence) <= window);
        for i in 0..self.goals.len() {
            let goal = self.goals[i].event.clone();
            let Some(decision) = self.decisions.decide(&goal, &self.fifo, &self.contingencies, now, window) else {
                continue;
            };
            self.goals[i].done = true;
            self.execute(decision, now);
        }
        self.goals.retain(|g| !g.done);
    }

    fn execute(&mut self, decision: Decision, now: u64) {
        let text = match &decision {
            Decision::Execute(c) => format!(
                "Decision: {} desire=(frequency={:.6} confidence={:.6}) expectation={:.6}",
                c.operation,
                c.desire.frequency(),
                c.desire.confidence(),
                c.expectation
            ),
            Decision::Babble(op) => format!("Decision: {op} babbled"),
        };
        let op = decision.operation().clone();
        self.emit(EmissionKind::Decision, op.clone(), text);
        self.emit(EmissionKind::Executed, op.clone(), format!("Executed: {op}"));
        let stamp = self.fresh_stamp();
        self.fifo.push_executed(Event::belief(op, TruthValue::default(), now, stamp));
        self.execution_count += 1;
    }

    /// Store a contingency directly, as if induced from one observation.
    pub fn inject_contingency(&mut self, term: &Term) -> Result<(), ContingencyError> {
        let stamp = self.fresh_stamp();
        let c = Contingency::new(normalize(term), Evidence::confirmation(), stamp, self.time, self.config.horizon)?;
        self.contingencies.store(c);
        Ok(())
    }

    /// Stored contingencies and equivalences as statements.
    pub fn dump_memory(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .contingencies
            .iter()
            .map(|c| format!("{}. {}", c.term(), c.truth))
            .collect();
        lines.extend(self.equivalences.iter().map(|r| format!("{}. {}", r.term(), r.truth)));
        lines
    }
}
