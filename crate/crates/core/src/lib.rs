//! A small temporal reasoner that learns sensorimotor contingencies, derives
//! functional equivalences between their preconditions and uses them to act
//! on stimuli it was never trained on.

pub mod config;
pub mod decision;
pub mod engine;
pub mod equivalence;
pub mod harness;
pub mod induction;
pub mod memory;
pub mod narsese;
pub mod shell;
pub mod term;
pub mod truth;

pub use config::EngineConfig;
pub use decision::{Candidate, Decision, OperatorRegistry};
pub use engine::{Emission, EmissionKind, Engine};
pub use memory::{
    Contingency, ContingencyTable, EquivalenceRecord, EquivalenceTable, Event, EventFifo, Stamp, StoreStatus,
};
pub use narsese::{parse_line, parse_term, InputLine, ParseError, Punctuation, Statement};
pub use shell::{Diagnostic, ScriptReport, Shell, TranscriptLine};
pub use term::{normalize, substitute, unify, Bindings, Term, Var, VarKind};
pub use truth::{Evidence, TruthValue};
