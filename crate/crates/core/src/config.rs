use crate::truth::DEFAULT_HORIZON;

/// Atoms that name channels or relations and are never abstracted into
/// variables.
pub const RESERVED_ATOMS: &[&str] = &["loc", "ocr", "color", "yolo", "sound"];

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub horizon: f64,
    /// Max distance in time steps between precondition and operation, and
    /// between operation and outcome.
    pub temporal_window: u64,
    pub max_precondition_events: usize,
    pub max_candidates_per_outcome: usize,
    pub fifo_capacity: usize,
    pub contingency_capacity: usize,
    pub equivalence_capacity: usize,
    pub stamp_capacity: usize,
    /// Contingencies below this confidence do not take part in equivalence
    /// derivation.
    pub min_equivalence_confidence: f64,
    pub decision_threshold: f64,
    pub babbling_rate: f64,
    pub babbling_ops: u32,
    pub volume: u32,
    pub seed: u64,
    pub reserved_atoms: Vec<String>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            horizon: DEFAULT_HORIZON,
            temporal_window: 10,
            max_precondition_events: 2,
            max_candidates_per_outcome: 8,
            fifo_capacity: 20,
            contingency_capacity: 256,
            equivalence_capacity: 64,
            stamp_capacity: 16,
            min_equivalence_confidence: 0.3,
            decision_threshold: 0.51,
            babbling_rate: 0.0,
            babbling_ops: 0,
            volume: 100,
            seed: 0,
            reserved_atoms: RESERVED_ATOMS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl EngineConfig {
    pub fn is_reserved(&self, name: &str) -> bool {
        self.reserved_atoms.iter().any(|r| r == name)
    }
}
