//! Workloads shared by the benchmarks.

use feq_core::{EngineConfig, Shell};

/// Script of `trials` minimal training trials over distinct preconditions.
pub fn training_script(trials: usize) -> String {
    let mut s = String::from("*setopname 1 ^op1\n*volume=0\n");
    for i in 0..trials {
        s.push_str(&format!("<(p{i} * s{}) --> (loc * color)>. :|:\n^op1. :|:\nG. :|:\n100\n", i % 7));
    }
    s
}

pub fn run(script: &str) -> usize {
    let mut shell = Shell::new(EngineConfig::default());
    let report = shell.run_str(script);
    report.transcript.len() + shell.engine().contingencies().len()
}
