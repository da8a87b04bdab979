//! Line-oriented driver: feeds parsed input lines to an [`Engine`] and
//! collects the transcript.

use std::fmt;
use std::io::{self, BufRead};

use crate::config::EngineConfig;
use crate::engine::{Emission, Engine};
use crate::narsese::{parse_line, Command, InputLine};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: Option<usize>,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match self.column {
            Some(c) => write!(f, "line {}, column {}: {}: {}", self.line, c, level, self.message),
            None => write!(f, "line {}: {}: {}", self.line, level, self.message),
        }
    }
}

/// An emission tagged with the input line that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TranscriptLine {
    pub line: usize,
    pub emission: Emission,
}

impl fmt::Display for TranscriptLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.emission.fmt(f)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScriptReport {
    pub transcript: Vec<TranscriptLine>,
    pub diagnostics: Vec<Diagnostic>,
    /// Set when strict mode stopped the script early.
    pub aborted: bool,
}

impl ScriptReport {
    pub fn errors(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error).count()
    }
}

#[derive(Clone, Debug)]
pub struct Shell {
    engine: Engine,
    line: usize,
    strict: bool,
}

impl Shell {
    pub fn new(config: EngineConfig) -> Self {
        Shell { engine: Engine::new(config), line: 0, strict: false }
    }

    /// Stop a script at the first error instead of skipping the line.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut Engine {
        &mut self.engine
    }

    /// Number of lines processed so far.
    pub fn line_number(&self) -> usize {
        self.line
    }

    /// Process one input line.
    pub fn run_line(&mut self, text: &str) -> (Vec<TranscriptLine>, Option<Diagnostic>) {
        self.line += 1;
        let line = self.line;
        let diag = |severity, column, message| Some(Diagnostic { line, column, severity, message });
        let diagnostic = match parse_line(text) {
            Err(e) => diag(Severity::Error, Some(e.column), e.message),
            Ok(InputLine::Belief(s) | InputLine::Goal(s)) if !s.present => {
                diag(Severity::Warning, None, format!("eternal statement {} ignored", s.term))
            }
            Ok(InputLine::Belief(s) | InputLine::Goal(s)) => {
                self.engine.input(&s);
                None
            }
            Ok(InputLine::CycleStep(n)) => {
                self.engine.advance(n);
                None
            }
            Ok(InputLine::Command(c)) => self.command(c).err().and_then(|m| diag(Severity::Error, None, m)),
            Ok(InputLine::Comment(_) | InputLine::Blank) => None,
        };
        let out = self
            .engine
            .take_output()
            .into_iter()
            .map(|emission| TranscriptLine { line, emission })
            .collect();
        (out, diagnostic)
    }

    fn command(&mut self, c: Command) -> Result<(), String> {
        match c {
            Command::SetOpName { slot, name } => self.engine.register_operator(slot, &name).map_err(|e| e.to_string()),
            Command::BabblingOps(n) => {
                self.engine.set_babbling_ops(n);
                Ok(())
            }
            Command::MotorBabbling(r) => {
                self.engine.set_babbling_rate(r);
                Ok(())
            }
            Command::Volume(v) => {
                self.engine.set_volume(v);
                Ok(())
            }
        }
    }

    pub fn run_str(&mut self, script: &str) -> ScriptReport {
        self.run_script(script.as_bytes()).expect("reading from memory cannot fail")
    }

    pub fn run_script<R: BufRead>(&mut self, reader: R) -> io::Result<ScriptReport> {
        let mut report = ScriptReport::default();
        for text in reader.lines() {
            let (lines, diagnostic) = self.run_line(&text?);
            report.transcript.extend(lines);
            if let Some(d) = diagnostic {
                let fatal = self.strict && d.severity == Severity::Error;
                report.diagnostics.push(d);
                if fatal {
                    report.aborted = true;
                    break;
                }
            }
        }
        Ok(report)
    }
}

impl Default for Shell {
    fn default() -> Self {
        Shell::new(EngineConfig::default())
    }
}
