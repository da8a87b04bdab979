//! Scripted scenarios with assertions embedded in comments.
//!
//! ```text
//! <(up * r-e-d) --> (loc * ocr)>. :|:
//! G! :|:
//! //expect-executed: <({SELF} * up) --> ^select>
//! ```
//!
//! Consecutive directive lines form a block. A block is checked against the
//! transcript produced between the previous block and the next one. Blank
//! lines and plain comments do not split a block.
//!
//! `//inject-contingency: <term>` stores a contingency directly; it stands
//! in for training when testing what happens without executions.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::config::EngineConfig;
use crate::engine::EmissionKind;
use crate::narsese::{parse_line, parse_term, InputLine, Punctuation, Statement, NAMED_VAR_BASE};
use crate::shell::{Diagnostic, Shell, TranscriptLine};
use crate::term::{normalize, unify, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("line {line}: bad directive pattern: {message}")]
    Pattern { line: usize, message: String },
    #[error("line {line}: unknown directive {name:?}")]
    UnknownDirective { line: usize, name: String },
    #[error("line {line}: cannot inject contingency: {message}")]
    Inject { line: usize, message: String },
    #[error("repetition count must be at least 1")]
    Repetitions,
    #[error("repetition {repetition}: no value for %{key}%")]
    MissingKey { key: String, repetition: usize },
    #[error("unterminated placeholder in fragment")]
    Placeholder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectiveKind {
    Executed,
    Derived,
    NotDerived,
    Substituted,
}

impl DirectiveKind {
    fn name(self) -> &'static str {
        match self {
            DirectiveKind::Executed => "expect-executed",
            DirectiveKind::Derived => "expect-derived",
            DirectiveKind::NotDerived => "expect-not-derived",
            DirectiveKind::Substituted => "expect-substituted",
        }
    }

    fn emission(self) -> EmissionKind {
        match self {
            DirectiveKind::Executed => EmissionKind::Executed,
            DirectiveKind::Derived | DirectiveKind::NotDerived => EmissionKind::Derived,
            DirectiveKind::Substituted => EmissionKind::Substituted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub pattern: Term,
    /// 1-based line of the directive in the fixture.
    pub line: usize,
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.pattern)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum FixtureLine {
    Script(String),
    Expect(Directive),
    Inject(Term),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    lines: Vec<FixtureLine>,
}

impl Fixture {
    pub fn parse(name: &str, text: &str) -> Result<Fixture, HarnessError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let Some(body) = raw.trim().strip_prefix("//") else {
                lines.push(FixtureLine::Script(raw.to_string()));
                continue;
            };
            let body = body.trim();
            let Some((name, rest)) = body.split_once(':') else {
                lines.push(FixtureLine::Script(raw.to_string()));
                continue;
            };
            let parse = |s: &str| {
                parse_term(s).map_err(|e| HarnessError::Pattern { line, message: e.to_string() })
            };
            let kind = match name.trim() {
                "expect-executed" => DirectiveKind::Executed,
                "expect-derived" => DirectiveKind::Derived,
                "expect-not-derived" => DirectiveKind::NotDerived,
                "expect-substituted" => DirectiveKind::Substituted,
                "inject-contingency" => {
                    lines.push(FixtureLine::Inject(parse(rest)?));
                    continue;
                }
                n if n.starts_with("expect-") => {
                    return Err(HarnessError::UnknownDirective { line, name: n.to_string() })
                }
                _ => {
                    lines.push(FixtureLine::Script(raw.to_string()));
                    continue;
                }
            };
            let pattern = parse(rest.trim().trim_end_matches('.'))?;
            lines.push(FixtureLine::Expect(Directive { kind, pattern, line }));
        }
        Ok(Fixture { name: name.to_string(), lines })
    }

    pub fn directives(&self) -> impl Iterator<Item = &Directive> {
        self.lines.iter().filter_map(|l| match l {
            FixtureLine::Expect(d) => Some(d),
            _ => None,
        })
    }

    /// The fixture as a plain script, directives left as comments.
    pub fn script(&self) -> impl Iterator<Item = String> + '_ {
        self.lines.iter().map(|l| match l {
            FixtureLine::Script(s) => s.clone(),
            FixtureLine::Expect(d) => format!("//{d}"),
            FixtureLine::Inject(t) => format!("//inject-contingency: {t}"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectiveResult {
    pub directive: Directive,
    pub passed: bool,
    /// The transcript line that satisfied (or, for `not-derived`, violated)
    /// the directive.
    pub matched: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub name: String,
    pub results: Vec<DirectiveResult>,
    pub transcript: Vec<TranscriptLine>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn transcript_text(&self) -> String {
        self.transcript.iter().map(|l| format!("{l}\n")).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            write!(f, "{status} {} line {}: {}", self.name, r.directive.line, r.directive)?;
            if let Some(m) = &r.matched {
                write!(f, "  [{m}]")?;
            }
            writeln!(f)?;
        }
        for d in &self.diagnostics {
            writeln!(f, "{d}")?;
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        write!(f, "{}: {passed}/{} directives passed", self.name, self.results.len())
    }
}

pub fn run_fixture(fixture: &Fixture, config: EngineConfig) -> Result<Report, HarnessError> {
    let mut shell = Shell::new(config);
    let mut transcript = Vec::new();
    let mut diagnostics = Vec::new();
    // (first line, last line, directives) per block
    let mut blocks: Vec<(usize, usize, Vec<Directive>)> = Vec::new();
    let mut open_block = false;
    for line in &fixture.lines {
        match line {
            FixtureLine::Script(text) => {
                let (out, diag) = shell.run_line(text);
                transcript.extend(out);
                diagnostics.extend(diag);
                let blank = matches!(parse_line(text), Ok(InputLine::Blank | InputLine::Comment(_)));
                if !blank {
                    open_block = false;
                }
            }
            FixtureLine::Inject(term) => {
                let line = shell.line_number() + 1;
                shell.run_line("");
                shell
                    .engine_mut()
                    .inject_contingency(term)
                    .map_err(|e| HarnessError::Inject { line, message: e.to_string() })?;
                open_block = false;
            }
            FixtureLine::Expect(d) => {
                shell.run_line("");
                match blocks.last_mut() {
                    Some(block) if open_block => {
                        block.1 = d.line;
                        block.2.push(d.clone());
                    }
                    _ => blocks.push((d.line, d.line, vec![d.clone()])),
                }
                open_block = true;
            }
        }
    }
    let mut results = Vec::new();
    for (i, (_, _, directives)) in blocks.iter().enumerate() {
        let from = if i == 0 { 0 } else { blocks[i - 1].1 };
        let to = blocks.get(i + 1).map_or(usize::MAX, |b| b.0);
        let window: Vec<&TranscriptLine> = transcript.iter().filter(|l| l.line > from && l.line < to).collect();
        for d in directives {
            results.push(check(d, &window));
        }
    }
    Ok(Report { name: fixture.name.clone(), results, transcript, diagnostics })
}

/// Whether a transcript term satisfies a directive pattern.
///
/// Numbered variables are literal: `<($1 * a) --> b>` matches only that
/// statement up to renaming. Named variables (`$x`) match any subterm.
pub fn pattern_matches(pattern: &Term, term: &Term) -> bool {
    let mut wildcards = false;
    pattern.walk(&mut |t| {
        if t.as_var().is_some_and(|v| v.index >= NAMED_VAR_BASE) {
            wildcards = true;
        }
    });
    if wildcards {
        unify(pattern, &normalize(term)).is_some()
    } else {
        normalize(pattern) == normalize(term)
    }
}

fn check(d: &Directive, window: &[&TranscriptLine]) -> DirectiveResult {
    let hit = window
        .iter()
        .find(|l| l.emission.kind == d.kind.emission() && pattern_matches(&d.pattern, &l.emission.term));
    let matched = hit.map(|l| l.emission.text.clone());
    let passed = match d.kind {
        DirectiveKind::NotDerived => hit.is_none(),
        _ => hit.is_some(),
    };
    DirectiveResult { directive: d.clone(), passed, matched }
}

/// Repeat `block` `n` times, filling `%KEY%` placeholders from successive
/// rows of `table` (cycling), with a `100` separator after each copy.
pub fn train_repetitions(
    block: &str,
    n: usize,
    table: &[BTreeMap<String, String>],
) -> Result<String, HarnessError> {
    if n < 1 {
        return Err(HarnessError::Repetitions);
    }
    let empty = BTreeMap::new();
    let mut out = String::new();
    for rep in 0..n {
        let row = if table.is_empty() { &empty } else { &table[rep % table.len()] };
        let mut rest = block;
        while let Some(start) = rest.find('%') {
            out.push_str(&rest[..start]);
            let after = &rest[start + 1..];
            let end = after.find('%').ok_or(HarnessError::Placeholder)?;
            let key = &after[..end];
            let value = row
                .get(key)
                .ok_or_else(|| HarnessError::MissingKey { key: key.to_string(), repetition: rep + 1 })?;
            out.push_str(value);
            rest = &after[end + 1..];
        }
        out.push_str(rest);
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out.push_str("100\n");
    }
    Ok(out)
}

/// A run of statements not interrupted by a cycle step.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub first_line: usize,
    pub statements: Vec<Statement>,
}

impl Trial {
    /// Trials that state no goal only train.
    pub fn is_training(&self) -> bool {
        self.statements.iter().all(|s| s.punctuation != Punctuation::Goal)
    }

    pub fn any(&self, pred: impl Fn(&Term) -> bool) -> bool {
        self.statements.iter().any(|s| pred(&s.term))
    }
}

/// Split a script into trials at cycle-step lines.
pub fn trials(script: &str) -> Vec<Trial> {
    let mut out = Vec::new();
    let mut current: Option<Trial> = None;
    for (i, line) in script.lines().enumerate() {
        match parse_line(line) {
            Ok(InputLine::Belief(s) | InputLine::Goal(s)) => current
                .get_or_insert_with(|| Trial { first_line: i + 1, statements: Vec::new() })
                .statements
                .push(s),
            Ok(InputLine::CycleStep(_)) => out.extend(current.take()),
            _ => {}
        }
    }
    out.extend(current);
    out
}

/// Whether `t` mentions the atom or operator `name` anywhere.
pub fn mentions(t: &Term, name: &str) -> bool {
    let mut found = false;
    t.walk(&mut |s| match s {
        Term::Atom(a) | Term::Operator(a) if &**a == name => found = true,
        _ => {}
    });
    found
}

/// Training trials in which both predicates hold for some statement.
pub fn trials_pairing(
    trials: &[Trial],
    a: impl Fn(&Term) -> bool,
    b: impl Fn(&Term) -> bool,
) -> Vec<&Trial> {
    trials.iter().filter(|t| t.is_training() && t.any(&a) && t.any(&b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "*setopname 1 ^op1\nA. :|:\n^op1. :|:\nG. :|:\n100\nB. :|:\n^op1. :|:\nG. :|:\n//expect-derived: <A <=> B>\n//expect-not-derived: <A <=> C>\n";

    #[test]
    fn minimal_fixture_passes() {
        let f = Fixture::parse("minimal", MINIMAL).unwrap();
        let r = run_fixture(&f, EngineConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.results.len(), 2);
    }

    #[test]
    fn failing_directive_reported() {
        let text = MINIMAL.replace("<A <=> B>", "<A <=> D>");
        let r = run_fixture(&Fixture::parse("m", &text).unwrap(), EngineConfig::default()).unwrap();
        assert!(!r.passed());
        assert!(r.to_string().contains("FAIL"));
    }

    #[test]
    fn windows_are_between_blocks() {
        let text = "*setopname 1 ^op1\nA. :|:\n^op1. :|:\nG. :|:\n//expect-executed: ^op1\n100\nB. :|:\n^op1. :|:\nG. :|:\n//expect-derived: <A <=> B>\n";
        let r = run_fixture(&Fixture::parse("w", text).unwrap(), EngineConfig::default()).unwrap();
        // ^op1 here is an input, not an execution
        assert!(!r.results[0].passed);
        assert!(r.results[1].passed);
    }

    #[test]
    fn numbered_variables_are_literal() {
        let general = parse_term("<<($1 * a) --> x> <=> <($1 * b) --> y>>").unwrap();
        let ground = parse_term("<<(l * a) --> x> <=> <(l * b) --> y>>").unwrap();
        let renamed = parse_term("<<($2 * b) --> y> <=> <($2 * a) --> x>>").unwrap();
        assert!(!pattern_matches(&general, &ground));
        assert!(pattern_matches(&general, &renamed));
        let any = parse_term("<$x <=> $y>").unwrap();
        assert!(pattern_matches(&any, &ground) && pattern_matches(&any, &general));
    }

    #[test]
    fn bad_pattern_is_an_error() {
        assert!(matches!(Fixture::parse("x", "//expect-derived: <A <=>"), Err(HarnessError::Pattern { line: 1, .. })));
        assert!(matches!(
            Fixture::parse("x", "//expect-teleported: A"),
            Err(HarnessError::UnknownDirective { .. })
        ));
    }

    #[test]
    fn repetitions() {
        let table: Vec<BTreeMap<String, String>> = [("a-x-e", "h-a-t"), ("c-a-t", "d-o-g"), ("r-e-d", "b-l-u-e")]
            .iter()
            .map(|(s, f)| BTreeMap::from([("S".to_string(), s.to_string()), ("F".to_string(), f.to_string())]))
            .collect();
        let out = train_repetitions("<(l * %S%) --> x>. :|:\n<(r * %F%) --> x>. :|:\n", 3, &table).unwrap();
        assert_eq!(out.matches("100\n").count(), 3);
        assert!(out.contains("d-o-g") && out.contains("b-l-u-e") && out.contains("a-x-e"));
        assert_eq!(trials(&out).len(), 3);
        assert_eq!(train_repetitions("A. :|:", 1, &[]).unwrap(), "A. :|:\n100\n");
        assert_eq!(train_repetitions("A", 0, &[]), Err(HarnessError::Repetitions));
        assert!(matches!(train_repetitions("%Q%", 1, &table), Err(HarnessError::MissingKey { .. })));
    }

    #[test]
    fn trial_scan() {
        let script = "<(l * red) --> (loc * color)>. :|:\n^select. :|:\nG. :|:\n100\n<(l * r-e-d) --> (loc * ocr)>. :|:\nG! :|:\n";
        let ts = trials(script);
        assert_eq!(ts.len(), 2);
        assert!(ts[0].is_training() && !ts[1].is_training());
        assert!(trials_pairing(&ts, |t| mentions(t, "r-e-d"), |t| mentions(t, "select")).is_empty());
        assert_eq!(trials_pairing(&ts, |t| mentions(t, "red"), |t| mentions(t, "select")).len(), 1);
    }
}
