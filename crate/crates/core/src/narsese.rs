//! Line protocol: Narsese statements, shell commands, cycle steps.
//!
//! ```text
//! term      := atom | $n | #n | {SELF} | ^name
//!            | ( term * term ) | ( term &/ term )
//!            | < term --> term > | < term =/> term > | < term <=> term >
//! statement := term ( "." | "!" ) [ ":|:" ] [ "{" f c "}" ]
//! ```
//!
//! Products and sequences with more than two elements are read as
//! left-nested pairs. Anything after `//` is a comment.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{Symbol, Term};
use crate::truth::TruthValue;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punctuation {
    Belief,
    Goal,
}

impl Punctuation {
    pub fn mark(self) -> char {
        match self {
            Punctuation::Belief => '.',
            Punctuation::Goal => '!',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub term: Term,
    pub punctuation: Punctuation,
    /// Carries the `:|:` marker.
    pub present: bool,
    pub truth: Option<TruthValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    SetOpName { slot: u32, name: Symbol },
    BabblingOps(u32),
    MotorBabbling(f64),
    Volume(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputLine {
    Belief(Statement),
    Goal(Statement),
    CycleStep(u64),
    Command(Command),
    Comment(String),
    Blank,
}

/// Named variables (`$x`) are numbered from here, above any index written
/// as a number.
pub const NAMED_VAR_BASE: u32 = 1_000_000;

pub fn parse_line(text: &str) -> Result<InputLine, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(InputLine::Blank);
    }
    if let Some(rest) = trimmed.strip_prefix("//") {
        return Ok(InputLine::Comment(rest.trim().to_string()));
    }
    let offset = text.len() - text.trim_start().len();
    let body = strip_trailing_comment(trimmed);
    if body.starts_with('*') {
        return parse_command(body, offset).map(InputLine::Command);
    }
    if body.bytes().all(|b| b.is_ascii_digit()) {
        return body
            .parse::<u64>()
            .map(InputLine::CycleStep)
            .map_err(|_| ParseError {
                column: offset + 1,
                message: format!("cycle count {body} overflows"),
            });
    }
    let statement = Parser::new(body, offset).statement()?;
    Ok(match statement.punctuation {
        Punctuation::Belief => InputLine::Belief(statement),
        Punctuation::Goal => InputLine::Goal(statement),
    })
}

fn strip_trailing_comment(s: &str) -> &str {
    match s.find("//") {
        Some(i) => s[..i].trim_end(),
        None => s,
    }
}

/// Parse a bare term (no punctuation).
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text.trim(), text.len() - text.trim_start().len());
    let t = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

fn parse_command(body: &str, offset: usize) -> Result<Command, ParseError> {
    let err = |col: usize, message: String| ParseError { column: offset + col, message };
    let (name, arg) = match body[1..].find(|c: char| c == '=' || c.is_whitespace()) {
        Some(i) => (&body[1..1 + i], body[2 + i..].trim()),
        None => (&body[1..], ""),
    };
    let arg_col = body.len() - arg.len() + 1;
    let int = |s: &str| -> Result<u32, ParseError> {
        s.parse::<u32>()
            .map_err(|e| err(arg_col, format!("invalid integer {s:?}: {e}")))
    };
    match name {
        "setopname" => {
            let mut parts = arg.split_whitespace();
            let slot = parts
                .next()
                .ok_or_else(|| err(arg_col, "missing slot".into()))
                .and_then(int)?;
            let op = parts
                .next()
                .ok_or_else(|| err(arg_col, "missing operator name".into()))?;
            let op = op
                .strip_prefix('^')
                .filter(|n| !n.is_empty() && n.chars().all(is_name_char))
                .ok_or_else(|| err(arg_col, format!("expected operator like ^name, got {op:?}")))?;
            if parts.next().is_some() {
                return Err(err(arg_col, "too many arguments".into()));
            }
            Ok(Command::SetOpName { slot, name: Symbol::from(op) })
        }
        "babblingops" => Ok(Command::BabblingOps(int(arg)?)),
        "volume" => {
            let v = int(arg)?;
            if v > 100 {
                return Err(err(arg_col, format!("volume {v} outside [0, 100]")));
            }
            Ok(Command::Volume(v))
        }
        "motorbabbling" => {
            let rate: f64 = arg
                .parse()
                .map_err(|_| err(arg_col, format!("invalid rate {arg:?}")))?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(err(arg_col, format!("rate {rate} outside [0, 1]")));
            }
            Ok(Command::MotorBabbling(rate))
        }
        other => Err(err(2, format!("unknown command *{other}"))),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    offset: usize,
    /// Named variables (`$x`) get fresh indices per statement.
    named: HashMap<(char, String), u32>,
}

impl Parser {
    fn new(text: &str, offset: usize) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            offset,
            named: HashMap::new(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { column: self.offset + self.pos + 1, message: message.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.chars.get(self.pos + i) == Some(&c))
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.starts_with(s) {
            self.pos += s.chars().count();
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let hyphen_inside = c == '-'
                && self.pos > start
                && self.chars.get(self.pos + 1).is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || c == '_' || hyphen_inside {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let term = self.term()?;
        self.skip_ws();
        let punctuation = match self.peek() {
            Some('.') => Punctuation::Belief,
            Some('!') => Punctuation::Goal,
            _ => return Err(self.error("expected `.` or `!`")),
        };
        self.pos += 1;
        self.skip_ws();
        let present = self.starts_with(":|:");
        if present {
            self.pos += 3;
        }
        self.skip_ws();
        let truth = if self.peek() == Some('{') {
            Some(self.truth()?)
        } else {
            None
        };
        self.skip_ws();
        if !self.at_end() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Statement { term, punctuation, present, truth })
    }

    fn truth(&mut self) -> Result<TruthValue, ParseError> {
        self.expect("{")?;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != '}') {
            self.pos += 1;
        }
        let inner: String = self.chars[start..self.pos].iter().collect();
        self.expect("}")?;
        let nums: Vec<f64> = inner
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| self.error(format!("invalid truth annotation {{{inner}}}")))?;
        match nums.as_slice() {
            [f, c] => TruthValue::new(*f, *c).map_err(|e| self.error(e.to_string())),
            _ => Err(self.error("truth annotation needs frequency and confidence")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("expected term")),
            Some('<') => {
                self.pos += 1;
                let left = self.term()?;
                self.skip_ws();
                let copula = ["-->", "=/>", "<=>"]
                    .into_iter()
                    .find(|c| self.starts_with(c))
                    .ok_or_else(|| self.error("expected copula `-->`, `=/>` or `<=>`"))?;
                self.pos += 3;
                let right = self.term()?;
                self.expect(">")?;
                Ok(match copula {
                    "-->" => Term::inheritance(left, right),
                    "=/>" => Term::implication(left, right),
                    _ => Term::equivalence(left, right),
                })
            }
            Some('(') => {
                self.pos += 1;
                let first = self.term()?;
                self.skip_ws();
                let connector = if self.starts_with("&/") {
                    "&/"
                } else if self.starts_with("*") {
                    "*"
                } else {
                    return Err(self.error("expected `*` or `&/`"));
                };
                let mut acc = first;
                while self.starts_with(connector) {
                    self.pos += connector.len();
                    let next = self.term()?;
                    acc = if connector == "*" {
                        Term::product(acc, next)
                    } else {
                        Term::sequence(acc, next)
                    };
                    self.skip_ws();
                }
                self.expect(")")?;
                Ok(acc)
            }
            Some('{') => {
                if self.starts_with("{SELF}") {
                    self.pos += 6;
                    Ok(Term::SelfMarker)
                } else {
                    Err(self.error("only the {SELF} set is supported"))
                }
            }
            Some('^') => {
                self.pos += 1;
                let n = self.name();
                if n.is_empty() {
                    return Err(self.error("expected operator name"));
                }
                Ok(Term::operator(&n))
            }
            Some(sigil @ ('$' | '#')) => {
                self.pos += 1;
                let n = self.name();
                if n.is_empty() {
                    return Err(self.error("expected variable name"));
                }
                let index = if n.bytes().all(|b| b.is_ascii_digit()) {
                    let i: u32 = n.parse().map_err(|_| self.error("variable index overflows"))?;
                    if i == 0 {
                        return Err(self.error("variable indices start at 1"));
                    }
                    i
                } else {
                    let next = NAMED_VAR_BASE + self.named.len() as u32;
                    *self.named.entry((sigil, n)).or_insert(next)
                };
                Ok(if sigil == '$' {
                    Term::IndependentVar(index)
                } else {
                    Term::DependentVar(index)
                })
            }
            Some(c) if c.is_alphanumeric() || c == '_' => Ok(Term::atom(&self.name())),
            Some(c) => Err(self.error(format!("unexpected character {c:?}"))),
        }
    }
}

/// Text of an event in the transcript style `<term>. :|:`.
pub struct EventText<'a> {
    pub term: &'a Term,
    pub punctuation: Punctuation,
}

impl fmt::Display for EventText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} :|:", self.term, self.punctuation.mark())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn belief(line: &str) -> Term {
        match parse_line(line).unwrap() {
            InputLine::Belief(s) => s.term,
            other => panic!("expected belief, got {other:?}"),
        }
    }

    #[test]
    fn parses_located_color() {
        let t = belief("<(left * red) --> (loc * color)>. :|:");
        assert_eq!(
            t,
            Term::inheritance(
                Term::product(Term::atom("left"), Term::atom("red")),
                Term::product(Term::atom("loc"), Term::atom("color"))
            )
        );
    }

    #[test]
    fn parses_goal() {
        match parse_line("G! :|:").unwrap() {
            InputLine::Goal(s) => {
                assert_eq!(s.term, Term::atom("G"));
                assert!(s.present);
                assert!(s.truth.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_cycle_step_and_commands() {
        assert_eq!(parse_line("100").unwrap(), InputLine::CycleStep(100));
        assert_eq!(
            parse_line("*motorbabbling=0.9").unwrap(),
            InputLine::Command(Command::MotorBabbling(0.9))
        );
        assert_eq!(
            parse_line("*setopname 1 ^say").unwrap(),
            InputLine::Command(Command::SetOpName { slot: 1, name: "say".into() })
        );
        assert_eq!(
            parse_line("*babblingops=2").unwrap(),
            InputLine::Command(Command::BabblingOps(2))
        );
        assert_eq!(parse_line("*volume=100").unwrap(), InputLine::Command(Command::Volume(100)));
    }

    #[test]
    fn comments_and_blanks() {
        assert_eq!(parse_line("   ").unwrap(), InputLine::Blank);
        assert_eq!(
            parse_line("// Derived:").unwrap(),
            InputLine::Comment("Derived:".into())
        );
        let t = belief("<(sample * c-a-t) --> (loc * ocr)>. :|: // Substituted");
        assert_eq!(t.to_string(), "<(sample * c-a-t) --> (loc * ocr)>");
    }

    #[test]
    fn truth_annotation() {
        match parse_line("A. :|: {0.4 0.6}").unwrap() {
            InputLine::Belief(s) => assert_eq!(s.truth, Some(TruthValue::new(0.4, 0.6).unwrap())),
            other => panic!("{other:?}"),
        }
        assert!(parse_line("A. :|: {0.4 1.0}").is_err());
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_line("<(left * red) -> x>. :|:").unwrap_err();
        assert_eq!(e.column, 15);
        let e = parse_line("  <a --> b> :|:").unwrap_err();
        assert_eq!(e.column, 13);
        assert!(parse_line("*frobnicate=1").unwrap_err().message.contains("unknown command"));
        assert!(parse_line("99999999999999999999999").unwrap_err().message.contains("overflows"));
        assert!(parse_line("*setopname x ^say").is_err());
        assert!(parse_line("*volume=101").is_err());
    }

    #[test]
    fn variables_print_with_sigils() {
        let t = parse_term("<(#1 * $1) --> x>").unwrap();
        assert_eq!(t.to_string(), "<(#1 * $1) --> x>");
        assert!(parse_term("$0").is_err());
    }

    #[test]
    fn named_variables_are_consistent() {
        let t = parse_term("<$x <=> ($x * $y)>").unwrap();
        match t {
            Term::Equivalence(a, b) => match *b {
                Term::Product(x, y) => {
                    assert_eq!(*a, *x);
                    assert_ne!(*x, *y);
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nary_connectives_nest_left() {
        let t = parse_term("(a &/ b &/ c)").unwrap();
        assert_eq!(t.to_string(), "((a &/ b) &/ c)");
    }

    #[test]
    fn hyphenated_atoms_beside_copula() {
        let t = parse_term("<r-e-d-->x>").unwrap();
        assert_eq!(t.to_string(), "<r-e-d --> x>");
    }

    #[test]
    fn bare_operator_belief() {
        assert_eq!(belief("^op1. :|:"), Term::operator("op1"));
    }
}
