//! The term language: atoms, variables, the `{SELF}` marker, operators and
//! the binary connectives used by sensorimotor inference.
//!
//! Terms are plain immutable values. Structural operations (normalization,
//! unification, substitution) live here so every other module agrees on what
//! "the same statement" means.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Interned-ish atom or operator name.
pub type Symbol = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Independent,
    Dependent,
}

impl VarKind {
    pub fn sigil(self) -> char {
        match self {
            VarKind::Independent => '$',
            VarKind::Dependent => '#',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: u32,
}

impl Var {
    pub fn independent(index: u32) -> Self {
        Var { kind: VarKind::Independent, index }
    }

    pub fn dependent(index: u32) -> Self {
        Var { kind: VarKind::Dependent, index }
    }
}

/// A Narsese term.
///
/// The derived ordering is the canonical total order: variant tag first, then
/// children left to right, then names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(Symbol),
    IndependentVar(u32),
    DependentVar(u32),
    SelfMarker,
    Operator(Symbol),
    Product(Box<Term>, Box<Term>),
    Inheritance(Box<Term>, Box<Term>),
    Sequence(Box<Term>, Box<Term>),
    Implication(Box<Term>, Box<Term>),
    Equivalence(Box<Term>, Box<Term>),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Symbol::from(name))
    }

    pub fn operator(name: &str) -> Term {
        Term::Operator(Symbol::from(name.trim_start_matches('^')))
    }

    pub fn var(v: Var) -> Term {
        match v.kind {
            VarKind::Independent => Term::IndependentVar(v.index),
            VarKind::Dependent => Term::DependentVar(v.index),
        }
    }

    pub fn product(left: Term, right: Term) -> Term {
        Term::Product(Box::new(left), Box::new(right))
    }

    pub fn inheritance(subject: Term, predicate: Term) -> Term {
        Term::Inheritance(Box::new(subject), Box::new(predicate))
    }

    pub fn sequence(left: Term, right: Term) -> Term {
        Term::Sequence(Box::new(left), Box::new(right))
    }

    pub fn implication(antecedent: Term, consequent: Term) -> Term {
        Term::Implication(Box::new(antecedent), Box::new(consequent))
    }

    pub fn equivalence(left: Term, right: Term) -> Term {
        Term::Equivalence(Box::new(left), Box::new(right))
    }

    /// Left-associated sequence `((a &/ b) &/ c)` of the given elements.
    pub fn sequence_of(items: impl IntoIterator<Item = Term>) -> Option<Term> {
        items.into_iter().reduce(Term::sequence)
    }

    /// `<({SELF} * args) --> ^op>`, or `<{SELF} --> ^op>` without arguments.
    pub fn operation(op: &str, args: Option<Term>) -> Term {
        let subject = match args {
            Some(args) => Term::product(Term::SelfMarker, args),
            None => Term::SelfMarker,
        };
        Term::inheritance(subject, Term::operator(op))
    }

    pub fn as_var(&self) -> Option<Var> {
        match *self {
            Term::IndependentVar(i) => Some(Var::independent(i)),
            Term::DependentVar(i) => Some(Var::dependent(i)),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.as_var().is_some()
    }

    pub fn children(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Product(a, b)
            | Term::Inheritance(a, b)
            | Term::Sequence(a, b)
            | Term::Implication(a, b)
            | Term::Equivalence(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Rebuild a compound with the same connector and new children.
    fn with_children(&self, a: Term, b: Term) -> Term {
        match self {
            Term::Product(..) => Term::product(a, b),
            Term::Inheritance(..) => Term::inheritance(a, b),
            Term::Sequence(..) => Term::sequence(a, b),
            Term::Implication(..) => Term::implication(a, b),
            Term::Equivalence(..) => Term::equivalence(a, b),
            _ => self.clone(),
        }
    }

    /// True for `<{SELF} --> ^op>` and `<({SELF} * args) --> ^op>`.
    pub fn is_operation(&self) -> bool {
        match self {
            Term::Inheritance(subject, predicate) => {
                matches!(**predicate, Term::Operator(_))
                    && match &**subject {
                        Term::SelfMarker => true,
                        Term::Product(s, _) => matches!(**s, Term::SelfMarker),
                        _ => false,
                    }
            }
            _ => false,
        }
    }

    /// Operator name of an operation term.
    pub fn operator_name(&self) -> Option<&Symbol> {
        match self {
            Term::Inheritance(_, predicate) if self.is_operation() => match &**predicate {
                Term::Operator(name) => Some(name),
                _ => None,
            },
            _ => None,
        }
    }

    /// Argument term of an operation, `None` for argument-less operations.
    pub fn operation_args(&self) -> Option<&Term> {
        match self {
            Term::Inheritance(subject, _) if self.is_operation() => match &**subject {
                Term::Product(_, args) => Some(args),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::IndependentVar(_) | Term::DependentVar(_) => false,
            _ => match self.children() {
                Some((a, b)) => a.is_ground() && b.is_ground(),
                None => true,
            },
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        if self.as_var() == Some(v) {
            return true;
        }
        match self.children() {
            Some((a, b)) => a.contains_var(v) || b.contains_var(v),
            None => false,
        }
    }

    /// Flatten a left-nested sequence into its elements.
    pub fn sequence_elements(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            match t {
                Term::Sequence(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Visit every subterm, depth first, left to right.
    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        if let Some((a, b)) = self.children() {
            a.walk(f);
            b.walk(f);
        }
    }

    /// Replace every occurrence of `from` (compared structurally) by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self.children() {
            Some((a, b)) => self.with_children(a.replace(from, to), b.replace(from, to)),
            None => self.clone(),
        }
    }

    pub fn depth(&self) -> usize {
        match self.children() {
            Some((a, b)) => 1 + a.depth().max(b.depth()),
            None => 0,
        }
    }
}

/// Variable assignment produced by [`unify`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<Var, Term>);

impl Bindings {
    pub fn new() -> Self {
        Bindings(BTreeMap::new())
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.0.get(&v)
    }

    /// Bind `v`; refuses a value that mentions `v` itself.
    pub fn insert(&mut self, v: Var, value: Term) -> bool {
        if value.contains_var(v) {
            return false;
        }
        self.0.insert(v, value);
        true
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }
}

impl FromIterator<(Var, Term)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Bindings(iter.into_iter().collect())
    }
}

/// One-way matching of `pattern` against `ground`.
///
/// Variables in `pattern` (of either kind) match any subterm; everything in
/// `ground` is taken literally, including any variables it happens to carry.
pub fn unify(pattern: &Term, ground: &Term) -> Option<Bindings> {
    let mut bindings = Bindings::new();
    unify_into(pattern, ground, &mut bindings).then_some(bindings)
}

/// Extend `bindings` so that `pattern` matches `ground`. On failure the
/// bindings may be partially extended and should be discarded.
pub fn unify_into(pattern: &Term, ground: &Term, bindings: &mut Bindings) -> bool {
    if let Some(v) = pattern.as_var() {
        return match bindings.get(v) {
            Some(bound) => bound == ground,
            None => bindings.insert(v, ground.clone()),
        };
    }
    match (pattern, ground) {
        (Term::Atom(a), Term::Atom(b)) | (Term::Operator(a), Term::Operator(b)) => a == b,
        (Term::SelfMarker, Term::SelfMarker) => true,
        _ => match (pattern.children(), ground.children()) {
            (Some((pa, pb)), Some((ga, gb)))
                if std::mem::discriminant(pattern) == std::mem::discriminant(ground) =>
            {
                unify_into(pa, ga, bindings) && unify_into(pb, gb, bindings)
            }
            _ => false,
        },
    }
}

/// Replace bound variables; unbound ones are left as they are.
pub fn substitute(t: &Term, bindings: &Bindings) -> Term {
    if let Some(v) = t.as_var() {
        return bindings.get(v).cloned().unwrap_or_else(|| t.clone());
    }
    match t.children() {
        Some((a, b)) => t.with_children(substitute(a, bindings), substitute(b, bindings)),
        None => t.clone(),
    }
}

/// Canonical form: sequences left-associated, equivalence sides ordered,
/// variables renumbered per kind in first-occurrence order starting at 1.
pub fn normalize(t: &Term) -> Term {
    renumber(&order_equivalences(&associate_sequences(t)))
}

fn associate_sequences(t: &Term) -> Term {
    match t {
        Term::Sequence(..) => Term::sequence_of(t.sequence_elements().into_iter().map(associate_sequences))
            .expect("a sequence has elements"),
        _ => match t.children() {
            Some((a, b)) => t.with_children(associate_sequences(a), associate_sequences(b)),
            None => t.clone(),
        },
    }
}

fn renumber(t: &Term) -> Term {
    let mut map: BTreeMap<Var, u32> = BTreeMap::new();
    let mut next = [0u32; 2];
    fn go(t: &Term, map: &mut BTreeMap<Var, u32>, next: &mut [u32; 2]) -> Term {
        if let Some(v) = t.as_var() {
            let slot = match v.kind {
                VarKind::Independent => 0,
                VarKind::Dependent => 1,
            };
            let index = *map.entry(v).or_insert_with(|| {
                next[slot] += 1;
                next[slot]
            });
            return Term::var(Var { kind: v.kind, index });
        }
        match t.children() {
            Some((a, b)) => {
                let a = go(a, map, next);
                let b = go(b, map, next);
                t.with_children(a, b)
            }
            None => t.clone(),
        }
    }
    go(t, &mut map, &mut next)
}

fn order_equivalences(t: &Term) -> Term {
    match t {
        Term::Equivalence(a, b) => {
            let a = order_equivalences(a);
            let b = order_equivalences(b);
            let swap = match shape_cmp(&a, &b) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let straight = renumber(&Term::equivalence(a.clone(), b.clone()));
                    let swapped = renumber(&Term::equivalence(b.clone(), a.clone()));
                    swapped < straight
                }
            };
            if swap {
                Term::equivalence(b, a)
            } else {
                Term::equivalence(a, b)
            }
        }
        _ => match t.children() {
            Some((a, b)) => t.with_children(order_equivalences(a), order_equivalences(b)),
            None => t.clone(),
        },
    }
}

/// Total order that ignores variable indices (compares only their kind), so
/// side selection does not depend on how variables happen to be numbered.
fn shape_cmp(a: &Term, b: &Term) -> Ordering {
    fn tag(t: &Term) -> u8 {
        match t {
            Term::Atom(_) => 0,
            Term::IndependentVar(_) => 1,
            Term::DependentVar(_) => 2,
            Term::SelfMarker => 3,
            Term::Operator(_) => 4,
            Term::Product(..) => 5,
            Term::Inheritance(..) => 6,
            Term::Sequence(..) => 7,
            Term::Implication(..) => 8,
            Term::Equivalence(..) => 9,
        }
    }
    tag(a).cmp(&tag(b)).then_with(|| match (a, b) {
        (Term::Atom(x), Term::Atom(y)) | (Term::Operator(x), Term::Operator(y)) => x.cmp(y),
        _ => match (a.children(), b.children()) {
            (Some((a1, a2)), Some((b1, b2))) => shape_cmp(a1, b1).then_with(|| shape_cmp(a2, b2)),
            _ => Ordering::Equal,
        },
    })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(name) => f.write_str(name),
            Term::IndependentVar(i) => write!(f, "${i}"),
            Term::DependentVar(i) => write!(f, "#{i}"),
            Term::SelfMarker => f.write_str("{SELF}"),
            Term::Operator(name) => write!(f, "^{name}"),
            Term::Product(a, b) => write!(f, "({a} * {b})"),
            Term::Inheritance(a, b) => write!(f, "<{a} --> {b}>"),
            Term::Sequence(a, b) => write!(f, "({a} &/ {b})"),
            Term::Implication(a, b) => write!(f, "<{a} =/> {b}>"),
            Term::Equivalence(a, b) => write!(f, "<{a} <=> {b}>"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> Term {
        Term::atom(name)
    }

    fn color(pos: Term, c: &str) -> Term {
        Term::inheritance(Term::product(pos, a(c)), Term::product(a("loc"), a("color")))
    }

    fn ocr(pos: Term, w: &str) -> Term {
        Term::inheritance(Term::product(pos, a(w)), Term::product(a("loc"), a("ocr")))
    }

    #[test]
    fn renumbers_from_one() {
        let t = Term::equivalence(
            Term::inheritance(Term::product(Term::IndependentVar(2), a("red")), a("x")),
            Term::inheritance(Term::product(Term::IndependentVar(2), a("r-e-d")), a("y")),
        );
        let n = normalize(&t);
        assert_eq!(
            n.to_string(),
            "<<($1 * r-e-d) --> y> <=> <($1 * red) --> x>>"
        );
    }

    #[test]
    fn equivalence_side_order_is_canonical() {
        let ab = Term::equivalence(a("A"), a("B"));
        let ba = Term::equivalence(a("B"), a("A"));
        assert_eq!(normalize(&ab), normalize(&ba));
        assert_eq!(normalize(&ba).to_string(), "<A <=> B>");
    }

    #[test]
    fn side_order_ignores_variable_numbering() {
        let l = ocr(Term::IndependentVar(1), "r-e-d");
        let r = color(Term::IndependentVar(1), "red");
        assert_eq!(
            normalize(&Term::equivalence(l.clone(), r.clone())),
            normalize(&Term::equivalence(r, l))
        );
    }

    #[test]
    fn kinds_are_numbered_independently() {
        let t = Term::sequence(
            Term::product(Term::DependentVar(7), Term::IndependentVar(3)),
            Term::product(Term::IndependentVar(9), Term::DependentVar(7)),
        );
        assert_eq!(normalize(&t).to_string(), "((#1 * $1) &/ ($2 * #1))");
    }

    #[test]
    fn unify_binds_position() {
        let pattern = ocr(Term::IndependentVar(1), "r-e-d");
        let ground = ocr(a("up"), "r-e-d");
        let b = unify(&pattern, &ground).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.get(Var::independent(1)), Some(&a("up")));
        assert_eq!(substitute(&pattern, &b), ground);
    }

    #[test]
    fn unify_ground_with_itself_is_empty() {
        let t = color(a("left"), "red");
        assert!(unify(&t, &t).unwrap().is_empty());
    }

    #[test]
    fn unify_rejects_atom_mismatch() {
        let p = Term::inheritance(Term::product(a("left"), a("red")), a("x"));
        let g = Term::inheritance(Term::product(a("left"), a("blue")), a("x"));
        assert!(unify(&p, &g).is_none());
    }

    #[test]
    fn unify_rejects_inconsistent_binding() {
        let p = Term::product(Term::DependentVar(1), Term::DependentVar(1));
        assert!(unify(&p, &Term::product(a("a"), a("b"))).is_none());
        assert!(unify(&p, &Term::product(a("a"), a("a"))).is_some());
    }

    #[test]
    fn unify_rejects_connector_mismatch() {
        let p = Term::product(Term::DependentVar(1), a("b"));
        let g = Term::sequence(a("a"), a("b"));
        assert!(unify(&p, &g).is_none());
    }

    #[test]
    fn substitute_replaces_all_occurrences() {
        let t = Term::sequence(Term::DependentVar(1), Term::DependentVar(1));
        let b: Bindings = [(Var::dependent(1), a("a"))].into_iter().collect();
        assert_eq!(substitute(&t, &b), Term::sequence(a("a"), a("a")));
    }

    #[test]
    fn substitute_leaves_unbound() {
        let t = Term::product(Term::IndependentVar(1), Term::DependentVar(1));
        let b: Bindings = [(Var::independent(1), a("up"))].into_iter().collect();
        assert_eq!(substitute(&t, &b).to_string(), "(up * #1)");
        assert_eq!(substitute(&t, &Bindings::new()), t);
    }

    #[test]
    fn operation_classifier() {
        let op = Term::operation("select", Some(a("up")));
        assert!(op.is_operation());
        assert_eq!(op.operator_name().map(|s| &**s), Some("select"));
        assert_eq!(op.operation_args(), Some(&a("up")));
        let bare = Term::operation("op1", None);
        assert!(bare.is_operation());
        assert_eq!(bare.to_string(), "<{SELF} --> ^op1>");
        assert!(bare.operation_args().is_none());
        assert!(!color(a("left"), "red").is_operation());
    }

    #[test]
    fn bindings_refuse_self_reference() {
        let mut b = Bindings::new();
        assert!(!b.insert(Var::dependent(1), Term::product(Term::DependentVar(1), a("x"))));
    }

    #[test]
    fn sequence_elements_flatten_left_nesting() {
        let s = Term::sequence_of([a("a"), a("b"), a("c")]).unwrap();
        assert_eq!(s.to_string(), "((a &/ b) &/ c)");
        let names: Vec<String> = s.sequence_elements().iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn normalize_left_associates_sequences() {
        let right = Term::sequence(a("a"), Term::sequence(a("b"), a("c")));
        assert_eq!(normalize(&right), Term::sequence_of([a("a"), a("b"), a("c")]).unwrap());
    }
}
