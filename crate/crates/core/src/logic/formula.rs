//! Symbols, terms and the formula tree.
//!
//! A [`Formula`] may contain the abbreviations `∧`, `∨`, `↔` and `∃`.
//! [`Formula::expand_sugar`] rewrites them into the `¬`/`→`/`∀` core, and
//! logical identity is structural equality of the expanded tree with
//! occurrence indexes removed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::KernelError;

/// What a predicate letter stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateKind {
    Plain,
    /// A kind of object (`α^k`).
    Kind,
    /// A property of objects (`α^p`).
    Property,
}

/// Symbol classes of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Variable,
    Constant,
    PlainPredicate,
    KindPredicate,
    PropertyPredicate,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Const(Arc<str>);

impl Const {
    pub fn new(name: impl AsRef<str>) -> Self {
        Const(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    name: Arc<str>,
    kind: PredicateKind,
    arity: usize,
}

impl Predicate {
    /// A plain predicate letter of the given arity.
    pub fn plain(name: impl AsRef<str>, arity: usize) -> Self {
        Predicate { name: Arc::from(name.as_ref()), kind: PredicateKind::Plain, arity }
    }

    /// A unary kind predicate.
    pub fn kind(name: impl AsRef<str>) -> Self {
        Predicate { name: Arc::from(name.as_ref()), kind: PredicateKind::Kind, arity: 1 }
    }

    /// A unary property predicate.
    pub fn property(name: impl AsRef<str>) -> Self {
        Predicate { name: Arc::from(name.as_ref()), kind: PredicateKind::Property, arity: 1 }
    }

    pub fn with_kind(name: impl AsRef<str>, kind: PredicateKind, arity: usize) -> Result<Self, KernelError> {
        if kind != PredicateKind::Plain && arity != 1 {
            return Err(KernelError::ArityMismatch { expected: 1, found: arity });
        }
        Ok(Predicate { name: Arc::from(name.as_ref()), kind, arity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn predicate_kind(&self) -> PredicateKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn symbol_kind(&self) -> SymbolKind {
        match self.kind {
            PredicateKind::Plain => SymbolKind::PlainPredicate,
            PredicateKind::Kind => SymbolKind::KindPredicate,
            PredicateKind::Property => SymbolKind::PropertyPredicate,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        match self.kind {
            PredicateKind::Plain => Ok(()),
            PredicateKind::Kind => f.write_str("^k"),
            PredicateKind::Property => f.write_str("^p"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(Const),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Self {
        Term::Const(Const::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Const> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => c.fmt(f),
        }
    }
}

/// An extralogical symbol: something a belief set's language can grow by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Constant(Const),
    Predicate(Predicate),
}

impl Symbol {
    pub fn kind(&self) -> SymbolKind {
        match self {
            Symbol::Constant(_) => SymbolKind::Constant,
            Symbol::Predicate(p) => p.symbol_kind(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Constant(c) => c.fmt(f),
            Symbol::Predicate(p) => p.fmt(f),
        }
    }
}

/// An atomic formula. The occurrence index is extralogical and only
/// allowed on property predicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    predicate: Predicate,
    args: Vec<Term>,
    occurrence: Option<u32>,
}

impl Atom {
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Result<Self, KernelError> {
        if args.len() != predicate.arity() {
            return Err(KernelError::ArityMismatch { expected: predicate.arity(), found: args.len() });
        }
        Ok(Atom { predicate, args, occurrence: None })
    }

    pub fn with_occurrence(mut self, occurrence: u32) -> Result<Self, KernelError> {
        if self.predicate.predicate_kind() != PredicateKind::Property || occurrence == 0 {
            return Err(KernelError::InvalidOccurrence(self.predicate.name().to_string()));
        }
        self.occurrence = Some(occurrence);
        Ok(self)
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn occurrence(&self) -> Option<u32> {
        self.occurrence
    }

    fn without_occurrence(&self) -> Atom {
        Atom { predicate: self.predicate.clone(), args: self.args.clone(), occurrence: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Falsum,
    Atom(Atom),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: Predicate, args: Vec<Term>) -> Result<Self, KernelError> {
        Atom::new(predicate, args).map(Formula::Atom)
    }

    /// `pred(c)` for a unary predicate and a constant.
    pub fn ground(predicate: Predicate, constant: Const) -> Result<Self, KernelError> {
        Formula::atom(predicate, vec![Term::Const(constant)])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self, Formula::Falsum)
    }

    /// True when no abbreviation occurs anywhere in the tree.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Falsum | Formula::Atom(_) => true,
            Formula::Not(a) | Formula::Forall(_, a) => a.is_core(),
            Formula::Implies(a, b) => a.is_core() && b.is_core(),
            Formula::And(..) | Formula::Or(..) | Formula::Iff(..) | Formula::Exists(..) => false,
        }
    }

    /// Rewrites every abbreviation into the core connectives:
    /// `P∨Q = ¬P→Q`, `P∧Q = ¬(P→¬Q)`, `P↔Q = (P→Q)∧(Q→P)`, `∃xP = ¬∀x¬P`.
    pub fn expand_sugar(&self) -> Formula {
        match self {
            Formula::Falsum | Formula::Atom(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.expand_sugar()),
            Formula::Implies(a, b) => Formula::implies(a.expand_sugar(), b.expand_sugar()),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.expand_sugar()),
            Formula::And(a, b) => core_and(a.expand_sugar(), b.expand_sugar()),
            Formula::Or(a, b) => Formula::implies(Formula::not(a.expand_sugar()), b.expand_sugar()),
            Formula::Iff(a, b) => {
                let (a, b) = (a.expand_sugar(), b.expand_sugar());
                core_and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
            }
            Formula::Exists(v, a) => Formula::not(Formula::forall(v.clone(), Formula::not(a.expand_sugar()))),
        }
    }

    /// Removes every occurrence index.
    pub fn strip_occurrences(&self) -> Formula {
        self.map_atoms(&|a| Formula::Atom(a.without_occurrence()))
    }

    /// The key under which two formulas are logically identical.
    pub fn identity_key(&self) -> Formula {
        self.expand_sugar().strip_occurrences()
    }

    pub fn is_identical_to(&self, other: &Formula) -> bool {
        self.identity_key() == other.identity_key()
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Falsum => {}
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Whether `t` can replace the free occurrences of `x` without any
    /// of them falling under a quantifier binding `t`.
    pub fn substitutable(&self, x: &Var, t: &Term) -> bool {
        match t {
            Term::Const(_) => true,
            Term::Var(y) if y == x => true,
            Term::Var(y) => !self.free_under_binder(x, y, false),
        }
    }

    fn free_under_binder(&self, x: &Var, y: &Var, under: bool) -> bool {
        match self {
            Formula::Falsum => false,
            Formula::Atom(a) => under && a.args.iter().any(|t| t.as_var() == Some(x)),
            Formula::Not(a) => a.free_under_binder(x, y, under),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.free_under_binder(x, y, under) || b.free_under_binder(x, y, under)
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => v != x && a.free_under_binder(x, y, under || v == y),
        }
    }

    /// Simultaneous substitution. Every binding is checked before any
    /// replacement happens.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Term>) -> Result<Formula, KernelError> {
        for (x, t) in bindings {
            if !self.substitutable(x, t) {
                return Err(KernelError::NotSubstitutable { var: x.to_string(), term: t.to_string() });
            }
        }
        Ok(self.replace_free(bindings))
    }

    /// `P(t/x)` for a single binding.
    pub fn substitute_one(&self, x: &Var, t: &Term) -> Result<Formula, KernelError> {
        self.substitute(&BTreeMap::from([(x.clone(), t.clone())]))
    }

    fn replace_free(&self, bindings: &BTreeMap<Var, Term>) -> Formula {
        match self {
            Formula::Falsum => Formula::Falsum,
            Formula::Atom(a) => {
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
                        Term::Const(_) => t.clone(),
                    })
                    .collect();
                Formula::Atom(Atom { predicate: a.predicate.clone(), args, occurrence: a.occurrence })
            }
            Formula::Not(a) => Formula::not(a.replace_free(bindings)),
            Formula::Implies(a, b) => Formula::implies(a.replace_free(bindings), b.replace_free(bindings)),
            Formula::And(a, b) => Formula::and(a.replace_free(bindings), b.replace_free(bindings)),
            Formula::Or(a, b) => Formula::or(a.replace_free(bindings), b.replace_free(bindings)),
            Formula::Iff(a, b) => Formula::iff(a.replace_free(bindings), b.replace_free(bindings)),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let body = if bindings.contains_key(v) {
                    let mut inner = bindings.clone();
                    inner.remove(v);
                    a.replace_free(&inner)
                } else {
                    a.replace_free(bindings)
                };
                match self {
                    Formula::Forall(..) => Formula::forall(v.clone(), body),
                    _ => Formula::exists(v.clone(), body),
                }
            }
        }
    }

    fn map_atoms(&self, f: &dyn Fn(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Falsum => Formula::Falsum,
            Formula::Atom(a) => f(a),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.map_atoms(f)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.map_atoms(f)),
        }
    }

    /// Visits every atom, left to right.
    pub fn for_each_atom(&self, visit: &mut dyn FnMut(&Atom)) {
        match self {
            Formula::Falsum => {}
            Formula::Atom(a) => visit(a),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.for_each_atom(visit),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.for_each_atom(visit);
                b.for_each_atom(visit);
            }
        }
    }

    /// Constants and predicate letters, in order of first appearance.
    pub fn extralogical_symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        self.for_each_atom(&mut |a| {
            let p = Symbol::Predicate(a.predicate.clone());
            if !out.contains(&p) {
                out.push(p);
            }
            for t in &a.args {
                if let Term::Const(c) = t {
                    let s = Symbol::Constant(c.clone());
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            out.extend(a.args.iter().filter_map(Term::as_const).cloned());
        });
        out
    }

    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            out.insert(a.predicate.clone());
        });
        out
    }
}

fn core_and(a: Formula, b: Formula) -> Formula {
    Formula::not(Formula::implies(a, Formula::not(b)))
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}
