//! Finite interpretations: truth valuation, validity, model search and
//! truth tables. Used as an independent oracle by the test suites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{Const, Formula, Predicate, Term, Var};

/// Largest domain `find_model` will try.
pub const MAX_DOMAIN: usize = 8;
/// Most predicates `find_model` will search over.
pub const MAX_PREDICATES: usize = 16;
/// Most propositional letters `is_tautology` will table.
pub const MAX_LETTERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthValue {
    T,
    F,
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            TruthValue::T
        } else {
            TruthValue::F
        }
    }
}

impl TruthValue {
    pub fn is_true(self) -> bool {
        self == TruthValue::T
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("formula has free variables {0:?}")]
    NotClosed(Vec<String>),
    #[error("symbol {0} is not interpreted")]
    UnknownSymbol(String),
    #[error("search bound too large: {0}")]
    BoundTooLarge(String),
    #[error("{0} propositional letters exceed the limit of {MAX_LETTERS}")]
    TooManyLetters(usize),
}

/// A finite interpretation over individuals `0..size`. Individual `d` is
/// also its own name, written as the constant `@d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    size: usize,
    consts: BTreeMap<Const, usize>,
    preds: BTreeMap<Predicate, BTreeSet<Vec<usize>>>,
}

impl Interpretation {
    /// An interpretation with every predicate empty. Panics on an empty domain.
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "the domain must be nonempty");
        Interpretation { size, consts: BTreeMap::new(), preds: BTreeMap::new() }
    }

    /// The name of individual `d`.
    pub fn name(d: usize) -> Const {
        Const::new(format!("@{d}"))
    }

    pub fn domain_size(&self) -> usize {
        self.size
    }

    pub fn assign(&mut self, c: Const, d: usize) -> &mut Self {
        assert!(d < self.size, "individual {d} outside the domain");
        self.consts.insert(c, d);
        self
    }

    /// Declares `p` with an empty extension.
    pub fn declare(&mut self, p: Predicate) -> &mut Self {
        self.preds.entry(p).or_default();
        self
    }

    pub fn set(&mut self, p: Predicate, tuple: Vec<usize>, holds: bool) -> &mut Self {
        assert_eq!(tuple.len(), p.arity(), "tuple arity");
        assert!(tuple.iter().all(|d| *d < self.size), "tuple outside the domain");
        let ext = self.preds.entry(p).or_default();
        if holds {
            ext.insert(tuple);
        } else {
            ext.remove(&tuple);
        }
        self
    }

    pub fn constant(&self, c: &Const) -> Option<usize> {
        self.consts.get(c).copied().or_else(|| {
            let d: usize = c.as_str().strip_prefix('@')?.parse().ok()?;
            (d < self.size).then_some(d)
        })
    }

    pub fn extension(&self, p: &Predicate) -> Option<&BTreeSet<Vec<usize>>> {
        self.preds.get(p)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D = {{0..{}}}", self.size - 1)?;
        for (c, d) in &self.consts {
            write!(f, "; {c} = {d}")?;
        }
        for (p, ext) in &self.preds {
            write!(f, "; {p} = {ext:?}")?;
        }
        Ok(())
    }
}

type Env = BTreeMap<Var, usize>;

fn term_value(i: &Interpretation, env: &Env, t: &Term) -> Result<usize, SemanticsError> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or_else(|| SemanticsError::NotClosed(vec![v.to_string()])),
        Term::Const(c) => i.constant(c).ok_or_else(|| SemanticsError::UnknownSymbol(c.to_string())),
    }
}

fn eval(i: &Interpretation, env: &mut Env, f: &Formula) -> Result<bool, SemanticsError> {
    Ok(match f {
        Formula::Falsum => false,
        Formula::Atom(a) => {
            let ext =
                i.preds.get(a.predicate()).ok_or_else(|| SemanticsError::UnknownSymbol(a.predicate().to_string()))?;
            let tuple = a.args().iter().map(|t| term_value(i, env, t)).collect::<Result<Vec<_>, _>>()?;
            ext.contains(&tuple)
        }
        Formula::Not(p) => !eval(i, env, p)?,
        Formula::Implies(p, q) => !eval(i, env, p)? || eval(i, env, q)?,
        Formula::And(p, q) => eval(i, env, p)? && eval(i, env, q)?,
        Formula::Or(p, q) => eval(i, env, p)? || eval(i, env, q)?,
        Formula::Iff(p, q) => eval(i, env, p)? == eval(i, env, q)?,
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let saved = env.get(x).copied();
            let mut result = universal;
            for d in 0..i.size {
                env.insert(x.clone(), d);
                if eval(i, env, body)? != universal {
                    result = !universal;
                    break;
                }
            }
            match saved {
                Some(d) => env.insert(x.clone(), d),
                None => env.remove(x),
            };
            result
        }
    })
}

/// Truth value of a closed formula. Occurrence indexes are ignored.
pub fn evaluate_closed(i: &Interpretation, f: &Formula) -> Result<TruthValue, SemanticsError> {
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(SemanticsError::NotClosed(free.iter().map(|v| v.to_string()).collect()));
    }
    eval(i, &mut Env::new(), f).map(TruthValue::from)
}

/// True under every assignment of individuals to the free variables.
pub fn valid_in(i: &Interpretation, f: &Formula) -> Result<bool, SemanticsError> {
    eval(i, &mut Env::new(), &closure(f))
}

pub fn is_model<'a>(
    i: &Interpretation,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Result<bool, SemanticsError> {
    for f in formulas {
        if !valid_in(i, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Universal closure over the free variables.
fn closure(f: &Formula) -> Formula {
    f.free_variables().into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

// ---------------------------------------------------------------------------
// Model search

/// Partial interpretation: each (predicate, tuple) is true, false or open.
struct Partial<'a> {
    size: usize,
    consts: &'a BTreeMap<Const, usize>,
    preds: &'a BTreeMap<Predicate, usize>,
    bits: &'a [Option<bool>],
}

impl Partial<'_> {
    fn slot(&self, p: &Predicate, tuple: &[usize]) -> usize {
        // Element-major: all predicates of individual 0 first; nullary last.
        let base = tuple.first().copied().unwrap_or(self.size);
        base * self.preds.len() + self.preds[p]
    }

    /// Kleene evaluation: `None` when the open bits decide the value.
    fn eval(&self, env: &mut Env, f: &Formula) -> Option<bool> {
        match f {
            Formula::Falsum => Some(false),
            Formula::Atom(a) => {
                let tuple: Vec<usize> = a
                    .args()
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => env[v],
                        Term::Const(c) => self.consts[c],
                    })
                    .collect();
                self.bits[self.slot(a.predicate(), &tuple)]
            }
            Formula::Not(p) => self.eval(env, p).map(|b| !b),
            Formula::Implies(p, q) => match (self.eval(env, p), self.eval(env, q)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
            Formula::Forall(x, body) => {
                let saved = env.get(x).copied();
                let mut out = Some(true);
                for d in 0..self.size {
                    env.insert(x.clone(), d);
                    match self.eval(env, body) {
                        Some(false) => {
                            out = Some(false);
                            break;
                        }
                        None => out = None,
                        Some(true) => {}
                    }
                }
                match saved {
                    Some(d) => env.insert(x.clone(), d),
                    None => env.remove(x),
                };
                out
            }
            other => unreachable!("sugar expanded before search: {other}"),
        }
    }
}

/// Searches interpretations with domains of size 1 to `max_domain` and
/// returns the first model found. `None` only means there is no model
/// within the bound.
pub fn find_model(formulas: &[Formula], max_domain: usize) -> Result<Option<Interpretation>, SemanticsError> {
    if max_domain == 0 || max_domain > MAX_DOMAIN {
        return Err(SemanticsError::BoundTooLarge(format!("domain size {max_domain} (limit {MAX_DOMAIN})")));
    }
    let core: Vec<Formula> = formulas.iter().map(|f| closure(&f.expand_sugar())).collect();
    let consts: Vec<Const> = core.iter().flat_map(|f| f.constants()).collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(c) = consts.iter().find(|c| c.as_str().starts_with('@')) {
        return Err(SemanticsError::UnknownSymbol(c.to_string()));
    }
    let preds: BTreeSet<Predicate> = core.iter().flat_map(|f| f.predicates()).collect();
    if preds.len() > MAX_PREDICATES {
        return Err(SemanticsError::BoundTooLarge(format!("{} predicates (limit {MAX_PREDICATES})", preds.len())));
    }
    if preds.iter().any(|p| p.arity() > 1) {
        return Err(SemanticsError::BoundTooLarge("search covers unary and nullary predicates only".into()));
    }
    let pred_slots: BTreeMap<Predicate, usize> = preds.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    for size in 1..=max_domain {
        let mut assignment = vec![0usize; consts.len()];
        loop {
            let const_map: BTreeMap<Const, usize> = consts.iter().cloned().zip(assignment.iter().copied()).collect();
            let mut search = Search { size, consts: &const_map, preds: &pred_slots, formulas: &core };
            if let Some(bits) = search.run() {
                return Ok(Some(search.build(&bits)));
            }
            if !next_restricted_growth(&mut assignment, size) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances a restricted-growth string: each value is at most one more
/// than the maximum before it, and below `size`.
fn next_restricted_growth(a: &mut [usize], size: usize) -> bool {
    for i in (1..a.len()).rev() {
        let bound = a[..i].iter().max().map_or(0, |m| m + 1);
        if a[i] < bound && a[i] + 1 < size {
            a[i] += 1;
            a[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

struct Search<'a> {
    size: usize,
    consts: &'a BTreeMap<Const, usize>,
    preds: &'a BTreeMap<Predicate, usize>,
    formulas: &'a [Formula],
}

impl Search<'_> {
    fn slots(&self) -> usize {
        self.size * self.preds.len() + self.preds.len()
    }

    fn run(&mut self) -> Option<Vec<Option<bool>>> {
        let mut bits = vec![None; self.slots()];
        self.dfs(&mut bits, 0).then_some(bits)
    }

    fn verdict(&self, bits: &[Option<bool>]) -> Option<bool> {
        let view = Partial { size: self.size, consts: self.consts, preds: self.preds, bits };
        let mut all = Some(true);
        for f in self.formulas {
            match view.eval(&mut Env::new(), f) {
                Some(false) => return Some(false),
                None => all = None,
                Some(true) => {}
            }
        }
        all
    }

    fn dfs(&self, bits: &mut Vec<Option<bool>>, next: usize) -> bool {
        match self.verdict(bits) {
            Some(false) => return false,
            Some(true) => return true,
            None => {}
        }
        if next == bits.len() {
            return false;
        }
        for value in [false, true] {
            bits[next] = Some(value);
            if self.dfs(bits, next + 1) {
                return true;
            }
        }
        bits[next] = None;
        false
    }

    fn build(&self, bits: &[Option<bool>]) -> Interpretation {
        let mut i = Interpretation::new(self.size);
        for (c, d) in self.consts {
            i.assign(c.clone(), *d);
        }
        let view = Partial { size: self.size, consts: self.consts, preds: self.preds, bits };
        for p in self.preds.keys() {
            i.declare(p.clone());
            let tuples: Vec<Vec<usize>> =
                if p.arity() == 0 { vec![vec![]] } else { (0..self.size).map(|d| vec![d]).collect() };
            for t in tuples {
                let holds = bits[view.slot(p, &t)].unwrap_or(false);
                i.set(p.clone(), t, holds);
            }
        }
        i
    }
}

// ---------------------------------------------------------------------------
// Truth tables

/// Whether `f` is true under every valuation of its propositional letters.
/// Atoms and quantified subformulas count as letters; `⊥` is false.
pub fn is_tautology(f: &Formula) -> Result<bool, SemanticsError> {
    let f = f.expand_sugar();
    let mut letters: Vec<Formula> = Vec::new();
    collect_letters(&f, &mut letters);
    if letters.len() > MAX_LETTERS {
        return Err(SemanticsError::TooManyLetters(letters.len()));
    }
    Ok((0u32..1 << letters.len()).all(|row| truth(&f, &letters, row)))
}

fn collect_letters(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Falsum => {}
        Formula::Not(p) => collect_letters(p, out),
        Formula::Implies(p, q) => {
            collect_letters(p, out);
            collect_letters(q, out);
        }
        _ => {
            let key = f.identity_key();
            if !out.contains(&key) {
                out.push(key);
            }
        }
    }
}

fn truth(f: &Formula, letters: &[Formula], row: u32) -> bool {
    match f {
        Formula::Falsum => false,
        Formula::Not(p) => !truth(p, letters, row),
        Formula::Implies(p, q) => !truth(p, letters, row) || truth(q, letters, row),
        _ => {
            let key = f.identity_key();
            let pos = letters.iter().position(|l| *l == key).expect("letter collected");
            row >> pos & 1 == 1
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration

/// Every interpretation of the given constants and predicates over a domain
/// of `size` individuals.
pub fn interpretations(
    consts: &[Const],
    preds: &[Predicate],
    size: usize,
) -> Result<impl Iterator<Item = Interpretation>, SemanticsError> {
    if size == 0 {
        return Err(SemanticsError::BoundTooLarge("empty domain".into()));
    }
    let tuples: Vec<(Predicate, Vec<Vec<usize>>)> = preds
        .iter()
        .map(|p| {
            let mut ts = vec![Vec::new()];
            for _ in 0..p.arity() {
                ts = ts.into_iter().flat_map(|t| (0..size).map(move |d| [t.clone(), vec![d]].concat())).collect();
            }
            (p.clone(), ts)
        })
        .collect();
    let bits: usize = tuples.iter().map(|(_, ts)| ts.len()).sum();
    let const_choices = (size as u128).checked_pow(consts.len() as u32);
    let total = const_choices
        .and_then(|c| 1u128.checked_shl(bits as u32).filter(|_| bits < 64).map(|b| b * c))
        .filter(|t| *t <= 1 << 24)
        .ok_or_else(|| SemanticsError::BoundTooLarge(format!("{bits} bits and {} constants", consts.len())))?;
    let consts = consts.to_vec();
    Ok((0..total).map(move |mut n| {
        let mut i = Interpretation::new(size);
        for c in &consts {
            i.assign(c.clone(), (n % size as u128) as usize);
            n /= size as u128;
        }
        for (p, ts) in &tuples {
            i.declare(p.clone());
            for t in ts {
                if n & 1 == 1 {
                    i.set(p.clone(), t.clone(), true);
                }
                n >>= 1;
            }
        }
        i
    }))
}
