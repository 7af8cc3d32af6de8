//! The belief set: labeled formulas on a derivation path.
//!
//! Entries are append-only and keyed by time stamp. Retraction flips an
//! entry's status; nothing is ever deleted. The path clock also advances on
//! steps that enter nothing (a revision, or an inheritance the controller
//! declines), so time stamps increase strictly but may skip values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{Formula, Pattern, Rule, Shape, Symbol, SymbolKind, TimeStamp};

/// Source tag for formulas typed in by a human user.
pub const HUMAN_USER: &str = "hu";

/// Entrenchment given to every controller input.
pub const DEFAULT_ENTRENCHMENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Bel,
    Disbel,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Bel => "bel",
            Status::Disbel => "disbel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    APriori,
    APosteriori,
    Analytic,
    Synthetic,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::APriori => "aPriori",
            Category::APosteriori => "aPosteriori",
            Category::Analytic => "analytic",
            Category::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How an entry came to be on the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    External { source: String },
    Derived { rule: Rule, premises: Vec<TimeStamp> },
}

impl Origin {
    pub fn human() -> Self {
        Origin::External { source: HUMAN_USER.to_string() }
    }

    pub fn derived(rule: Rule, premises: Vec<TimeStamp>) -> Self {
        Origin::Derived { rule, premises }
    }

    pub fn premises(&self) -> &[TimeStamp] {
        match self {
            Origin::External { .. } => &[],
            Origin::Derived { premises, .. } => premises,
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self, Origin::External { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub time_stamp: TimeStamp,
    pub from: Origin,
    pub to: Vec<TimeStamp>,
    pub status: Status,
    pub entrenchment: f64,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    formula: Formula,
    key: Formula,
    shape: Shape,
    label: Label,
}

impl Entry {
    pub fn index(&self) -> TimeStamp {
        self.label.time_stamp
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_active(&self) -> bool {
        self.label.status == Status::Bel
    }

    /// An extralogical axiom: entered from outside rather than derived.
    pub fn is_axiom(&self) -> bool {
        self.label.from.is_external()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BeliefError {
    #[error("formula is already active at index {0}")]
    DuplicateActive(TimeStamp),
    #[error("no entry with index {0}")]
    UnknownIndex(TimeStamp),
    #[error("premise {0} is not active")]
    InactivePremise(TimeStamp),
    #[error("entrenchment {0} is outside [0, 1]")]
    EntrenchmentOutOfRange(f64),
    #[error("rule {rule} takes {expected} premise(s), got {found}")]
    PremiseCount { rule: Rule, expected: usize, found: usize },
}

/// The theory a belief set determines: its language and active axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryView {
    pub language: Vec<Symbol>,
    pub axioms: Vec<(TimeStamp, Formula)>,
}

/// The extralogical symbols entered so far, with the ordinal each symbol
/// received within its class on first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    order: Vec<Symbol>,
    ordinals: BTreeMap<Symbol, u32>,
    counters: BTreeMap<SymbolKind, u32>,
}

impl SymbolTable {
    pub fn contains(&self, s: &Symbol) -> bool {
        self.ordinals.contains_key(s)
    }

    pub fn ordinal(&self, s: &Symbol) -> Option<u32> {
        self.ordinals.get(s).copied()
    }

    /// Symbols in order of first appearance.
    pub fn symbols(&self) -> &[Symbol] {
        &self.order
    }

    fn insert(&mut self, s: Symbol) -> bool {
        if self.ordinals.contains_key(&s) {
            return false;
        }
        let n = self.counters.entry(s.kind()).or_insert(0);
        *n += 1;
        self.ordinals.insert(s.clone(), *n);
        self.order.push(s);
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BeliefSet {
    entries: Vec<Entry>,
    symbols: SymbolTable,
    clock: TimeStamp,
}

impl BeliefSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The current position on the derivation path.
    pub fn clock(&self) -> TimeStamp {
        self.clock
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    /// Symbols of `f` the language does not have yet.
    pub fn new_symbols(&self, f: &Formula) -> Vec<Symbol> {
        f.extralogical_symbols().into_iter().filter(|s| !self.symbols.contains(s)).collect()
    }

    /// Appends `f` as a new active entry and returns its time stamp.
    pub fn enter(
        &mut self,
        formula: Formula,
        from: Origin,
        entrenchment: f64,
        category: Category,
    ) -> Result<TimeStamp, BeliefError> {
        if !(0.0..=1.0).contains(&entrenchment) {
            return Err(BeliefError::EntrenchmentOutOfRange(entrenchment));
        }
        if let Some(existing) = self.find_identical(&formula) {
            return Err(BeliefError::DuplicateActive(existing));
        }
        let mut entrenchment = entrenchment;
        let mut category = category;
        if let Origin::Derived { rule, premises } = &from {
            if premises.len() != rule.premise_count() {
                return Err(BeliefError::PremiseCount {
                    rule: *rule,
                    expected: rule.premise_count(),
                    found: premises.len(),
                });
            }
            for p in premises {
                if !self.entry(*p).ok_or(BeliefError::UnknownIndex(*p))?.is_active() {
                    return Err(BeliefError::InactivePremise(*p));
                }
            }
            if rule.is_schema_instantiation() {
                entrenchment = 1.0;
                category = Category::APriori;
            }
        }
        let index = self.clock + 1;
        self.clock = index;
        for p in from.premises() {
            let pos = self.position(*p).expect("premises checked above");
            let to = &mut self.entries[pos].label.to;
            if !to.contains(&index) {
                to.push(index);
            }
        }
        for s in formula.extralogical_symbols() {
            self.symbols.insert(s);
        }
        let key = formula.identity_key();
        let shape = Shape::of(&formula);
        self.entries.push(Entry {
            formula,
            key,
            shape,
            label: Label { time_stamp: index, from, to: Vec::new(), status: Status::Bel, entrenchment, category },
        });
        Ok(index)
    }

    /// Advances the path clock by one step that enters no formula.
    pub fn advance(&mut self) -> TimeStamp {
        self.clock += 1;
        self.clock
    }

    pub fn set_status(&mut self, index: TimeStamp, status: Status) -> Result<(), BeliefError> {
        let pos = self.position(index).ok_or(BeliefError::UnknownIndex(index))?;
        self.entries[pos].label.status = status;
        Ok(())
    }

    /// Category for a formula derived from the given premises: analytic
    /// when every premise is a priori or analytic, otherwise synthetic.
    pub fn derived_category(&self, premises: &[TimeStamp]) -> Category {
        let logical = premises.iter().all(|p| {
            self.entry(*p).is_some_and(|e| matches!(e.label.category, Category::APriori | Category::Analytic))
        });
        if logical && !premises.is_empty() {
            Category::Analytic
        } else {
            Category::Synthetic
        }
    }

    fn position(&self, index: TimeStamp) -> Option<usize> {
        self.entries.binary_search_by_key(&index, Entry::index).ok()
    }

    pub fn entry(&self, index: TimeStamp) -> Option<&Entry> {
        self.position(index).map(|p| &self.entries[p])
    }

    pub fn is_active(&self, index: TimeStamp) -> bool {
        self.entry(index).is_some_and(Entry::is_active)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn active(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.is_active())
    }

    /// The active entry logically identical to `f`, if any.
    pub fn find_identical(&self, f: &Formula) -> Option<TimeStamp> {
        let key = f.identity_key();
        self.active().find(|e| e.key == key).map(Entry::index)
    }

    /// Active entries matching `pattern`, in ascending time-stamp order.
    pub fn find_active(&self, pattern: &Pattern) -> Vec<(TimeStamp, &Formula)> {
        self.active().filter(|e| pattern.matches(&e.shape)).map(|e| (e.index(), &e.formula)).collect()
    }

    /// First active entry after `after` matching `pattern`.
    pub fn next_active(&self, pattern: &Pattern, after: TimeStamp) -> Option<&Entry> {
        let start = self.entries.partition_point(|e| e.index() <= after);
        self.entries[start..].iter().find(|e| e.is_active() && pattern.matches(&e.shape))
    }

    pub fn theory_view(&self) -> TheoryView {
        TheoryView {
            language: self.symbols.symbols().to_vec(),
            axioms: self.active().filter(|e| e.is_axiom()).map(|e| (e.index(), e.formula.clone())).collect(),
        }
    }

    /// Indexes of active derived entries with an inactive premise.
    pub fn orphans(&self) -> BTreeSet<TimeStamp> {
        self.active()
            .filter(|e| e.label.from.premises().iter().any(|p| !self.is_active(*p)))
            .map(Entry::index)
            .collect()
    }
}
