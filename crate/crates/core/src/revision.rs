//! Dialectical belief revision.
//!
//! From a contradiction, follow from-lists back to the extralogical axioms
//! it rests on, let a chooser pick some of them, and retract those together
//! with everything reachable from them through to-lists.

use std::collections::BTreeSet;

use crate::belief::{BeliefError, BeliefSet, Status};
use crate::logic::{Formula, TimeStamp};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RevisionError {
    #[error("no entry with index {0}")]
    UnknownIndex(TimeStamp),
    #[error("entry {0} is not active")]
    InactiveEntry(TimeStamp),
    #[error("entry {0} is not a contradiction")]
    NotAContradiction(TimeStamp),
    #[error("the chooser returned no axioms")]
    ChooserReturnedEmpty,
    #[error("chosen indexes {0:?} are not all culprits")]
    InvalidChoice(Vec<TimeStamp>),
    #[error("contradictions {0:?} are still active after retraction")]
    ContradictionStillDerivable(Vec<TimeStamp>),
}

impl From<BeliefError> for RevisionError {
    fn from(e: BeliefError) -> Self {
        match e {
            BeliefError::UnknownIndex(i) => RevisionError::UnknownIndex(i),
            other => unreachable!("status changes only fail on unknown indexes: {other}"),
        }
    }
}

/// One round of revision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionCase {
    pub contradiction: TimeStamp,
    pub culprits: BTreeSet<TimeStamp>,
    pub chosen: BTreeSet<TimeStamp>,
    pub retracted: BTreeSet<TimeStamp>,
}

/// A culprit as shown to whoever chooses.
#[derive(Debug, Clone, PartialEq)]
pub struct Culprit {
    pub index: TimeStamp,
    pub formula: Formula,
    pub entrenchment: f64,
}

pub trait ChoiceProvider {
    /// Returns the culprits to retract, or `None` to defer the choice.
    fn choose(&mut self, culprits: &[Culprit]) -> Option<BTreeSet<TimeStamp>>;
}

/// Picks the least entrenched culprit, breaking ties by earliest index.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoChooser;

impl ChoiceProvider for AutoChooser {
    fn choose(&mut self, culprits: &[Culprit]) -> Option<BTreeSet<TimeStamp>> {
        let pick =
            culprits.iter().min_by(|a, b| a.entrenchment.total_cmp(&b.entrenchment).then(a.index.cmp(&b.index)))?;
        Some(BTreeSet::from([pick.index]))
    }
}

/// Always defers, leaving the choice to a human.
#[derive(Debug, Clone, Copy, Default)]
pub struct InteractiveChooser;

impl ChoiceProvider for InteractiveChooser {
    fn choose(&mut self, _: &[Culprit]) -> Option<BTreeSet<TimeStamp>> {
        None
    }
}

/// Result of starting a revision round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DbrOutcome {
    Completed(RevisionCase),
    /// The chooser deferred; finish with [`complete_dbr`].
    Deferred(RevisionCase),
}

/// Extralogical axioms the entry at `index` ultimately rests on.
pub fn collect_culprits(bs: &BeliefSet, index: TimeStamp) -> Result<BTreeSet<TimeStamp>, RevisionError> {
    let start = bs.entry(index).ok_or(RevisionError::UnknownIndex(index))?;
    if !start.is_active() {
        return Err(RevisionError::InactiveEntry(index));
    }
    let mut seen = BTreeSet::from([index]);
    let mut stack = vec![index];
    let mut out = BTreeSet::new();
    while let Some(i) = stack.pop() {
        let e = bs.entry(i).ok_or(RevisionError::UnknownIndex(i))?;
        if e.is_axiom() {
            out.insert(i);
        }
        for p in e.label().from.premises() {
            if seen.insert(*p) {
                stack.push(*p);
            }
        }
    }
    Ok(out)
}

/// Disbelieves `seeds` and every entry reachable from them through
/// to-lists. Returns the entries whose status actually changed.
pub fn forward_retract(bs: &mut BeliefSet, seeds: &BTreeSet<TimeStamp>) -> Result<BTreeSet<TimeStamp>, RevisionError> {
    let mut reach = BTreeSet::new();
    let mut stack: Vec<TimeStamp> = seeds.iter().copied().collect();
    while let Some(i) = stack.pop() {
        if !reach.insert(i) {
            continue;
        }
        let e = bs.entry(i).ok_or(RevisionError::UnknownIndex(i))?;
        stack.extend(e.label().to.iter().copied());
    }
    let mut flipped = BTreeSet::new();
    for i in reach {
        if bs.is_active(i) {
            bs.set_status(i, Status::Disbel)?;
            flipped.insert(i);
        }
    }
    Ok(flipped)
}

pub fn culprit_details(bs: &BeliefSet, culprits: &BTreeSet<TimeStamp>) -> Vec<Culprit> {
    culprits
        .iter()
        .filter_map(|i| bs.entry(*i))
        .map(|e| Culprit { index: e.index(), formula: e.formula().clone(), entrenchment: e.label().entrenchment })
        .collect()
}

/// Starts a revision round for the contradiction at `index`.
pub fn run_dbr(
    bs: &mut BeliefSet,
    index: TimeStamp,
    chooser: &mut dyn ChoiceProvider,
) -> Result<DbrOutcome, RevisionError> {
    let entry = bs.entry(index).ok_or(RevisionError::UnknownIndex(index))?;
    if !entry.formula().is_falsum() {
        return Err(RevisionError::NotAContradiction(index));
    }
    let culprits = collect_culprits(bs, index)?;
    let case = RevisionCase { contradiction: index, culprits, chosen: BTreeSet::new(), retracted: BTreeSet::new() };
    match chooser.choose(&culprit_details(bs, &case.culprits)) {
        None => Ok(DbrOutcome::Deferred(case)),
        Some(chosen) => complete_dbr(bs, case, chosen).map(DbrOutcome::Completed),
    }
}

/// Retracts `chosen` and its consequences. The revision counts as one step
/// on the derivation path.
pub fn complete_dbr(
    bs: &mut BeliefSet,
    mut case: RevisionCase,
    chosen: BTreeSet<TimeStamp>,
) -> Result<RevisionCase, RevisionError> {
    if chosen.is_empty() {
        return Err(RevisionError::ChooserReturnedEmpty);
    }
    if !chosen.is_subset(&case.culprits) {
        return Err(RevisionError::InvalidChoice(chosen.into_iter().collect()));
    }
    case.retracted = forward_retract(bs, &chosen)?;
    case.chosen = chosen;
    bs.advance();
    if bs.is_active(case.contradiction) {
        let live: Vec<TimeStamp> = bs.active().filter(|e| e.formula().is_falsum()).map(|e| e.index()).collect();
        return Err(RevisionError::ContradictionStillDerivable(live));
    }
    Ok(case)
}
