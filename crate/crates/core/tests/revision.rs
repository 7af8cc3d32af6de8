use std::collections::BTreeSet;

use drs_core::belief::{BeliefSet, Category, Origin, Status};
use drs_core::logic::{Const, Formula, Predicate, Rule};
use drs_core::revision::{
    collect_culprits, complete_dbr, forward_retract, run_dbr, AutoChooser, DbrOutcome, InteractiveChooser,
    RevisionError,
};
use proptest::prelude::*;

fn fact(n: usize) -> Formula {
    Formula::ground(Predicate::plain("F", 1), Const::new(format!("c{n}"))).unwrap()
}

/// Axioms first, then derived entries each resting on two earlier ones,
/// then a contradiction resting on the last two.
fn build(axioms: usize, derived: &[(usize, usize)]) -> BeliefSet {
    let mut bs = BeliefSet::new();
    for i in 0..axioms {
        bs.enter(fact(i), Origin::human(), 0.5, Category::APosteriori).unwrap();
    }
    for (k, (a, b)) in derived.iter().enumerate() {
        let n = bs.len();
        let premises = vec![(a % n) as u32 + 1, (b % n) as u32 + 1];
        let cat = bs.derived_category(&premises);
        bs.enter(fact(axioms + k), Origin::derived(Rule::AndIntro, premises), 0.5, cat).unwrap();
    }
    let n = bs.len() as u32;
    bs.enter(Formula::Falsum, Origin::derived(Rule::ContradictionDetection, vec![n, n - 1]), 0.5, Category::Synthetic)
        .unwrap();
    bs
}

/// Culprits by walking from-lists.
fn axioms_below(bs: &BeliefSet, i: u32) -> BTreeSet<u32> {
    let e = bs.entry(i).unwrap();
    if e.is_axiom() {
        return BTreeSet::from([i]);
    }
    e.label().from.premises().iter().flat_map(|p| axioms_below(bs, *p)).collect()
}

/// Entries depending on any seed, by scanning from-lists forward.
fn dependents(bs: &BeliefSet, seeds: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut out = seeds.clone();
    for e in bs.entries() {
        if e.label().from.premises().iter().any(|p| out.contains(p)) {
            out.insert(e.index());
        }
    }
    out
}

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..6, prop::collection::vec((0usize..40, 0usize..40), 1..12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn culprits_are_the_axioms_below((axioms, derived) in graph()) {
        let bs = build(axioms, &derived);
        let bottom = bs.len() as u32;
        prop_assert_eq!(collect_culprits(&bs, bottom).unwrap(), axioms_below(&bs, bottom));
    }

    #[test]
    fn retraction_closes_over_dependents((axioms, derived) in graph(), pick in 0usize..10) {
        let mut bs = build(axioms, &derived);
        let seed = BTreeSet::from([(pick % axioms) as u32 + 1]);
        let want = dependents(&bs, &seed);
        let flipped = forward_retract(&mut bs, &seed).unwrap();
        prop_assert_eq!(&flipped, &want);
        for e in bs.entries() {
            prop_assert_eq!(e.is_active(), !want.contains(&e.index()));
        }
        prop_assert!(bs.orphans().is_empty());
    }

    #[test]
    fn revision_leaves_no_orphans((axioms, derived) in graph()) {
        let mut bs = build(axioms, &derived);
        let bottom = bs.len() as u32;
        let clock = bs.clock();
        let DbrOutcome::Completed(case) = run_dbr(&mut bs, bottom, &mut AutoChooser).unwrap() else {
            panic!("the automatic chooser always decides");
        };
        prop_assert_eq!(case.chosen.len(), 1);
        prop_assert_eq!(case.chosen.first(), case.culprits.first());
        prop_assert!(!bs.is_active(bottom));
        prop_assert!(bs.orphans().is_empty());
        prop_assert_eq!(bs.clock(), clock + 1);
    }
}

#[test]
fn interactive_revision_defers_then_validates() {
    let mut bs = build(3, &[(0, 1), (1, 2)]);
    let bottom = bs.len() as u32;
    let DbrOutcome::Deferred(case) = run_dbr(&mut bs, bottom, &mut InteractiveChooser).unwrap() else {
        panic!("expected a deferred choice");
    };
    assert_eq!(case.culprits, BTreeSet::from([1, 2, 3]));
    assert!(bs.is_active(bottom));
    assert_eq!(complete_dbr(&mut bs, case.clone(), BTreeSet::new()), Err(RevisionError::ChooserReturnedEmpty));
    assert!(matches!(complete_dbr(&mut bs, case.clone(), BTreeSet::from([4])), Err(RevisionError::InvalidChoice(_))));
    let done = complete_dbr(&mut bs, case, BTreeSet::from([2])).unwrap();
    assert_eq!(done.retracted, BTreeSet::from([2, 4, 5, 6]));
    assert_eq!(bs.entry(2).unwrap().label().status, Status::Disbel);
}

#[test]
fn revision_requires_an_active_contradiction() {
    let mut bs = build(2, &[(0, 1)]);
    assert_eq!(run_dbr(&mut bs, 1, &mut AutoChooser), Err(RevisionError::NotAContradiction(1)));
    assert_eq!(run_dbr(&mut bs, 99, &mut AutoChooser), Err(RevisionError::UnknownIndex(99)));
    forward_retract(&mut bs, &BTreeSet::from([1])).unwrap();
    assert_eq!(collect_culprits(&bs, 4), Err(RevisionError::InactiveEntry(4)));
}
