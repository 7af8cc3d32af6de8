use std::collections::BTreeSet;

use drs_core::belief::{Category, Origin, Status};
use drs_core::controller::{ControllerError, Outcome, Step};
use drs_core::dma::{Connective, DmaSession};
use drs_core::graph::{Link, LinkKind, Node};
use drs_core::logic::{Const, Predicate, Rule};
use drs_core::text::{parse, render, Mode};

const TAXONOMY: [&str; 12] = [
    "forall x. (S(x) -> TL(x))",
    "forall x. (E(x) -> TL(x))",
    "forall x. (H(x) -> TL(x))",
    "forall x. (CS(x) -> S(x))",
    "forall x. (CS(x) -> E(x))",
    "forall x. (P(x) -> H(x))",
    "forall x. (AI(x) -> CS(x))",
    "forall x. ~(E(x) & H(x))",
    "S(Doc1)",
    "E(Doc1)",
    "AI(Doc2)",
    "P(Doc3)",
];

fn feed(s: &mut DmaSession, text: &str) -> drs_core::controller::EventReport {
    s.input(&parse(text, Mode::Plain).unwrap()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn taxonomy() -> DmaSession {
    let mut s = DmaSession::new(false);
    for t in TAXONOMY {
        feed(&mut s, t);
    }
    s
}

fn class(n: &str) -> Node {
    Node::Class(Predicate::plain(n, 1))
}

fn doc(n: &str) -> Node {
    Node::Individual(Const::new(n))
}

fn shown(s: &DmaSession, i: u32) -> String {
    render(s.beliefs().entry(i).unwrap().formula(), true)
}

fn from(s: &DmaSession, i: u32) -> (Option<Rule>, Vec<u32>) {
    match &s.beliefs().entry(i).unwrap().label().from {
        Origin::External { .. } => (None, vec![]),
        Origin::Derived { rule, premises } => (Some(*rule), premises.clone()),
    }
}

fn active(s: &DmaSession) -> BTreeSet<u32> {
    s.beliefs().active().map(|e| e.index()).collect()
}

#[test]
fn taxonomy_trace() {
    let s = taxonomy();
    let expected = [
        (10, "TL(Doc1)", vec![9, 1]),
        (13, "CS(Doc2)", vec![12, 7]),
        (14, "S(Doc2)", vec![13, 4]),
        (15, "TL(Doc2)", vec![14, 1]),
        (16, "E(Doc2)", vec![13, 5]),
        (18, "H(Doc3)", vec![17, 6]),
        (19, "TL(Doc3)", vec![18, 3]),
    ];
    assert_eq!(s.beliefs().len(), 19);
    assert_eq!(s.beliefs().clock(), 19);
    for (i, text) in TAXONOMY.iter().enumerate() {
        let i = i as u32 + 1;
        let idx = [1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 17][i as usize - 1];
        assert_eq!(shown(&s, idx), render(&parse(text, Mode::Plain).unwrap(), true));
        assert_eq!(from(&s, idx), (None, vec![]));
    }
    for (i, f, premises) in expected {
        assert_eq!(shown(&s, i), f);
        assert_eq!(from(&s, i), (Some(Rule::AristotelianSyllogism), premises));
        assert_eq!(s.beliefs().entry(i).unwrap().label().category, Category::Synthetic);
    }
    let to = |i: u32| s.beliefs().entry(i).unwrap().label().to.clone();
    assert_eq!(to(1), vec![10, 15]);
    assert_eq!(to(9), vec![10]);
    assert_eq!(to(11), Vec::<u32>::new());
    assert_eq!(to(13), vec![14, 16]);
    assert_eq!(to(5), vec![16]);
    assert_eq!(active(&s).len(), 19);
}

#[test]
fn taxonomy_graph() {
    let s = taxonomy();
    let nodes: BTreeSet<Node> = s.graph().nodes().cloned().collect();
    let want: BTreeSet<Node> = ["TL", "S", "E", "H", "CS", "P", "AI"]
        .iter()
        .map(|n| class(n))
        .chain(["Doc1", "Doc2", "Doc3"].iter().map(|d| doc(d)))
        .collect();
    assert_eq!(nodes, want);
    let links: BTreeSet<Link> = s.graph().links().cloned().collect();
    let sub = |a: &str, b: &str| Link::new(LinkKind::Subclass, class(a), class(b));
    let el = |a: &str, b: &str| Link::new(LinkKind::Element, doc(a), class(b));
    let want: BTreeSet<Link> = [
        sub("S", "TL"),
        sub("E", "TL"),
        sub("H", "TL"),
        sub("CS", "S"),
        sub("CS", "E"),
        sub("P", "H"),
        sub("AI", "CS"),
        Link::new(LinkKind::Disjoint, class("E"), class("H")),
        el("Doc1", "S"),
        el("Doc1", "E"),
        el("Doc2", "AI"),
        el("Doc3", "P"),
    ]
    .into_iter()
    .collect();
    assert_eq!(links, want);
}

#[test]
fn conflict_trace_with_duplicate_rule() {
    let mut s = taxonomy();
    let r = feed(&mut s, "CS(Doc3)");
    assert!(r.steps.iter().any(|st| matches!(st, Step::DuplicateIgnored { existing: 19, .. })));
    assert_eq!(shown(&s, 20), "CS(Doc3)");
    assert_eq!((shown(&s, 21), from(&s, 21)), ("S(Doc3)".into(), (Some(Rule::AristotelianSyllogism), vec![20, 4])));
    assert_eq!((shown(&s, 22), from(&s, 22)), ("E(Doc3)".into(), (Some(Rule::AristotelianSyllogism), vec![20, 5])));
    assert_eq!((shown(&s, 23), from(&s, 23)), ("false".into(), (Some(Rule::ConflictDetection), vec![22, 18, 8])));
    let Outcome::AwaitingChoice(p) = &r.outcome else { panic!("expected a pending choice") };
    assert_eq!(p.contradiction, 23);
    let culprits: BTreeSet<u32> = p.culprits.iter().map(|c| c.index).collect();
    assert_eq!(culprits, BTreeSet::from([5, 6, 8, 17, 20]));
    assert_eq!(s.pending().unwrap().culprits.len(), 5);
}

#[test]
fn choosing_the_new_document_restores_the_taxonomy() {
    let mut s = taxonomy();
    feed(&mut s, "CS(Doc3)");
    let before = taxonomy();
    let r = s.resolve_choice(&BTreeSet::from([20])).unwrap();
    assert_eq!(r.outcome, Outcome::Completed);
    let revised = r.steps.iter().find_map(|st| match st {
        Step::Revised { retracted, .. } => Some(retracted.clone()),
        _ => None,
    });
    assert_eq!(revised, Some(vec![20, 21, 22, 23]));
    assert_eq!(active(&s), (1..=19).collect());
    assert_eq!(s.graph(), before.graph());
    assert!(s.pending().is_none());
}

#[test]
fn choosing_the_rule_removes_its_edge() {
    let mut s = taxonomy();
    feed(&mut s, "CS(Doc3)");
    let r = s.resolve_choice(&BTreeSet::from([5])).unwrap();
    let retracted = r.steps.iter().find_map(|st| match st {
        Step::Revised { retracted, .. } => Some(retracted.clone()),
        _ => None,
    });
    assert_eq!(retracted, Some(vec![5, 16, 22, 23]));
    assert!(!s.graph().contains_link(&Link::new(LinkKind::Subclass, class("CS"), class("E"))));
    assert!(s.graph().contains_node(&class("CS")));
    assert_eq!(s.beliefs().entry(5).unwrap().label().status, Status::Disbel);
    assert!(s.beliefs().is_active(20) && s.beliefs().is_active(21));
}

#[test]
fn auto_choice_takes_the_earliest_culprit() {
    let mut s = taxonomy();
    s.set_auto_choose(true);
    let r = feed(&mut s, "CS(Doc3)");
    assert_eq!(r.outcome, Outcome::Completed);
    assert!(!s.beliefs().is_active(5));
}

#[test]
fn pending_choice_blocks_inputs() {
    let mut s = taxonomy();
    feed(&mut s, "CS(Doc3)");
    let err = s.input(&parse("S(Doc4)", Mode::Plain).unwrap()).unwrap_err();
    assert_eq!(err, ControllerError::ChoicePending);
    assert_eq!(err.code(), "SessionBusy");
    assert!(matches!(s.resolve_choice(&BTreeSet::new()), Err(ControllerError::InvalidChoice(_))));
    assert!(matches!(s.resolve_choice(&BTreeSet::from([9])), Err(ControllerError::InvalidChoice(_))));
    assert!(s.pending().is_some());
}

#[test]
fn resolving_without_a_pending_choice_fails() {
    let mut s = taxonomy();
    assert_eq!(s.resolve_choice(&BTreeSet::from([1])).unwrap_err(), ControllerError::NotPending);
}

#[test]
fn rejected_inputs_leave_state_alone() {
    let mut s = taxonomy();
    let snapshot = s.beliefs().clone();
    let reject = |s: &mut DmaSession, t: &str| s.input(&parse(t, Mode::Plain).unwrap()).unwrap_err();
    assert_eq!(reject(&mut s, "S(Doc1)"), ControllerError::DuplicateActive(9));
    assert_eq!(reject(&mut s, "TL(Doc1)"), ControllerError::DuplicateActive(10));
    assert!(matches!(reject(&mut s, "forall x. (TL(x) -> AI(x))"), ControllerError::WouldCreateLoop(_)));
    assert!(matches!(reject(&mut s, "forall x. (AI(x) -> S(x))"), ControllerError::WouldCreateRedundantPath(_)));
    assert!(matches!(reject(&mut s, "CS(Doc1)"), ControllerError::WouldCreateRedundantPath(_)));
    assert_eq!(reject(&mut s, "forall x. ~(H(x) & E(x))"), ControllerError::DuplicateActive(8));
    assert_eq!(reject(&mut s, "forall x. (E(x) -> H(x))"), ControllerError::InputContradictsBeliefs(8));
    assert!(matches!(reject(&mut s, "R(a, b)"), ControllerError::MalformedInput(_)));
    assert!(matches!(reject(&mut s, "~S(Doc1)"), ControllerError::MalformedInput(_)));
    assert!(matches!(reject(&mut s, "forall x. (S(x) -> S(x))"), ControllerError::MalformedInput(_)));
    assert_eq!(s.beliefs(), &snapshot);
}

#[test]
fn disjointness_input_detects_existing_overlap() {
    let mut s = DmaSession::new(true);
    feed(&mut s, "A(d)");
    feed(&mut s, "B(d)");
    let r = feed(&mut s, "forall x. ~(A(x) & B(x))");
    assert_eq!(from(&s, 4), (Some(Rule::ConflictDetection), vec![1, 2, 3]));
    assert_eq!(r.outcome, Outcome::Completed);
    assert!(!s.beliefs().is_active(1));
    assert!(!s.graph().contains_node(&class("A")) || s.graph().links().any(|l| l.touches(&class("A"))));
}

#[test]
fn retracting_a_link_rederives_alternatives() {
    let mut s = taxonomy();
    s.remove_link(9).unwrap();
    assert!(!s.beliefs().is_active(9) && !s.beliefs().is_active(10));
    let tl = parse("TL(Doc1)", Mode::Plain).unwrap();
    let again = s.beliefs().find_identical(&tl).expect("TL(Doc1) follows from E(Doc1)");
    assert_eq!(from(&s, again), (Some(Rule::AristotelianSyllogism), vec![11, 2]));
    assert_eq!(again, 21, "the retraction consumed step 20");
    assert!(s.graph().contains_node(&doc("Doc1")));
    assert!(!s.graph().contains_link(&Link::new(LinkKind::Element, doc("Doc1"), class("S"))));
}

#[test]
fn retracting_the_only_membership_prunes_the_document() {
    let mut s = taxonomy();
    s.remove_link(17).unwrap();
    assert!(!s.graph().contains_node(&doc("Doc3")));
    assert!(!s.beliefs().is_active(18) && !s.beliefs().is_active(19));
    assert!(matches!(s.remove_link(18), Err(ControllerError::NotAnAxiom(18))));
    assert!(matches!(s.remove_link(17), Err(ControllerError::NotAnAxiom(17))));
    assert!(matches!(s.remove_link(99), Err(ControllerError::UnknownIndex(99))));
}

#[test]
fn members_queries() {
    let s = taxonomy();
    let q = |cats: &[&str], op| {
        let preds: Vec<Predicate> = cats.iter().map(|c| Predicate::plain(*c, 1)).collect();
        s.members(&preds, op).into_iter().map(|c| c.to_string()).collect::<Vec<_>>()
    };
    assert_eq!(q(&["S"], Connective::Or), ["Doc1", "Doc2"]);
    assert_eq!(q(&["E", "S"], Connective::And), ["Doc1", "Doc2"]);
    assert_eq!(q(&["AI", "H"], Connective::Or), ["Doc2", "Doc3"]);
    assert_eq!(q(&["AI", "H"], Connective::And), Vec::<String>::new());
    assert_eq!(q(&["TL"], Connective::And), ["Doc1", "Doc2", "Doc3"]);
}

#[test]
fn forward_redundant_membership_enters_without_a_link() {
    let mut s = DmaSession::new(false);
    feed(&mut s, "forall x. (A(x) -> B(x))");
    feed(&mut s, "A(d)");
    let r = s.input(&parse("B(d)", Mode::Plain).unwrap());
    assert_eq!(r.unwrap_err(), ControllerError::DuplicateActive(3));
}
