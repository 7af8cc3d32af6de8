//! Document management assistant: a taxonomy of documents and categories.
//!
//! User inputs are memberships `α(a)`, subclass axioms `∀x(α(x)→β(x))` and
//! disjointness axioms `∀x¬(α(x)∧β(x))`. The controller keeps every
//! membership implied by the graph in the belief set and resolves conflicts
//! with a disjointness axiom through belief revision.
//!
//! Processing runs on an explicit stack of frames so that a revision
//! waiting on a human choice can suspend the cascade and later resume it.

use std::collections::BTreeSet;

use crate::belief::BeliefSet;
pub use crate::controller::Connective;
use crate::controller::{ControllerError, Core, EventReport, PendingChoice, Revision, Step};
use crate::graph::{Link, LinkGraph, LinkKind, Node};
use crate::logic::{Const, Formula, Pattern, Predicate, PredicateKind, Rule, Shape, Term, TimeStamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    /// A membership just entered: look for conflicts, then chain upward.
    Member { index: TimeStamp, phase: Phase },
    /// A subclass axiom just entered: apply it to existing members.
    Subclass { axiom: TimeStamp, after: TimeStamp },
    /// A disjointness axiom just entered: look for documents in both.
    Disjoint { axiom: TimeStamp },
    /// Re-derive memberships lost to a retraction.
    Resaturate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Conflicts,
    Cascade { after: TimeStamp },
}

/// The three input forms.
enum Input {
    Member(Predicate, Const),
    Subclass(Predicate, Predicate),
    Disjoint(Predicate, Predicate),
}

#[derive(Debug, Clone)]
pub struct DmaSession {
    core: Core,
    stack: Vec<Frame>,
}

impl Default for DmaSession {
    fn default() -> Self {
        Self::new(false)
    }
}

impl DmaSession {
    /// With `auto_choose`, revisions retract the least entrenched culprit
    /// without asking.
    pub fn new(auto_choose: bool) -> Self {
        DmaSession { core: Core::new(auto_choose), stack: Vec::new() }
    }

    pub fn beliefs(&self) -> &BeliefSet {
        &self.core.beliefs
    }

    pub fn graph(&self) -> &LinkGraph {
        &self.core.graph
    }

    pub fn auto_choose(&self) -> bool {
        self.core.auto_choose
    }

    pub fn set_auto_choose(&mut self, on: bool) {
        self.core.auto_choose = on;
    }

    pub fn pending(&self) -> Option<PendingChoice> {
        self.core.pending_choice()
    }

    /// Processes one user input.
    pub fn input(&mut self, formula: &Formula) -> Result<EventReport, ControllerError> {
        self.core.ensure_free()?;
        let input = classify(formula)?;
        if let Some(existing) = self.core.beliefs.find_identical(formula) {
            return Err(ControllerError::DuplicateActive(existing));
        }
        match input {
            Input::Member(alpha, a) => self.member_input(formula, alpha, a)?,
            Input::Subclass(alpha, beta) => self.subclass_input(formula, alpha, beta)?,
            Input::Disjoint(alpha, beta) => self.disjoint_input(formula, alpha, beta)?,
        }
        self.run()
    }

    /// Completes a pending revision by retracting `chosen`.
    pub fn resolve_choice(&mut self, chosen: &BTreeSet<TimeStamp>) -> Result<EventReport, ControllerError> {
        let case = self.core.resolve(chosen.clone())?;
        self.cleanup(&case.retracted);
        self.run()
    }

    /// Retracts one link axiom and everything derived from it.
    pub fn remove_link(&mut self, axiom: TimeStamp) -> Result<EventReport, ControllerError> {
        let retracted = self.core.retract_axiom(axiom)?;
        self.cleanup(&retracted);
        self.run()
    }

    /// Documents that are active members of all (`And`) or any (`Or`) of
    /// the categories, sorted by name.
    pub fn members(&self, categories: &[Predicate], connective: Connective) -> BTreeSet<Const> {
        self.core.members(categories, connective)
    }

    // -----------------------------------------------------------------------
    // Inputs

    fn member_input(&mut self, f: &Formula, alpha: Predicate, a: Const) -> Result<(), ControllerError> {
        let (doc, cat) = (Node::Individual(a), Node::Class(alpha));
        if self.core.graph.would_make_existing_redundant(&doc, &cat) {
            return Err(ControllerError::WouldCreateRedundantPath(format!("({doc}, {cat})")));
        }
        let index = self.core.enter_input(f.clone())?;
        let link = Link::new(LinkKind::Element, doc.clone(), cat.clone());
        if self.core.graph.would_create_redundant_path(&doc, &cat) {
            self.core.ensure_node(doc);
            self.core.ensure_node(cat);
            self.core.steps.push(Step::LinkSkipped(link));
        } else {
            self.core.link(link);
        }
        self.stack.push(Frame::Member { index, phase: Phase::Conflicts });
        Ok(())
    }

    fn subclass_input(&mut self, f: &Formula, alpha: Predicate, beta: Predicate) -> Result<(), ControllerError> {
        let pair = Pattern::Disjointness { first: Some(alpha.clone()), second: Some(beta.clone()) };
        if let Some((d, _)) = self.core.beliefs.find_active(&pair).first() {
            return Err(ControllerError::InputContradictsBeliefs(*d));
        }
        let (a, b) = (Node::Class(alpha), Node::Class(beta));
        let shown = format!("({a}, {b})");
        if self.core.graph.would_create_redundant_path(&a, &b) {
            return Err(ControllerError::WouldCreateRedundantPath(shown));
        }
        if self.core.graph.would_create_loop(&a, &b) {
            return Err(ControllerError::WouldCreateLoop(shown));
        }
        if self.core.graph.would_make_existing_redundant(&a, &b) {
            return Err(ControllerError::WouldCreateRedundantPath(shown));
        }
        let axiom = self.core.enter_input(f.clone())?;
        self.core.link(Link::new(LinkKind::Subclass, a, b));
        self.stack.push(Frame::Subclass { axiom, after: 0 });
        Ok(())
    }

    fn disjoint_input(&mut self, f: &Formula, alpha: Predicate, beta: Predicate) -> Result<(), ControllerError> {
        let pair = Pattern::Disjointness { first: Some(alpha.clone()), second: Some(beta.clone()) };
        if let Some((d, _)) = self.core.beliefs.find_active(&pair).first() {
            return Err(ControllerError::DuplicateActive(*d));
        }
        let axiom = self.core.enter_input(f.clone())?;
        self.core.link(Link::new(LinkKind::Disjoint, Node::Class(alpha), Node::Class(beta)));
        self.stack.push(Frame::Disjoint { axiom });
        Ok(())
    }

    // -----------------------------------------------------------------------
    // The work loop

    fn run(&mut self) -> Result<EventReport, ControllerError> {
        while self.core.pending.is_none() {
            let Some(frame) = self.stack.pop() else {
                if std::mem::take(&mut self.core.resaturate) {
                    self.stack.push(Frame::Resaturate);
                    continue;
                }
                break;
            };
            match frame {
                Frame::Member { index, phase } => self.member_step(index, phase)?,
                Frame::Subclass { axiom, after } => self.subclass_step(axiom, after)?,
                Frame::Disjoint { axiom } => self.disjoint_step(axiom)?,
                Frame::Resaturate => self.resaturate_step()?,
            }
        }
        Ok(self.core.take_report())
    }

    fn member_step(&mut self, index: TimeStamp, phase: Phase) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(index) {
            return Ok(());
        }
        let (alpha, a) = membership(&self.core.beliefs, index);
        match phase {
            Phase::Conflicts => {
                self.stack.push(Frame::Member { index, phase: Phase::Conflicts });
                match self.find_conflict(index, &alpha, &a) {
                    Some((other, axiom)) => self.conflict(axiom, index, other),
                    None => {
                        self.stack.pop();
                        self.stack.push(Frame::Member { index, phase: Phase::Cascade { after: 0 } });
                        Ok(())
                    }
                }
            }
            Phase::Cascade { after } => {
                let next = self
                    .core
                    .beliefs
                    .next_active(&Pattern::implications_from(&alpha, Some(false)), after)
                    .map(|e| e.index());
                if let Some(axiom) = next {
                    self.stack.push(Frame::Member { index, phase: Phase::Cascade { after: axiom } });
                    self.syllogism(axiom, index)?;
                }
                Ok(())
            }
        }
    }

    fn subclass_step(&mut self, axiom: TimeStamp, after: TimeStamp) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(axiom) {
            return Ok(());
        }
        let Shape::UniversalImplication { antecedent, .. } = self.shape(axiom) else { return Ok(()) };
        let next = self.core.beliefs.next_active(&Pattern::atoms_of(&antecedent), after).map(|e| e.index());
        if let Some(member) = next {
            self.stack.push(Frame::Subclass { axiom, after: member });
            self.syllogism(axiom, member)?;
        }
        Ok(())
    }

    fn disjoint_step(&mut self, axiom: TimeStamp) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(axiom) {
            return Ok(());
        }
        let Shape::Disjointness { left, right, .. } = self.shape(axiom) else { return Ok(()) };
        let hit = self.core.beliefs.find_active(&Pattern::atoms_of(&left)).into_iter().find_map(|(i, f)| {
            let Shape::GroundLiteral { constant, .. } = Shape::of(f) else { return None };
            self.core.beliefs.find_identical(&ground(&right, &constant)).map(|j| (i, j))
        });
        if let Some((i, j)) = hit {
            self.stack.push(Frame::Disjoint { axiom });
            self.conflict(axiom, i, j)?;
        }
        Ok(())
    }

    fn resaturate_step(&mut self) -> Result<(), ControllerError> {
        let missing = self.core.beliefs.active().find_map(|e| {
            let Shape::GroundLiteral { predicate, constant, negated: false, .. } = e.shape() else { return None };
            self.core
                .beliefs
                .find_active(&Pattern::implications_from(predicate, Some(false)))
                .into_iter()
                .find(|(_, f)| {
                    let Shape::UniversalImplication { consequent, .. } = Shape::of(f) else { return false };
                    self.core.beliefs.find_identical(&ground(&consequent, constant)).is_none()
                })
                .map(|(axiom, _)| (axiom, e.index()))
        });
        if let Some((axiom, member)) = missing {
            self.stack.push(Frame::Resaturate);
            self.syllogism(axiom, member)?;
        }
        Ok(())
    }

    /// Aristotelian syllogism on a subclass axiom and a membership; a new
    /// conclusion is entered and pushed for processing.
    fn syllogism(&mut self, axiom: TimeStamp, member: TimeStamp) -> Result<(), ControllerError> {
        let conclusion = self.core.conclude(Rule::AristotelianSyllogism, &[axiom, member])?;
        if let Some(index) = self.core.enter_derived(conclusion, Rule::AristotelianSyllogism, vec![member, axiom])? {
            self.stack.push(Frame::Member { index, phase: Phase::Conflicts });
        }
        Ok(())
    }

    /// The first active disjointness axiom and opposing membership that
    /// conflict with the membership at `index`.
    fn find_conflict(&self, index: TimeStamp, alpha: &Predicate, a: &Const) -> Option<(TimeStamp, TimeStamp)> {
        let _ = index;
        self.core.beliefs.find_active(&Pattern::disjointness_involving(alpha)).into_iter().find_map(|(d, f)| {
            let Shape::Disjointness { left, right, .. } = Shape::of(f) else { return None };
            let other = if &left == alpha { right } else { left };
            self.core.beliefs.find_identical(&ground(&other, a)).map(|j| (j, d))
        })
    }

    /// Conflict detection over `axiom` and two memberships, followed by
    /// revision. The from-list lists the triggering membership first.
    fn conflict(&mut self, axiom: TimeStamp, trigger: TimeStamp, other: TimeStamp) -> Result<(), ControllerError> {
        let Shape::Disjointness { left, .. } = self.shape(axiom) else { return Ok(()) };
        let (trigger_pred, _) = membership(&self.core.beliefs, trigger);
        let kernel = if trigger_pred == left { [axiom, trigger, other] } else { [axiom, other, trigger] };
        match self.core.contradiction(Rule::ConflictDetection, &kernel, vec![trigger, other, axiom])? {
            Revision::Done(case) => self.cleanup(&case.retracted),
            Revision::Suspended => {}
        }
        Ok(())
    }

    /// Removes the links of retracted axioms, and nodes left hanging.
    fn cleanup(&mut self, retracted: &BTreeSet<TimeStamp>) {
        for i in retracted {
            let Some(e) = self.core.beliefs.entry(*i) else { continue };
            if !e.is_axiom() {
                continue;
            }
            match e.shape().clone() {
                Shape::GroundLiteral { predicate, constant, negated: false, .. } => {
                    let (doc, cat) = (Node::Individual(constant), Node::Class(predicate));
                    if self.core.unlink(&Link::new(LinkKind::Element, doc.clone(), cat.clone())) {
                        self.core.prune(&doc, &cat);
                    }
                }
                Shape::UniversalImplication { antecedent, consequent, negated: false, .. } => {
                    let (a, b) = (Node::Class(antecedent), Node::Class(consequent));
                    if self.core.unlink(&Link::new(LinkKind::Subclass, a.clone(), b.clone())) {
                        self.core.prune(&a, &b);
                    }
                }
                Shape::Disjointness { left, right, .. } => {
                    self.core.unlink(&Link::new(LinkKind::Disjoint, Node::Class(left), Node::Class(right)));
                }
                _ => {}
            }
        }
    }

    fn shape(&self, index: TimeStamp) -> Shape {
        self.core.beliefs.entry(index).map(|e| e.shape().clone()).unwrap_or(Shape::Other)
    }
}

fn membership(bs: &BeliefSet, index: TimeStamp) -> (Predicate, Const) {
    match bs.entry(index).map(|e| e.shape()) {
        Some(Shape::GroundLiteral { predicate, constant, .. }) => (predicate.clone(), constant.clone()),
        _ => unreachable!("entry {index} is not a membership"),
    }
}

fn ground(p: &Predicate, c: &Const) -> Formula {
    Formula::atom(p.clone(), vec![Term::Const(c.clone())]).expect("unary predicate")
}

fn classify(f: &Formula) -> Result<Input, ControllerError> {
    let plain = |p: &Predicate| p.predicate_kind() == PredicateKind::Plain;
    let bad = |why: &str| Err(ControllerError::MalformedInput(why.to_string()));
    match Shape::of(f) {
        Shape::GroundLiteral { predicate, constant, negated: false, occurrence: None } if plain(&predicate) => {
            Ok(Input::Member(predicate, constant))
        }
        Shape::UniversalImplication { antecedent, consequent, negated: false, occurrence: None, .. }
            if plain(&antecedent) && plain(&consequent) =>
        {
            if antecedent == consequent {
                return bad("a category cannot be declared a subclass of itself");
            }
            Ok(Input::Subclass(antecedent, consequent))
        }
        Shape::Disjointness { left, right, .. } if plain(&left) && plain(&right) => {
            if left == right {
                return bad("a category cannot be disjoint from itself");
            }
            Ok(Input::Disjoint(left, right))
        }
        _ => bad("expected α(a), ∀x(α(x)→β(x)) or ∀x¬(α(x)∧β(x)) over unary categories"),
    }
}
