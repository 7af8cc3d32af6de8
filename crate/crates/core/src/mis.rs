//! Multiple inheritance with exceptions.
//!
//! Kinds (`α^k`) form a hierarchy over objects; properties (`β^p`) are
//! attached to kinds through numbered occurrences. An object inherits a
//! property literal unless a more specific opposite occurrence on its path
//! overrides it. Incomparable opposite occurrences both fire and the
//! resulting contradiction goes to belief revision.

use std::collections::{BTreeMap, BTreeSet};

use crate::belief::BeliefSet;
pub use crate::controller::Connective;
use crate::controller::{ControllerError, Core, EventReport, PendingChoice, Revision, Step};
use crate::graph::{Link, LinkGraph, LinkKind, Node, PropertyNode};
use crate::logic::{Atom, Const, Formula, Pattern, Predicate, PredicateKind, Rule, Shape, Term, TimeStamp, Var};

/// A position in the hierarchy: the child numbers along a path from a root.
pub type Address = Vec<u32>;

/// Every address of every node reachable from a root. Roots are numbered in
/// node-creation order, children in link-creation order.
pub fn compute_addresses(graph: &LinkGraph) -> BTreeMap<Node, BTreeSet<Address>> {
    let roots = graph.nodes().filter(|n| matches!(n, Node::Class(_)) && graph.parents(n).next().is_none());
    let mut out: BTreeMap<Node, BTreeSet<Address>> = BTreeMap::new();
    let mut stack: Vec<(Node, Address)> = Vec::new();
    for (i, r) in roots.enumerate() {
        stack.push((r.clone(), vec![i as u32 + 1]));
    }
    while let Some((n, addr)) = stack.pop() {
        for (i, c) in graph.children(&n).enumerate() {
            let mut a = addr.clone();
            a.push(i as u32 + 1);
            stack.push((c.clone(), a));
        }
        out.entry(n).or_default().insert(addr);
    }
    out
}

/// Some address of `a` extends some address of `b`: `a` lies strictly below
/// `b` on a common path.
fn strictly_below(addresses: &BTreeMap<Node, BTreeSet<Address>>, a: &Node, b: &Node) -> bool {
    let (Some(xs), Some(ys)) = (addresses.get(a), addresses.get(b)) else { return false };
    xs.iter().any(|x| ys.iter().any(|y| y.len() < x.len() && x.starts_with(y)))
}

/// An occurrence of a property together with the kind it is attached to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub kind: Predicate,
    pub node: PropertyNode,
}

/// Occurrences of `property` (either polarity) attached to kinds above
/// `object`.
fn occurrences_for(graph: &LinkGraph, property: &Predicate, object: &Const) -> Vec<Occurrence> {
    let above = graph.ancestors(&Node::Individual(object.clone()));
    graph
        .links_of(LinkKind::HasProperty)
        .filter_map(|l| match (&l.from, &l.to) {
            (Node::Class(k), Node::Property(p)) if &p.predicate == property && above.contains(&l.from) => {
                Some(Occurrence { kind: k.clone(), node: p.clone() })
            }
            _ => None,
        })
        .collect()
}

/// The most specific occurrence of `property` relative to `object`, and
/// whether it is strictly more specific than every other occurrence.
/// Among several maximal occurrences the one with the greatest address wins.
pub fn most_specific_occurrence(
    graph: &LinkGraph,
    property: &Predicate,
    object: &Const,
) -> Option<(PropertyNode, bool)> {
    let occs = occurrences_for(graph, property, object);
    let addresses = compute_addresses(graph);
    let below = |a: &Occurrence, b: &Occurrence| {
        strictly_below(&addresses, &Node::Class(a.kind.clone()), &Node::Class(b.kind.clone()))
    };
    let best = occs.iter().filter(|o| !occs.iter().any(|p| below(p, o))).max_by_key(|o| {
        (addresses.get(&Node::Class(o.kind.clone())).and_then(|s| s.last().cloned()), o.node.occurrence)
    })?;
    let dominates = occs.iter().all(|o| o == best || below(best, o));
    Some((best.node.clone(), dominates))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    /// A kind membership just entered: chain through subkinds, then
    /// positive and negative properties.
    Kind {
        index: TimeStamp,
        phase: Phase,
    },
    /// A property literal just entered: look for its opposite.
    Literal {
        index: TimeStamp,
    },
    Subkind {
        axiom: TimeStamp,
        after: TimeStamp,
    },
    Property {
        axiom: TimeStamp,
        after: TimeStamp,
    },
    Resaturate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Subkinds { after: TimeStamp },
    Positive { after: TimeStamp },
    Negative { after: TimeStamp },
}

enum Input {
    Member(Predicate, Const),
    Subkind(Predicate, Predicate),
    Property { kind: Predicate, property: Predicate, negated: bool, var: Var },
}

#[derive(Debug, Clone)]
pub struct MisSession {
    core: Core,
    stack: Vec<Frame>,
    occurrences: BTreeMap<Predicate, u32>,
}

impl Default for MisSession {
    fn default() -> Self {
        Self::new(false)
    }
}

impl MisSession {
    pub fn new(auto_choose: bool) -> Self {
        MisSession { core: Core::new(auto_choose), stack: Vec::new(), occurrences: BTreeMap::new() }
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

    pub fn addresses(&self) -> BTreeMap<Node, BTreeSet<Address>> {
        compute_addresses(&self.core.graph)
    }

    pub fn most_specific_occurrence(&self, property: &Predicate, object: &Const) -> Option<(PropertyNode, bool)> {
        most_specific_occurrence(&self.core.graph, property, object)
    }

    pub fn input(&mut self, formula: &Formula) -> Result<EventReport, ControllerError> {
        self.core.ensure_free()?;
        let input = classify(formula)?;
        if let Some(existing) = self.core.beliefs.find_identical(formula) {
            return Err(ControllerError::DuplicateActive(existing));
        }
        match input {
            Input::Member(alpha, a) => self.member_input(formula, alpha, a)?,
            Input::Subkind(alpha, beta) => self.subkind_input(formula, alpha, beta)?,
            Input::Property { kind, property, negated, var } => self.property_input(kind, property, negated, var)?,
        }
        self.run()
    }

    pub fn resolve_choice(&mut self, chosen: &BTreeSet<TimeStamp>) -> Result<EventReport, ControllerError> {
        let case = self.core.resolve(chosen.clone())?;
        self.cleanup(&case.retracted);
        self.run()
    }

    /// Retracts one axiom and everything derived from it.
    pub fn remove_link(&mut self, axiom: TimeStamp) -> Result<EventReport, ControllerError> {
        let retracted = self.core.retract_axiom(axiom)?;
        self.cleanup(&retracted);
        self.run()
    }

    /// Objects with an active positive literal for all (`And`) or any
    /// (`Or`) of the predicates, sorted by name.
    pub fn members(&self, predicates: &[Predicate], connective: Connective) -> BTreeSet<Const> {
        self.core.members(predicates, connective)
    }

    // -----------------------------------------------------------------------
    // Inputs

    fn member_input(&mut self, f: &Formula, alpha: Predicate, a: Const) -> Result<(), ControllerError> {
        let (obj, kind) = (Node::Individual(a), Node::Class(alpha));
        if self.core.graph.would_make_existing_redundant(&obj, &kind) {
            return Err(ControllerError::WouldCreateRedundantPath(format!("({obj}, {kind})")));
        }
        let index = self.core.enter_input(f.clone())?;
        let link = Link::new(LinkKind::ObjectKind, obj.clone(), kind.clone());
        if self.core.graph.would_create_redundant_path(&obj, &kind) {
            self.core.ensure_node(obj);
            self.core.ensure_node(kind);
            self.core.steps.push(Step::LinkSkipped(link));
        } else {
            self.core.link(link);
        }
        self.stack.push(Frame::Kind { index, phase: Phase::Subkinds { after: 0 } });
        Ok(())
    }

    fn subkind_input(&mut self, f: &Formula, alpha: Predicate, beta: Predicate) -> Result<(), ControllerError> {
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
        self.core.link(Link::new(LinkKind::Subkind, a, b));
        self.stack.push(Frame::Subkind { axiom, after: 0 });
        Ok(())
    }

    fn property_input(
        &mut self,
        kind: Predicate,
        property: Predicate,
        negated: bool,
        x: Var,
    ) -> Result<(), ControllerError> {
        let counter = self.occurrences.entry(property.clone()).or_insert(0);
        *counter += 1;
        let n = *counter;
        let var = Term::Var(x.clone());
        let head = Formula::Atom(Atom::new(property.clone(), vec![var.clone()])?.with_occurrence(n)?);
        let head = if negated { Formula::not(head) } else { head };
        let f = Formula::forall(x, Formula::implies(Formula::atom(kind.clone(), vec![var])?, head));
        let axiom = self.core.enter_input(f)?;
        let node = Node::Property(PropertyNode { predicate: property, negated, occurrence: n });
        self.core.link(Link::new(LinkKind::HasProperty, Node::Class(kind), node));
        self.stack.push(Frame::Property { axiom, after: 0 });
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
                Frame::Kind { index, phase } => self.kind_step(index, phase)?,
                Frame::Literal { index } => self.literal_step(index)?,
                Frame::Subkind { axiom, after } => self.axiom_step(axiom, after, true)?,
                Frame::Property { axiom, after } => self.axiom_step(axiom, after, false)?,
                Frame::Resaturate => self.resaturate_step()?,
            }
        }
        Ok(self.core.take_report())
    }

    fn kind_step(&mut self, index: TimeStamp, phase: Phase) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(index) {
            return Ok(());
        }
        let (alpha, _) = literal(&self.core.beliefs, index);
        let (after, wanted) = match phase {
            Phase::Subkinds { after } => (after, Wanted::Kind),
            Phase::Positive { after } => (after, Wanted::Property(false)),
            Phase::Negative { after } => (after, Wanted::Property(true)),
        };
        match self.next_implication(&alpha, after, wanted) {
            Some(axiom) => {
                let phase = match phase {
                    Phase::Subkinds { .. } => Phase::Subkinds { after: axiom },
                    Phase::Positive { .. } => Phase::Positive { after: axiom },
                    Phase::Negative { .. } => Phase::Negative { after: axiom },
                };
                self.stack.push(Frame::Kind { index, phase });
                self.syllogism(axiom, index)?;
            }
            None => match phase {
                Phase::Subkinds { .. } => self.stack.push(Frame::Kind { index, phase: Phase::Positive { after: 0 } }),
                Phase::Positive { .. } => self.stack.push(Frame::Kind { index, phase: Phase::Negative { after: 0 } }),
                Phase::Negative { .. } => {}
            },
        }
        Ok(())
    }

    /// Applies a newly entered subkind or property axiom to the active
    /// members of its antecedent.
    fn axiom_step(&mut self, axiom: TimeStamp, after: TimeStamp, subkind: bool) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(axiom) {
            return Ok(());
        }
        let Shape::UniversalImplication { antecedent, .. } = self.shape(axiom) else { return Ok(()) };
        let next = self.core.beliefs.next_active(&Pattern::atoms_of(&antecedent), after).map(|e| e.index());
        if let Some(member) = next {
            self.stack.push(if subkind {
                Frame::Subkind { axiom, after: member }
            } else {
                Frame::Property { axiom, after: member }
            });
            self.syllogism(axiom, member)?;
        }
        Ok(())
    }

    fn literal_step(&mut self, index: TimeStamp) -> Result<(), ControllerError> {
        if !self.core.beliefs.is_active(index) {
            return Ok(());
        }
        let Shape::GroundLiteral { predicate, constant, negated, .. } = self.shape(index) else { return Ok(()) };
        let opposite =
            Pattern::GroundLiteral { predicate: Some(predicate), constant: Some(constant), negated: Some(!negated) };
        if let Some((other, _)) = self.core.beliefs.find_active(&opposite).first().copied() {
            self.stack.push(Frame::Literal { index });
            match self.core.contradiction(Rule::ContradictionDetection, &[index, other], vec![index, other])? {
                Revision::Done(case) => self.cleanup(&case.retracted),
                Revision::Suspended => {}
            }
        }
        Ok(())
    }

    fn resaturate_step(&mut self) -> Result<(), ControllerError> {
        let mut found = None;
        'search: for e in self.core.beliefs.active() {
            let Shape::GroundLiteral { predicate, constant, negated: false, .. } = e.shape() else { continue };
            if predicate.predicate_kind() != PredicateKind::Kind {
                continue;
            }
            for (axiom, f) in self.core.beliefs.find_active(&Pattern::implications_from(predicate, None)) {
                let Shape::UniversalImplication { consequent, negated, occurrence, .. } = Shape::of(f) else {
                    continue;
                };
                let conclusion = ground(&consequent, constant, negated, occurrence);
                if self.core.beliefs.find_identical(&conclusion).is_some() {
                    continue;
                }
                if consequent.predicate_kind() == PredicateKind::Property
                    && self.blocker(predicate, &consequent, negated, constant).is_some()
                {
                    continue;
                }
                found = Some((axiom, e.index()));
                break 'search;
            }
        }
        if let Some((axiom, member)) = found {
            self.stack.push(Frame::Resaturate);
            self.syllogism(axiom, member)?;
        }
        Ok(())
    }

    /// Aristotelian syllogism on an axiom and a kind membership. Property
    /// conclusions are first checked against more specific occurrences.
    fn syllogism(&mut self, axiom: TimeStamp, member: TimeStamp) -> Result<(), ControllerError> {
        let conclusion = self.core.conclude(Rule::AristotelianSyllogism, &[axiom, member])?;
        let Shape::UniversalImplication { antecedent, consequent, negated, .. } = self.shape(axiom) else {
            return Ok(());
        };
        let property = consequent.predicate_kind() == PredicateKind::Property;
        if property {
            let (_, object) = literal(&self.core.beliefs, member);
            if let Some(by) = self.blocker(&antecedent, &consequent, negated, &object) {
                let at = self.core.beliefs.advance();
                self.core.steps.push(Step::Blocked { at, formula: conclusion, by });
                return Ok(());
            }
        }
        if let Some(index) = self.core.enter_derived(conclusion, Rule::AristotelianSyllogism, vec![member, axiom])? {
            self.stack.push(if property {
                Frame::Literal { index }
            } else {
                Frame::Kind { index, phase: Phase::Subkinds { after: 0 } }
            });
        }
        Ok(())
    }

    /// An opposite occurrence above `object` strictly more specific than the
    /// occurrence attached to `kind`.
    fn blocker(&self, kind: &Predicate, property: &Predicate, negated: bool, object: &Const) -> Option<PropertyNode> {
        let addresses = compute_addresses(&self.core.graph);
        let deriving = Node::Class(kind.clone());
        occurrences_for(&self.core.graph, property, object)
            .into_iter()
            .find(|o| o.node.negated != negated && strictly_below(&addresses, &Node::Class(o.kind.clone()), &deriving))
            .map(|o| o.node)
    }

    fn next_implication(&self, alpha: &Predicate, after: TimeStamp, wanted: Wanted) -> Option<TimeStamp> {
        let pattern = Pattern::implications_from(alpha, None);
        let mut from = after;
        while let Some(e) = self.core.beliefs.next_active(&pattern, from) {
            from = e.index();
            if let Shape::UniversalImplication { consequent, negated, .. } = e.shape() {
                let ok = match wanted {
                    Wanted::Kind => consequent.predicate_kind() == PredicateKind::Kind,
                    Wanted::Property(n) => consequent.predicate_kind() == PredicateKind::Property && *negated == n,
                };
                if ok {
                    return Some(from);
                }
            }
        }
        None
    }

    fn cleanup(&mut self, retracted: &BTreeSet<TimeStamp>) {
        for i in retracted {
            let Some(e) = self.core.beliefs.entry(*i) else { continue };
            if !e.is_axiom() {
                continue;
            }
            match e.shape().clone() {
                Shape::GroundLiteral { predicate, constant, negated: false, .. } => {
                    let (obj, kind) = (Node::Individual(constant), Node::Class(predicate));
                    if self.core.unlink(&Link::new(LinkKind::ObjectKind, obj.clone(), kind.clone())) {
                        self.core.prune(&obj, &kind);
                    }
                }
                Shape::UniversalImplication { antecedent, consequent, negated, occurrence, .. } => {
                    let from = Node::Class(antecedent);
                    match occurrence {
                        Some(n) => {
                            let node = Node::Property(PropertyNode { predicate: consequent, negated, occurrence: n });
                            self.core.unlink(&Link::new(LinkKind::HasProperty, from, node.clone()));
                            self.core.drop_node(&node);
                        }
                        None => {
                            let to = Node::Class(consequent);
                            if self.core.unlink(&Link::new(LinkKind::Subkind, from.clone(), to.clone())) {
                                self.core.prune(&from, &to);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }

    fn shape(&self, index: TimeStamp) -> Shape {
        self.core.beliefs.entry(index).map(|e| e.shape().clone()).unwrap_or(Shape::Other)
    }
}

#[derive(Debug, Clone, Copy)]
enum Wanted {
    Kind,
    Property(bool),
}

fn literal(bs: &BeliefSet, index: TimeStamp) -> (Predicate, Const) {
    match bs.entry(index).map(|e| e.shape()) {
        Some(Shape::GroundLiteral { predicate, constant, .. }) => (predicate.clone(), constant.clone()),
        _ => unreachable!("entry {index} is not a ground literal"),
    }
}

fn ground(p: &Predicate, c: &Const, negated: bool, occurrence: Option<u32>) -> Formula {
    let atom = Atom::new(p.clone(), vec![Term::Const(c.clone())]).expect("unary predicate");
    let atom = match occurrence {
        Some(n) => atom.with_occurrence(n).expect("property predicate"),
        None => atom,
    };
    if negated {
        Formula::not(Formula::Atom(atom))
    } else {
        Formula::Atom(atom)
    }
}

fn classify(f: &Formula) -> Result<Input, ControllerError> {
    let kind = |p: &Predicate| p.predicate_kind() == PredicateKind::Kind;
    let bad = |why: &str| Err(ControllerError::MalformedInput(why.to_string()));
    match Shape::of(f) {
        Shape::GroundLiteral { predicate, constant, negated: false, .. } if kind(&predicate) => {
            Ok(Input::Member(predicate, constant))
        }
        Shape::UniversalImplication { var, antecedent, consequent, negated, .. } if kind(&antecedent) => {
            match consequent.predicate_kind() {
                PredicateKind::Kind if !negated => {
                    if antecedent == consequent {
                        return bad("a kind cannot be declared a subkind of itself");
                    }
                    Ok(Input::Subkind(antecedent, consequent))
                }
                PredicateKind::Property => Ok(Input::Property { kind: antecedent, property: consequent, negated, var }),
                _ => bad("a kind implies a kind or a property literal"),
            }
        }
        _ => bad("expected α^k(a), ∀x(α^k(x)→β^k(x)) or ∀x(α^k(x)→[¬]β^p(x))"),
    }
}
