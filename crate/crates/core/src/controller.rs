//! Pieces shared by the two controllers: step traces, errors, and the
//! belief-set/graph bookkeeping both of them perform.

use std::collections::BTreeSet;

use crate::belief::{BeliefError, BeliefSet, Category, Origin, DEFAULT_ENTRENCHMENT};
use crate::graph::{Link, LinkGraph, Node, PropertyNode};
use crate::logic::{apply_derived, Const, Formula, KernelError, Pattern, Predicate, Rule, Shape, Symbol, TimeStamp};
use crate::revision::{
    complete_dbr, culprit_details, forward_retract, run_dbr, AutoChooser, Culprit, DbrOutcome, InteractiveChooser,
    RevisionCase, RevisionError,
};

/// How members of several categories are combined in a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

/// One observable thing a controller did.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    SymbolsAdded(Vec<Symbol>),
    Entered {
        index: TimeStamp,
        formula: Formula,
        origin: Origin,
    },
    /// A derived formula was already active and was not entered again.
    DuplicateIgnored {
        formula: Formula,
        existing: TimeStamp,
    },
    /// An inheritance was overridden by a more specific opposite occurrence.
    Blocked {
        at: TimeStamp,
        formula: Formula,
        by: PropertyNode,
    },
    LinkAdded(Link),
    /// The formula was entered but its link would have been redundant.
    LinkSkipped(Link),
    LinkRemoved(Link),
    NodeAdded(Node),
    NodeRemoved(Node),
    ChoiceRequested {
        contradiction: TimeStamp,
        culprits: Vec<TimeStamp>,
    },
    Revised {
        at: TimeStamp,
        contradiction: TimeStamp,
        chosen: Vec<TimeStamp>,
        retracted: Vec<TimeStamp>,
    },
    /// A user-requested retraction of one axiom.
    Retracted {
        at: TimeStamp,
        axiom: TimeStamp,
        retracted: Vec<TimeStamp>,
    },
}

/// A revision waiting for someone to pick culprits.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingChoice {
    pub contradiction: TimeStamp,
    pub culprits: Vec<Culprit>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Completed,
    AwaitingChoice(PendingChoice),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventReport {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

impl EventReport {
    /// Indexes of every formula entered during the event.
    pub fn entered(&self) -> Vec<TimeStamp> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Entered { index, .. } => Some(*index),
                _ => None,
            })
            .collect()
    }

    pub fn is_pending(&self) -> bool {
        matches!(self.outcome, Outcome::AwaitingChoice(_))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControllerError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("formula is already active at index {0}")]
    DuplicateActive(TimeStamp),
    #[error("input contradicts active axiom {0}")]
    InputContradictsBeliefs(TimeStamp),
    #[error("link {0} would make the graph redundant")]
    WouldCreateRedundantPath(String),
    #[error("link {0} would create a loop")]
    WouldCreateLoop(String),
    #[error("a revision choice is pending")]
    ChoicePending,
    #[error("no revision choice is pending")]
    NotPending,
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
    #[error("no entry with index {0}")]
    UnknownIndex(TimeStamp),
    #[error("entry {0} is not an active axiom of link shape")]
    NotAnAxiom(TimeStamp),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Belief(BeliefError),
    #[error(transparent)]
    Revision(RevisionError),
}

impl From<BeliefError> for ControllerError {
    fn from(e: BeliefError) -> Self {
        match e {
            BeliefError::DuplicateActive(i) => ControllerError::DuplicateActive(i),
            BeliefError::UnknownIndex(i) => ControllerError::UnknownIndex(i),
            other => ControllerError::Belief(other),
        }
    }
}

impl From<RevisionError> for ControllerError {
    fn from(e: RevisionError) -> Self {
        match e {
            RevisionError::ChooserReturnedEmpty => ControllerError::InvalidChoice("no axiom chosen".into()),
            RevisionError::InvalidChoice(v) => ControllerError::InvalidChoice(format!("{v:?} are not all culprits")),
            other => ControllerError::Revision(other),
        }
    }
}

impl ControllerError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ControllerError::MalformedInput(_) => "MalformedInput",
            ControllerError::DuplicateActive(_) => "DuplicateActive",
            ControllerError::InputContradictsBeliefs(_) => "InputContradictsBeliefs",
            ControllerError::WouldCreateRedundantPath(_) => "WouldCreateRedundantPath",
            ControllerError::WouldCreateLoop(_) => "WouldCreateLoop",
            ControllerError::ChoicePending => "SessionBusy",
            ControllerError::NotPending => "NotPending",
            ControllerError::InvalidChoice(_) => "InvalidChoice",
            ControllerError::UnknownIndex(_) => "UnknownIndex",
            ControllerError::NotAnAxiom(_) => "NotAnAxiom",
            ControllerError::Kernel(_) => "KernelError",
            ControllerError::Belief(_) => "BeliefError",
            ControllerError::Revision(RevisionError::ContradictionStillDerivable(_)) => "ContradictionStillDerivable",
            ControllerError::Revision(_) => "RevisionError",
        }
    }
}

/// What starting a revision led to.
pub(crate) enum Revision {
    Done(RevisionCase),
    Suspended,
}

/// Belief set, graph and run state common to both controllers.
#[derive(Debug, Clone)]
pub(crate) struct Core {
    pub beliefs: BeliefSet,
    pub graph: LinkGraph,
    pub auto_choose: bool,
    pub pending: Option<RevisionCase>,
    /// Set after a retraction: lost alternative derivations must be redone.
    pub resaturate: bool,
    pub steps: Vec<Step>,
}

impl Core {
    pub fn new(auto_choose: bool) -> Self {
        Core {
            beliefs: BeliefSet::new(),
            graph: LinkGraph::new(),
            auto_choose,
            pending: None,
            resaturate: false,
            steps: Vec::new(),
        }
    }

    pub fn ensure_free(&self) -> Result<(), ControllerError> {
        if self.pending.is_some() {
            Err(ControllerError::ChoicePending)
        } else {
            Ok(())
        }
    }

    /// Enters a user input.
    pub fn enter_input(&mut self, formula: Formula) -> Result<TimeStamp, ControllerError> {
        let new = self.beliefs.new_symbols(&formula);
        let index =
            self.beliefs.enter(formula.clone(), Origin::human(), DEFAULT_ENTRENCHMENT, Category::APosteriori)?;
        if !new.is_empty() {
            self.steps.push(Step::SymbolsAdded(new));
        }
        self.steps.push(Step::Entered { index, formula, origin: Origin::human() });
        Ok(index)
    }

    /// Enters a rule conclusion unless it is already active.
    pub fn enter_derived(
        &mut self,
        formula: Formula,
        rule: Rule,
        premises: Vec<TimeStamp>,
    ) -> Result<Option<TimeStamp>, ControllerError> {
        if let Some(existing) = self.beliefs.find_identical(&formula) {
            self.steps.push(Step::DuplicateIgnored { formula, existing });
            return Ok(None);
        }
        let category = self.beliefs.derived_category(&premises);
        let origin = Origin::derived(rule, premises);
        let index = self.beliefs.enter(formula.clone(), origin.clone(), DEFAULT_ENTRENCHMENT, category)?;
        self.steps.push(Step::Entered { index, formula, origin });
        Ok(Some(index))
    }

    /// Applies `rule` to the formulas at `premises` (in kernel order).
    pub fn conclude(&self, rule: Rule, premises: &[TimeStamp]) -> Result<Formula, ControllerError> {
        let formulas: Vec<Formula> = premises
            .iter()
            .map(|i| self.beliefs.entry(*i).map(|e| e.formula().clone()).ok_or(ControllerError::UnknownIndex(*i)))
            .collect::<Result<_, _>>()?;
        let mut out = apply_derived(rule, &formulas)?;
        Ok(out.remove(0))
    }

    /// Enters the contradiction derived by `rule` and starts a revision.
    /// `kernel_order` feeds the kernel; `recorded` is the from-list.
    pub fn contradiction(
        &mut self,
        rule: Rule,
        kernel_order: &[TimeStamp],
        recorded: Vec<TimeStamp>,
    ) -> Result<Revision, ControllerError> {
        let bottom = self.conclude(rule, kernel_order)?;
        let category = self.beliefs.derived_category(&recorded);
        let origin = Origin::derived(rule, recorded);
        let index = self.beliefs.enter(bottom.clone(), origin.clone(), DEFAULT_ENTRENCHMENT, category)?;
        self.steps.push(Step::Entered { index, formula: bottom, origin });
        let outcome = if self.auto_choose {
            run_dbr(&mut self.beliefs, index, &mut AutoChooser)?
        } else {
            run_dbr(&mut self.beliefs, index, &mut InteractiveChooser)?
        };
        match outcome {
            DbrOutcome::Completed(case) => {
                self.record_revision(&case);
                Ok(Revision::Done(case))
            }
            DbrOutcome::Deferred(case) => {
                self.steps.push(Step::ChoiceRequested {
                    contradiction: case.contradiction,
                    culprits: case.culprits.iter().copied().collect(),
                });
                self.pending = Some(case);
                Ok(Revision::Suspended)
            }
        }
    }

    /// Finishes the pending revision with the user's choice.
    pub fn resolve(&mut self, chosen: BTreeSet<TimeStamp>) -> Result<RevisionCase, ControllerError> {
        let case = self.pending.clone().ok_or(ControllerError::NotPending)?;
        let case = complete_dbr(&mut self.beliefs, case, chosen)?;
        self.pending = None;
        self.record_revision(&case);
        Ok(case)
    }

    fn record_revision(&mut self, case: &RevisionCase) {
        self.resaturate = true;
        self.steps.push(Step::Revised {
            at: self.beliefs.clock(),
            contradiction: case.contradiction,
            chosen: case.chosen.iter().copied().collect(),
            retracted: case.retracted.iter().copied().collect(),
        });
    }

    pub fn pending_choice(&self) -> Option<PendingChoice> {
        self.pending.as_ref().map(|c| PendingChoice {
            contradiction: c.contradiction,
            culprits: culprit_details(&self.beliefs, &c.culprits),
        })
    }

    pub fn take_report(&mut self) -> EventReport {
        let outcome = match self.pending_choice() {
            Some(p) => Outcome::AwaitingChoice(p),
            None => Outcome::Completed,
        };
        EventReport { steps: std::mem::take(&mut self.steps), outcome }
    }

    pub fn ensure_node(&mut self, n: Node) {
        if self.graph.add_node(n.clone()) {
            self.steps.push(Step::NodeAdded(n));
        }
    }

    pub fn link(&mut self, l: Link) {
        self.ensure_node(l.from.clone());
        self.ensure_node(l.to.clone());
        if self.graph.add_link(l.clone()) {
            self.steps.push(Step::LinkAdded(l));
        }
    }

    pub fn unlink(&mut self, l: &Link) -> bool {
        let removed = self.graph.remove_link(l);
        if removed {
            self.steps.push(Step::LinkRemoved(l.clone()));
        }
        removed
    }

    pub fn drop_node(&mut self, n: &Node) {
        if self.graph.remove_node(n) {
            self.steps.push(Step::NodeRemoved(n.clone()));
        }
    }

    /// User retraction of one active axiom of a shape that owns a link.
    pub fn retract_axiom(&mut self, axiom: TimeStamp) -> Result<BTreeSet<TimeStamp>, ControllerError> {
        self.ensure_free()?;
        let entry = self.beliefs.entry(axiom).ok_or(ControllerError::UnknownIndex(axiom))?;
        let link_shaped = matches!(
            entry.shape(),
            Shape::GroundLiteral { negated: false, .. }
                | Shape::UniversalImplication { .. }
                | Shape::Disjointness { .. }
        );
        if !entry.is_axiom() || !entry.is_active() || !link_shaped {
            return Err(ControllerError::NotAnAxiom(axiom));
        }
        let retracted = forward_retract(&mut self.beliefs, &BTreeSet::from([axiom]))?;
        let at = self.beliefs.advance();
        self.steps.push(Step::Retracted { at, axiom, retracted: retracted.iter().copied().collect() });
        self.resaturate = true;
        Ok(retracted)
    }

    /// Constants with an active positive literal for all (`And`) or any
    /// (`Or`) of the predicates.
    pub fn members(&self, predicates: &[Predicate], connective: Connective) -> BTreeSet<Const> {
        let sets = predicates.iter().map(|p| {
            self.beliefs
                .find_active(&Pattern::atoms_of(p))
                .into_iter()
                .filter_map(|(_, f)| match Shape::of(f) {
                    Shape::GroundLiteral { constant, .. } => Some(constant),
                    _ => None,
                })
                .collect::<BTreeSet<Const>>()
        });
        sets.reduce(|acc, s| match connective {
            Connective::And => acc.intersection(&s).cloned().collect(),
            Connective::Or => acc.union(&s).cloned().collect(),
        })
        .unwrap_or_default()
    }

    /// Removes `n` unless some link still ties it to a node other than `except`.
    pub fn prune(&mut self, n: &Node, except: &Node) {
        if !self.graph.connected_elsewhere(n, except) {
            self.drop_node(n);
        }
    }
}
