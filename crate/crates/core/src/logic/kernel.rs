//! Axiom schemas, primitive rules and derived rules.

use std::fmt;
use std::str::FromStr;

use super::formula::{Atom, Const, Formula, Term, Var};
use super::TimeStamp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("missing {0} argument")]
    MissingArgument(&'static str),
    #[error("{term} is not substitutable for {var}")]
    NotSubstitutable { var: String, term: String },
    #[error("variable {0} occurs free in the antecedent")]
    VariableFreeInAntecedent(String),
    #[error("premises do not fit {rule}: {detail}")]
    PremiseShapeMismatch { rule: Rule, detail: String },
    #[error("no single witness constant: {0}")]
    UnificationFailure(String),
    #[error("occurrence index not allowed on predicate {0}")]
    InvalidOccurrence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl SchemaId {
    pub const ALL: [SchemaId; 6] = [SchemaId::S1, SchemaId::S2, SchemaId::S3, SchemaId::S4, SchemaId::S5, SchemaId::S6];

    /// Number of formula meta-arguments.
    pub fn formula_count(self) -> usize {
        match self {
            SchemaId::S1 | SchemaId::S3 | SchemaId::S6 => 2,
            SchemaId::S2 => 3,
            SchemaId::S4 | SchemaId::S5 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    SchemaInst1,
    SchemaInst2,
    SchemaInst3,
    ModusPonens,
    Generalization,
    HypotheticalSyllogism,
    AristotelianSyllogism,
    Subsumption,
    AndIntro,
    AndElim,
    ConflictDetection,
    ContradictionDetection,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::SchemaInst1,
        Rule::SchemaInst2,
        Rule::SchemaInst3,
        Rule::ModusPonens,
        Rule::Generalization,
        Rule::HypotheticalSyllogism,
        Rule::AristotelianSyllogism,
        Rule::Subsumption,
        Rule::AndIntro,
        Rule::AndElim,
        Rule::ConflictDetection,
        Rule::ContradictionDetection,
    ];

    pub fn premise_count(self) -> usize {
        match self {
            Rule::SchemaInst1 | Rule::SchemaInst2 | Rule::SchemaInst3 => 0,
            Rule::Generalization | Rule::AndElim => 1,
            Rule::ConflictDetection => 3,
            _ => 2,
        }
    }

    /// Schema instantiation rules produce logical axioms.
    pub fn is_schema_instantiation(self) -> bool {
        matches!(self, Rule::SchemaInst1 | Rule::SchemaInst2 | Rule::SchemaInst3)
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::SchemaInst1 => "SchemaInst1",
            Rule::SchemaInst2 => "SchemaInst2",
            Rule::SchemaInst3 => "SchemaInst3",
            Rule::ModusPonens => "ModusPonens",
            Rule::Generalization => "Generalization",
            Rule::HypotheticalSyllogism => "HypotheticalSyllogism",
            Rule::AristotelianSyllogism => "AristotelianSyllogism",
            Rule::Subsumption => "Subsumption",
            Rule::AndIntro => "AndIntro",
            Rule::AndElim => "AndElim",
            Rule::ConflictDetection => "ConflictDetection",
            Rule::ContradictionDetection => "ContradictionDetection",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| format!("unknown rule {s}"))
    }
}

/// A rule application as recorded in a from-list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    rule: Rule,
    premises: Vec<TimeStamp>,
    conclusion: Formula,
}

impl RuleApplication {
    pub fn new(rule: Rule, premises: Vec<TimeStamp>, conclusion: Formula) -> Result<Self, KernelError> {
        if premises.len() != rule.premise_count() {
            return Err(KernelError::ArityMismatch { expected: rule.premise_count(), found: premises.len() });
        }
        Ok(RuleApplication { rule, premises, conclusion })
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn premises(&self) -> &[TimeStamp] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }
}

// ---------------------------------------------------------------------------
// Schemas

pub fn instantiate_schema(
    schema: SchemaId,
    formulas: &[Formula],
    var: Option<&Var>,
    term: Option<&Term>,
) -> Result<Formula, KernelError> {
    if formulas.len() != schema.formula_count() {
        return Err(KernelError::ArityMismatch { expected: schema.formula_count(), found: formulas.len() });
    }
    let f = |i: usize| formulas[i].clone();
    let imp = Formula::implies;
    Ok(match schema {
        SchemaId::S1 => imp(f(0), imp(f(1), f(0))),
        SchemaId::S2 => imp(imp(f(0), imp(f(1), f(2))), imp(imp(f(0), f(1)), imp(f(0), f(2)))),
        SchemaId::S3 => imp(imp(Formula::not(f(0)), Formula::not(f(1))), imp(f(1), f(0))),
        SchemaId::S4 => Formula::iff(Formula::Falsum, Formula::and(f(0), Formula::not(f(0)))),
        SchemaId::S5 => {
            let x = var.ok_or(KernelError::MissingArgument("variable"))?;
            let t = term.ok_or(KernelError::MissingArgument("term"))?;
            let inst = formulas[0].substitute_one(x, t)?;
            imp(Formula::forall(x.clone(), f(0)), inst)
        }
        SchemaId::S6 => {
            let x = var.ok_or(KernelError::MissingArgument("variable"))?;
            if formulas[0].free_variables().contains(x) {
                return Err(KernelError::VariableFreeInAntecedent(x.to_string()));
            }
            imp(Formula::forall(x.clone(), imp(f(0), f(1))), imp(f(0), Formula::forall(x.clone(), f(1))))
        }
    })
}

// ---------------------------------------------------------------------------
// Primitive rules

pub fn apply_primitive(rule: Rule, premises: &[Formula], var: Option<&Var>) -> Result<Formula, KernelError> {
    check_count(rule, premises)?;
    match rule {
        Rule::ModusPonens => {
            let (a, b) =
                view_implication(&premises[1]).ok_or_else(|| mismatch(rule, "second premise is not an implication"))?;
            if !a.is_identical_to(&premises[0]) {
                return Err(mismatch(rule, "antecedent differs from the first premise"));
            }
            Ok(b)
        }
        Rule::Generalization => {
            let x = var.ok_or(KernelError::MissingArgument("variable"))?;
            Ok(Formula::forall(x.clone(), premises[0].clone()))
        }
        other => Err(mismatch(other, "not a primitive rule")),
    }
}

// ---------------------------------------------------------------------------
// Derived rules

pub fn apply_derived(rule: Rule, premises: &[Formula]) -> Result<Vec<Formula>, KernelError> {
    check_count(rule, premises)?;
    match rule {
        Rule::HypotheticalSyllogism => {
            let (p, q) =
                view_implication(&premises[0]).ok_or_else(|| mismatch(rule, "first premise is not an implication"))?;
            let (q2, r) =
                view_implication(&premises[1]).ok_or_else(|| mismatch(rule, "second premise is not an implication"))?;
            if !q.is_identical_to(&q2) {
                return Err(mismatch(rule, "middle terms differ"));
            }
            Ok(vec![Formula::implies(p, r)])
        }
        Rule::AristotelianSyllogism => aristotelian(&premises[0], &premises[1]).map(|f| vec![f]),
        Rule::Subsumption => subsumption(&premises[0], &premises[1]).map(|f| vec![f]),
        Rule::AndIntro => Ok(vec![Formula::and(premises[0].clone(), premises[1].clone())]),
        Rule::AndElim => match &premises[0] {
            Formula::And(a, b) => Ok(vec![(**a).clone(), (**b).clone()]),
            Formula::Not(inner) => match &**inner {
                Formula::Implies(a, nb) => match &**nb {
                    Formula::Not(b) => Ok(vec![(**a).clone(), (**b).clone()]),
                    _ => Err(mismatch(rule, "premise is not a conjunction")),
                },
                _ => Err(mismatch(rule, "premise is not a conjunction")),
            },
            _ => Err(mismatch(rule, "premise is not a conjunction")),
        },
        Rule::ConflictDetection => conflict(&premises[0], &premises[1], &premises[2]).map(|f| vec![f]),
        Rule::ContradictionDetection => {
            let a = premises[0].identity_key();
            let b = premises[1].identity_key();
            let complementary =
                matches!(&b, Formula::Not(inner) if **inner == a) || matches!(&a, Formula::Not(inner) if **inner == b);
            if complementary {
                Ok(vec![Formula::Falsum])
            } else {
                Err(mismatch(rule, "premises are not a formula and its negation"))
            }
        }
        other => Err(mismatch(other, "not a derived rule")),
    }
}

fn check_count(rule: Rule, premises: &[Formula]) -> Result<(), KernelError> {
    if premises.len() != rule.premise_count() {
        return Err(KernelError::ArityMismatch { expected: rule.premise_count(), found: premises.len() });
    }
    Ok(())
}

fn mismatch(rule: Rule, detail: &str) -> KernelError {
    KernelError::PremiseShapeMismatch { rule, detail: detail.to_string() }
}

/// Reads `f` as `P → Q`, unfolding a top-level disjunction.
pub fn view_implication(f: &Formula) -> Option<(Formula, Formula)> {
    match f {
        Formula::Implies(a, b) => Some(((**a).clone(), (**b).clone())),
        Formula::Or(a, b) => Some((Formula::not((**a).clone()), (**b).clone())),
        _ => None,
    }
}

fn aristotelian(universal: &Formula, ground: &Formula) -> Result<Formula, KernelError> {
    let rule = Rule::AristotelianSyllogism;
    let Formula::Forall(x, body) = universal else {
        return Err(mismatch(rule, "first premise is not universally quantified"));
    };
    let (p, q) = view_implication(body).ok_or_else(|| mismatch(rule, "quantified body is not an implication"))?;
    let mut witness = None;
    match_instance(&p.identity_key(), x, &ground.identity_key(), &mut witness).map_err(|e| e.into_error(rule))?;
    match witness {
        Some(a) => q.substitute_one(x, &Term::Const(a)),
        None if q.free_variables().contains(x) => {
            Err(KernelError::UnificationFailure(format!("antecedent does not fix a value for {x}")))
        }
        None => Ok(q),
    }
}

fn subsumption(first: &Formula, second: &Formula) -> Result<Formula, KernelError> {
    let rule = Rule::Subsumption;
    let (x, alpha, beta) =
        unary_universal(first).ok_or_else(|| mismatch(rule, "first premise is not ∀x(α(x)→β(x))"))?;
    let (_, beta2, gamma) =
        unary_universal(second).ok_or_else(|| mismatch(rule, "second premise is not ∀x(β(x)→γ(x))"))?;
    if beta.predicate() != beta2.predicate() {
        return Err(mismatch(rule, "middle predicates differ"));
    }
    let var = Term::Var(x.clone());
    let head = Atom::new(gamma.predicate().clone(), vec![var])?;
    let head = match gamma.occurrence() {
        Some(n) => head.with_occurrence(n)?,
        None => head,
    };
    Ok(Formula::forall(x.clone(), Formula::implies(Formula::Atom(alpha.clone()), Formula::Atom(head))))
}

fn unary_universal(f: &Formula) -> Option<(&Var, &Atom, &Atom)> {
    let Formula::Forall(x, body) = f else { return None };
    let Formula::Implies(a, b) = &**body else { return None };
    let (Formula::Atom(a), Formula::Atom(b)) = (&**a, &**b) else { return None };
    let is_x = |atom: &Atom| atom.args().len() == 1 && atom.args()[0].as_var() == Some(x);
    (is_x(a) && is_x(b)).then_some((x, a, b))
}

fn conflict(disjointness: &Formula, left: &Formula, right: &Formula) -> Result<Formula, KernelError> {
    let rule = Rule::ConflictDetection;
    let key = disjointness.identity_key();
    let Formula::Forall(x, body) = &key else {
        return Err(mismatch(rule, "first premise is not universally quantified"));
    };
    let (p, q) = match &**body {
        Formula::Not(n1) => match &**n1 {
            Formula::Not(n2) => match &**n2 {
                Formula::Implies(p, nq) => match &**nq {
                    Formula::Not(q) => (&**p, &**q),
                    _ => return Err(mismatch(rule, "first premise is not ∀x¬(P∧Q)")),
                },
                _ => return Err(mismatch(rule, "first premise is not ∀x¬(P∧Q)")),
            },
            _ => return Err(mismatch(rule, "first premise is not ∀x¬(P∧Q)")),
        },
        _ => return Err(mismatch(rule, "first premise is not ∀x¬(P∧Q)")),
    };
    let free = body.free_variables();
    if free.len() != 1 || !free.contains(x) {
        return Err(mismatch(rule, "the conjunction must have the quantified variable as its only free variable"));
    }
    let mut witness = None;
    match_instance(p, x, &left.identity_key(), &mut witness).map_err(|e| e.into_error(rule))?;
    match_instance(q, x, &right.identity_key(), &mut witness).map_err(|e| e.into_error(rule))?;
    Ok(Formula::Falsum)
}

enum MatchFailure {
    Shape,
    Witness(String),
}

impl MatchFailure {
    fn into_error(self, rule: Rule) -> KernelError {
        match self {
            MatchFailure::Shape => mismatch(rule, "ground premise is not an instance of the quantified formula"),
            MatchFailure::Witness(d) => KernelError::UnificationFailure(d),
        }
    }
}

/// Checks that `target` is `pattern(a/x)` for one constant `a`, recording
/// `a` in `witness`. Both sides must be identity keys.
fn match_instance(
    pattern: &Formula,
    x: &Var,
    target: &Formula,
    witness: &mut Option<Const>,
) -> Result<(), MatchFailure> {
    match (pattern, target) {
        (Formula::Falsum, Formula::Falsum) => Ok(()),
        (Formula::Atom(p), Formula::Atom(t)) => {
            if p.predicate() != t.predicate() || p.args().len() != t.args().len() {
                return Err(MatchFailure::Shape);
            }
            for (pa, ta) in p.args().iter().zip(t.args()) {
                match (pa, ta) {
                    (Term::Var(v), Term::Const(c)) if v == x => match witness {
                        Some(w) if w != c => {
                            return Err(MatchFailure::Witness(format!("{x} matched both {w} and {c}")));
                        }
                        Some(_) => {}
                        None => *witness = Some(c.clone()),
                    },
                    (pa, ta) if pa == ta => {}
                    _ => return Err(MatchFailure::Shape),
                }
            }
            Ok(())
        }
        (Formula::Not(p), Formula::Not(t)) => match_instance(p, x, t, witness),
        (Formula::Implies(pa, pb), Formula::Implies(ta, tb)) => {
            match_instance(pa, x, ta, witness)?;
            match_instance(pb, x, tb, witness)
        }
        (Formula::Forall(pv, pb), Formula::Forall(tv, tb)) if pv == tv => {
            if pv == x {
                if pb == tb {
                    Ok(())
                } else {
                    Err(MatchFailure::Shape)
                }
            } else {
                match_instance(pb, x, tb, witness)
            }
        }
        _ => Err(MatchFailure::Shape),
    }
}
