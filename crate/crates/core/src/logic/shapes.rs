//! The formula shapes the controllers work with, and search patterns over them.

use super::formula::{Atom, Const, Formula, Predicate, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `α(a)` or `¬α(a)` for a unary predicate and a constant.
    GroundLiteral {
        predicate: Predicate,
        constant: Const,
        negated: bool,
        occurrence: Option<u32>,
    },
    /// `∀x(α(x) → β(x))` or `∀x(α(x) → ¬β(x))`.
    UniversalImplication {
        var: Var,
        antecedent: Predicate,
        consequent: Predicate,
        negated: bool,
        occurrence: Option<u32>,
    },
    /// `∀x¬(α(x) ∧ β(x))`.
    Disjointness {
        var: Var,
        left: Predicate,
        right: Predicate,
    },
    Falsum,
    Other,
}

impl Shape {
    pub fn of(f: &Formula) -> Shape {
        let core = f.expand_sugar();
        if core.is_falsum() {
            return Shape::Falsum;
        }
        if let Some((atom, negated)) = literal(&core) {
            if let [Term::Const(c)] = atom.args() {
                return Shape::GroundLiteral {
                    predicate: atom.predicate().clone(),
                    constant: c.clone(),
                    negated,
                    occurrence: atom.occurrence(),
                };
            }
            return Shape::Other;
        }
        let Formula::Forall(x, body) = &core else { return Shape::Other };
        match &**body {
            Formula::Implies(a, b) => {
                let (Some((ante, false)), Some((cons, negated))) = (literal(a), literal(b)) else {
                    return Shape::Other;
                };
                if !over_var(ante, x) || !over_var(cons, x) {
                    return Shape::Other;
                }
                Shape::UniversalImplication {
                    var: x.clone(),
                    antecedent: ante.predicate().clone(),
                    consequent: cons.predicate().clone(),
                    negated,
                    occurrence: cons.occurrence(),
                }
            }
            Formula::Not(n1) => {
                let Formula::Not(n2) = &**n1 else { return Shape::Other };
                let Formula::Implies(a, nb) = &**n2 else { return Shape::Other };
                let (Some((l, false)), Some((r, true))) = (literal(a), literal(nb)) else {
                    return Shape::Other;
                };
                if !over_var(l, x) || !over_var(r, x) {
                    return Shape::Other;
                }
                Shape::Disjointness { var: x.clone(), left: l.predicate().clone(), right: r.predicate().clone() }
            }
            _ => Shape::Other,
        }
    }
}

fn literal(f: &Formula) -> Option<(&Atom, bool)> {
    match f {
        Formula::Atom(a) if a.args().len() == 1 => Some((a, false)),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(a) if a.args().len() == 1 => Some((a, true)),
            _ => None,
        },
        _ => None,
    }
}

fn over_var(a: &Atom, x: &Var) -> bool {
    a.args()[0].as_var() == Some(x)
}

/// A search pattern over controller shapes; `None` fields match anything.
/// Matching ignores occurrence indexes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Pattern {
    #[default]
    Any,
    GroundLiteral {
        predicate: Option<Predicate>,
        constant: Option<Const>,
        negated: Option<bool>,
    },
    UniversalImplication {
        antecedent: Option<Predicate>,
        consequent: Option<Predicate>,
        negated: Option<bool>,
    },
    /// Unordered: matches `∀x¬(α∧β)` and `∀x¬(β∧α)` alike.
    Disjointness {
        first: Option<Predicate>,
        second: Option<Predicate>,
    },
    Falsum,
}

impl Pattern {
    pub fn ground_atom(predicate: &Predicate, constant: &Const) -> Self {
        Pattern::GroundLiteral {
            predicate: Some(predicate.clone()),
            constant: Some(constant.clone()),
            negated: Some(false),
        }
    }

    pub fn atoms_of(predicate: &Predicate) -> Self {
        Pattern::GroundLiteral { predicate: Some(predicate.clone()), constant: None, negated: Some(false) }
    }

    pub fn implications_from(antecedent: &Predicate, negated: Option<bool>) -> Self {
        Pattern::UniversalImplication { antecedent: Some(antecedent.clone()), consequent: None, negated }
    }

    pub fn disjointness_involving(p: &Predicate) -> Self {
        Pattern::Disjointness { first: Some(p.clone()), second: None }
    }

    pub fn matches(&self, shape: &Shape) -> bool {
        fn opt<T: PartialEq>(want: &Option<T>, have: &T) -> bool {
            want.as_ref().is_none_or(|w| w == have)
        }
        match (self, shape) {
            (Pattern::Any, _) => true,
            (Pattern::Falsum, Shape::Falsum) => true,
            (
                Pattern::GroundLiteral { predicate, constant, negated },
                Shape::GroundLiteral { predicate: p, constant: c, negated: n, .. },
            ) => opt(predicate, p) && opt(constant, c) && opt(negated, n),
            (
                Pattern::UniversalImplication { antecedent, consequent, negated },
                Shape::UniversalImplication { antecedent: a, consequent: c, negated: n, .. },
            ) => opt(antecedent, a) && opt(consequent, c) && opt(negated, n),
            (Pattern::Disjointness { first, second }, Shape::Disjointness { left, right, .. }) => {
                (opt(first, left) && opt(second, right)) || (opt(first, right) && opt(second, left))
            }
            _ => false,
        }
    }

    pub fn matches_formula(&self, f: &Formula) -> bool {
        self.matches(&Shape::of(f))
    }
}
