//! The proof kernel: formulas, substitution, schemas and inference rules.

mod formula;
mod kernel;
mod shapes;

pub use formula::{Atom, Const, Formula, Predicate, PredicateKind, Symbol, SymbolKind, Term, Var};
pub use kernel::{
    apply_derived, apply_primitive, instantiate_schema, view_implication, KernelError, Rule, RuleApplication, SchemaId,
};
pub use shapes::{Pattern, Shape};

/// Position of an entry on the derivation path.
pub type TimeStamp = u32;
