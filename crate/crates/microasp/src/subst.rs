//! Variable substitution helpers shared by the two grounding routines.

use crate::ast::{Atom, Rule, Term};
use std::collections::HashMap;

pub(crate) type Subst = HashMap<String, Term>;

pub(crate) fn apply_term(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Variable(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        _ => t.clone(),
    }
}

pub(crate) fn apply_atom(a: &Atom, s: &Subst) -> Atom {
    Atom::new(
        a.predicate.clone(),
        a.args.iter().map(|t| apply_term(t, s)).collect(),
    )
}

/// Evaluates the rule's builtin comparisons under `s`. All builtin variables
/// are bound by safety, so every operand is ground here.
pub(crate) fn builtins_hold(rule: &Rule, s: &Subst) -> bool {
    rule.body_builtins.iter().all(|b| {
        let lhs = apply_term(&b.lhs, s);
        let rhs = apply_term(&b.rhs, s);
        debug_assert!(lhs.is_ground() && rhs.is_ground());
        b.op.eval(&lhs, &rhs)
    })
}
