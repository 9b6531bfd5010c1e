//! Naive full Herbrand instantiation.
//!
//! Substitutes every ground term of the program into every rule, with no
//! relevance reasoning at all. The output is usually far larger than what
//! [`crate::grounder::ground`] produces, but it is also trivially correct,
//! which makes it the reference the smart grounder is tested against.

use crate::ast::{check_valid, InvalidProgram, Program, Rule, Term};
use crate::ground::{GroundCard, GroundProgram, GroundRule};
use crate::subst::{apply_atom, builtins_hold, Subst};

/// Instantiates each rule with every combination of ground terms appearing
/// anywhere in the program. Builtin comparisons are evaluated and failing
/// instances dropped; everything else is kept verbatim. Facts come last,
/// after all rule instances.
pub fn herbrand_instantiation(program: &Program) -> Result<GroundProgram, InvalidProgram> {
    check_valid(program)?;

    let universe = ground_terms(program);
    let mut out = GroundProgram::default();

    for rule in &program.rules {
        let vars: Vec<String> = rule.variables().into_iter().collect();
        for subst in substitutions(&vars, &universe) {
            if !builtins_hold(rule, &subst) {
                continue;
            }
            let instance = instantiate(rule, &subst, &mut out.atoms);
            out.rules.push(instance);
        }
    }
    for fact in &program.facts {
        let id = out.atoms.intern(fact);
        out.rules.push(GroundRule::fact(id));
    }
    Ok(out)
}

pub(crate) fn instantiate(
    rule: &Rule,
    subst: &Subst,
    atoms: &mut crate::ground::AtomTable,
) -> GroundRule {
    let heads = rule
        .heads
        .iter()
        .map(|h| atoms.intern(&apply_atom(h, subst)))
        .collect();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for lit in &rule.body_lits {
        let id = atoms.intern(&apply_atom(&lit.atom, subst));
        if lit.negated {
            neg.push(id);
        } else {
            pos.push(id);
        }
    }
    let cards = rule
        .body_cards
        .iter()
        .map(|c| {
            // Distinct source elements can collapse to one ground atom; the
            // bounds count distinct atoms, so duplicates are dropped.
            let mut elements: Vec<crate::ground::AtomId> = Vec::new();
            for e in &c.elements {
                let id = atoms.intern(&apply_atom(e, subst));
                if !elements.contains(&id) {
                    elements.push(id);
                }
            }
            GroundCard { lower: c.lower, upper: c.upper, elements }
        })
        .collect();
    GroundRule { kind: rule.kind, heads, pos, neg, cards }
}

/// All ground terms (constants and integers) appearing anywhere in the
/// program, in first-occurrence order scanning facts then rules.
fn ground_terms(program: &Program) -> Vec<Term> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut take = |t: &Term| {
        if t.is_ground() && seen.insert(t.clone()) {
            out.push(t.clone());
        }
    };
    for fact in &program.facts {
        fact.args.iter().for_each(&mut take);
    }
    for rule in &program.rules {
        for atom in rule
            .heads
            .iter()
            .chain(rule.body_lits.iter().map(|l| &l.atom))
            .chain(rule.body_cards.iter().flat_map(|c| c.elements.iter()))
        {
            atom.args.iter().for_each(&mut take);
        }
        for b in &rule.body_builtins {
            take(&b.lhs);
            take(&b.rhs);
        }
    }
    out
}

/// Enumerates all assignments of `universe` terms to `vars` as an odometer,
/// first variable most significant. No variables yields the empty
/// substitution; variables over an empty universe yields nothing.
fn substitutions<'a>(
    vars: &'a [String],
    universe: &'a [Term],
) -> impl Iterator<Item = Subst> + 'a {
    let total: Option<usize> = if vars.is_empty() {
        Some(1)
    } else if universe.is_empty() {
        Some(0)
    } else {
        universe.len().checked_pow(vars.len() as u32)
    };
    let total = total.expect("instantiation space overflows usize");
    (0..total).map(move |mut idx| {
        let mut s = Subst::new();
        for v in vars.iter().rev() {
            s.insert(v.clone(), universe[idx % universe.len()].clone());
            idx /= universe.len();
        }
        s
    })
}
