//! Two-phase grounder: domain computation, then instantiation.
//!
//! Phase one reads the program purely positively and computes, by a
//! semi-naive least fixpoint, an over-approximation of the atoms that can be
//! true in any stable model: negative literals and cardinality literals are
//! treated as satisfiable, choice heads as derivable. Phase two instantiates
//! each rule only with substitutions whose positive body atoms all lie in the
//! computed domains, evaluates builtins, and applies two simplifications that
//! keep stable models intact: instances whose positive body mentions an atom
//! outside every domain are dropped, and `not a` literals whose atom is
//! outside every domain (hence never true) are removed.

use crate::ast::{check_valid, Atom, HeadKind, InvalidProgram, Program, Rule, Term};
use crate::ground::{GroundProgram, GroundRule};
use crate::herbrand::instantiate;
use crate::subst::{builtins_hold, Subst};
use std::collections::{BTreeSet, HashMap, HashSet};

type Relations = HashMap<String, BTreeSet<Vec<Term>>>;

/// Grounds a validated program. The result has the same stable models as the
/// full Herbrand instantiation, restricted to the atoms it mentions.
pub fn ground(program: &Program) -> Result<GroundProgram, InvalidProgram> {
    check_valid(program)?;

    let relations = domains(program);
    let mut out = GroundProgram::default();

    for rule in &program.rules {
        let pats: Vec<&Atom> = rule
            .body_lits
            .iter()
            .filter(|l| !l.negated)
            .map(|l| &l.atom)
            .collect();
        for subst in matching_substs(&pats, None, &relations, &relations, rule) {
            let mut gr = instantiate(rule, &subst, &mut out.atoms);
            simplify_negatives(&mut gr, &relations, &out);
            out.rules.push(gr);
        }
    }
    let mut seen_facts = HashSet::new();
    for fact in &program.facts {
        let id = out.atoms.intern(fact);
        if seen_facts.insert(id) {
            out.rules.push(GroundRule::fact(id));
        }
    }
    Ok(out)
}

/// Drops `not a` literals whose atom is outside every domain: such an atom
/// has no derivation, so the literal is true in every stable model. One
/// exception keeps the printed form reparseable: a constraint must keep a
/// nonempty body, so when every literal of a constraint would be dropped the
/// negatives stay (they still hold vacuously, and the solver resolves them).
fn simplify_negatives(gr: &mut GroundRule, relations: &Relations, out: &GroundProgram) {
    let in_domain = |id: &crate::ground::AtomId| {
        let atom = out.atoms.get(*id);
        relations
            .get(&atom.predicate)
            .is_some_and(|s| s.contains(&atom.args))
    };
    let kept: Vec<crate::ground::AtomId> =
        gr.neg.iter().copied().filter(|id| in_domain(id)).collect();
    let constraint_would_empty = gr.kind == HeadKind::Constraint
        && gr.pos.is_empty()
        && gr.cards.is_empty()
        && kept.is_empty();
    if !constraint_would_empty {
        gr.neg = kept;
    }
}

/// Over-approximating domains: least fixpoint of the positively-read program.
fn domains(program: &Program) -> Relations {
    let mut relations: Relations = HashMap::new();
    let mut pending: Relations = HashMap::new();

    let add_pending = |relations: &Relations, pending: &mut Relations, atom: Atom| {
        debug_assert!(atom.is_ground());
        let in_rel = relations
            .get(&atom.predicate)
            .is_some_and(|s| s.contains(&atom.args));
        if !in_rel {
            pending
                .entry(atom.predicate)
                .or_default()
                .insert(atom.args);
        }
    };

    for fact in &program.facts {
        add_pending(&relations, &mut pending, fact.clone());
    }
    // A rule without positive body literals has ground heads (safety), and
    // its body is satisfiable as far as the over-approximation is concerned,
    // unless a ground builtin refutes it outright.
    for rule in &program.rules {
        if rule.body_lits.iter().all(|l| l.negated) && builtins_hold(rule, &Subst::new()) {
            for head in &rule.heads {
                add_pending(&relations, &mut pending, head.clone());
            }
        }
    }

    while !pending.is_empty() {
        let delta = std::mem::take(&mut pending);
        for (pred, tuples) in &delta {
            relations.entry(pred.clone()).or_default().extend(tuples.iter().cloned());
        }
        for rule in &program.rules {
            if rule.kind == HeadKind::Constraint {
                continue;
            }
            let pats: Vec<&Atom> = rule
                .body_lits
                .iter()
                .filter(|l| !l.negated)
                .map(|l| &l.atom)
                .collect();
            if pats.is_empty() {
                continue; // handled before the loop
            }
            // Semi-naive: each pass requires at least one body atom to come
            // from the freshly derived delta. Other positions read the full
            // relation, which rederives some substitutions; the membership
            // check below absorbs the duplicates.
            for d in 0..pats.len() {
                for subst in matching_substs(&pats, Some(d), &relations, &delta, rule) {
                    for head in &rule.heads {
                        add_pending(
                            &relations,
                            &mut pending,
                            crate::subst::apply_atom(head, &subst),
                        );
                    }
                }
            }
        }
    }
    relations
}

/// All substitutions grounding `pats` with tuples from the relations, the
/// `delta_pos`-th pattern (if any) drawn from `delta` instead, and the rule's
/// builtins satisfied. Patterns with no positions yield the empty
/// substitution if the builtins pass.
fn matching_substs(
    pats: &[&Atom],
    delta_pos: Option<usize>,
    relations: &Relations,
    delta: &Relations,
    rule: &Rule,
) -> Vec<Subst> {
    let mut out = Vec::new();
    let mut subst = Subst::new();
    join_from(
        pats, 0, delta_pos, relations, delta, rule, &mut subst, &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn join_from(
    pats: &[&Atom],
    i: usize,
    delta_pos: Option<usize>,
    relations: &Relations,
    delta: &Relations,
    rule: &Rule,
    subst: &mut Subst,
    out: &mut Vec<Subst>,
) {
    if i == pats.len() {
        if builtins_hold(rule, subst) {
            out.push(subst.clone());
        }
        return;
    }
    let source = if delta_pos == Some(i) { delta } else { relations };
    let Some(tuples) = source.get(&pats[i].predicate) else {
        return;
    };
    for tuple in tuples {
        let mut added = Vec::new();
        if match_args(&pats[i].args, tuple, subst, &mut added) {
            join_from(pats, i + 1, delta_pos, relations, delta, rule, subst, out);
        }
        for v in added {
            subst.remove(&v);
        }
    }
}

/// Unifies a pattern argument list against a ground tuple, extending `subst`
/// in place and recording fresh bindings in `added` so the caller can undo.
fn match_args(
    pattern: &[Term],
    tuple: &[Term],
    subst: &mut Subst,
    added: &mut Vec<String>,
) -> bool {
    debug_assert_eq!(pattern.len(), tuple.len());
    for (p, t) in pattern.iter().zip(tuple) {
        match p {
            Term::Variable(v) => match subst.get(v) {
                Some(bound) => {
                    if bound != t {
                        return false;
                    }
                }
                None => {
                    subst.insert(v.clone(), t.clone());
                    added.push(v.clone());
                }
            },
            _ => {
                if p != t {
                    return false;
                }
            }
        }
    }
    true
}

/// Summary counts for a ground program. Cardinality literals count as one
/// body literal each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundStats {
    pub atoms: usize,
    pub rules: usize,
    pub body_literals: usize,
}

pub fn ground_stats(gp: &GroundProgram) -> GroundStats {
    GroundStats {
        atoms: gp.atom_count(),
        rules: gp.rules.len(),
        body_literals: gp
            .rules
            .iter()
            .map(|r| r.pos.len() + r.neg.len() + r.cards.len())
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;

    fn grounded(text: &str) -> GroundProgram {
        ground(&parse_program(text).unwrap()).unwrap()
    }

    #[test]
    fn only_domain_substitutions_are_instantiated() {
        let gp = grounded("p(X) :- q(X). q(a). r(b).");
        assert_eq!(gp.to_string(), "p(a) :- q(a).\nq(a).\nr(b).\n");
    }

    #[test]
    fn trivially_true_negation_is_dropped() {
        let gp = grounded("a :- not b.");
        assert_eq!(gp.to_string(), "a.\n");
    }

    #[test]
    fn choice_head_bodies_simplify_too() {
        let gp = grounded("{a} :- not b.");
        assert_eq!(gp.to_string(), "{ a }.\n");
    }

    #[test]
    fn derivable_negation_is_kept() {
        let gp = grounded("a :- not b. b :- not a.");
        assert_eq!(gp.to_string(), "a :- not b.\nb :- not a.\n");
    }

    #[test]
    fn constraints_never_lose_their_whole_body() {
        let gp = grounded(":- not a.");
        assert_eq!(gp.to_string(), ":- not a.\n");
    }

    #[test]
    fn transitive_domains_reach_a_fixpoint() {
        let gp = grounded("e(a, b). e(b, c). t(X, Y) :- e(X, Y). t(X, Z) :- t(X, Y), e(Y, Z).");
        let text = gp.to_string();
        assert!(text.contains("t(a,c) :- t(a,b), e(b,c)."));
        assert!(!text.contains("t(c,"));
    }

    #[test]
    fn builtins_filter_instances() {
        let gp = grounded("p(X, Y) :- q(X), q(Y), X != Y. q(a). q(b).");
        let text = gp.to_string();
        assert!(text.contains("p(a,b) :- q(a), q(b)."));
        assert!(text.contains("p(b,a) :- q(b), q(a)."));
        assert!(!text.contains("p(a,a)"));
    }

    #[test]
    fn cardinality_elements_pass_through() {
        let gp = grounded("w :- 1 { p(a); p(b) }. p(a).");
        assert_eq!(gp.to_string(), "w :- 1 { p(a); p(b) }.\np(a).\n");
    }

    #[test]
    fn choice_heads_feed_domains() {
        let gp = grounded("{ p(X) } :- q(X). r(X) :- p(X). q(a).");
        let text = gp.to_string();
        assert!(text.contains("r(a) :- p(a)."));
    }

    #[test]
    fn underivable_positive_body_kills_ground_rules_too() {
        let gp = grounded("p :- q. r.");
        assert_eq!(gp.to_string(), "r.\n");
    }

    #[test]
    fn duplicate_facts_collapse() {
        let gp = grounded("q(a). q(a).");
        assert_eq!(gp.to_string(), "q(a).\n");
    }

    #[test]
    fn k3_coloring_grounds_to_nine_color_atoms() {
        let text = "\
vtx(v1). vtx(v2). vtx(v3). col(c1). col(c2). col(c3).
edge(v1, v2). edge(v1, v3). edge(v2, v3).
{ clrd(V, C) } :- vtx(V), col(C).
colored(V) :- clrd(V, C).
:- vtx(V), not colored(V).
:- clrd(V, C1), clrd(V, C2), C1 < C2.
:- edge(U, V), clrd(U, C), clrd(V, C).
";
        let gp = grounded(text);
        let clrd = gp
            .atoms
            .iter()
            .filter(|(_, a)| a.predicate == "clrd")
            .count();
        assert_eq!(clrd, 9);
        let stats = ground_stats(&gp);
        assert_eq!(stats.atoms, gp.atom_count());
        assert!(stats.rules > 9 && stats.body_literals > stats.rules);
    }

    #[test]
    fn stats_count_cardinalities_as_single_literals() {
        let gp = grounded("w :- 1 { p(a); p(b) } 2, not v. {v}. p(a). p(b).");
        let stats = ground_stats(&gp);
        assert_eq!(stats.rules, 4);
        assert_eq!(stats.body_literals, 2);
    }
}
