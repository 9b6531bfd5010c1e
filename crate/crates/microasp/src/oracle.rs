//! Reference semantics for ground programs.
//!
//! Everything here favors being obviously correct over being fast: the
//! reduct is materialized, the least model runs counter-based forward
//! chaining, and enumeration tries every subset of the atom table. The
//! solver and the default-logic engine are both tested against this module.

use crate::ast::HeadKind;
use crate::ground::{AtomId, AtomTable, GroundCard, GroundProgram, GroundRule};
use std::collections::BTreeSet;
use thiserror::Error;

/// Default cap on brute-force enumeration, overridable per call.
pub const DEFAULT_ORACLE_LIMIT: usize = 20;

/// Practical ceiling: subsets are enumerated as u64 masks.
const MASK_LIMIT: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(
        "program has {atoms} atoms, exceeding the brute-force limit of {limit} \
         (raise it with --limit or MICROASP_ORACLE_LIMIT)"
    )]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("{0}")]
    Unsupported(&'static str),
}

/// Negation-free program: Horn rules extended with monotone lower-bound
/// cardinality bodies. The reduct of any ground program lands here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRule {
    pub head: AtomId,
    pub body: Vec<AtomId>,
    /// Each entry (lower, elements) is satisfied once `lower` distinct
    /// elements are derived. Elements are duplicate-free.
    pub lower_cards: Vec<(u32, Vec<AtomId>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PositiveProgram {
    pub atom_count: usize,
    pub rules: Vec<PositiveRule>,
}

/// The Gelfond-Lifschitz reduct of `gp` with respect to `candidate`.
///
/// Normal rules: deleted when a negative body atom is in the candidate,
/// otherwise kept with the negatives stripped. Choice rules `{H} :- B` emit
/// `h :- B+` for each head atom the candidate includes. A cardinality body
/// `L {E} U` deletes the rule when the candidate already exceeds `U`;
/// otherwise it survives as the monotone bound `(L, E)`. Constraints are not
/// part of the reduct; `is_stable` checks them separately.
pub fn reduct(gp: &GroundProgram, candidate: &BTreeSet<AtomId>) -> PositiveProgram {
    let mut rules = Vec::new();
    for r in &gp.rules {
        if r.kind == HeadKind::Constraint {
            continue;
        }
        if r.neg.iter().any(|b| candidate.contains(b)) {
            continue;
        }
        if r.cards.iter().any(|c| card_over_upper(c, candidate)) {
            continue;
        }
        let lower_cards: Vec<(u32, Vec<AtomId>)> = r
            .cards
            .iter()
            .map(|c| (c.lower, dedup_ids(&c.elements)))
            .collect();
        match r.kind {
            HeadKind::Normal => rules.push(PositiveRule {
                head: r.heads[0],
                body: r.pos.clone(),
                lower_cards,
            }),
            HeadKind::Choice => {
                for &h in &r.heads {
                    if candidate.contains(&h) {
                        rules.push(PositiveRule {
                            head: h,
                            body: r.pos.clone(),
                            lower_cards: lower_cards.clone(),
                        });
                    }
                }
            }
            HeadKind::Constraint => unreachable!(),
        }
    }
    PositiveProgram { atom_count: gp.atom_count(), rules }
}

fn dedup_ids(ids: &[AtomId]) -> Vec<AtomId> {
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

fn card_true_count(c: &GroundCard, m: &BTreeSet<AtomId>) -> u32 {
    dedup_ids(&c.elements)
        .iter()
        .filter(|e| m.contains(e))
        .count() as u32
}

fn card_over_upper(c: &GroundCard, m: &BTreeSet<AtomId>) -> bool {
    c.upper.is_some_and(|u| card_true_count(c, m) > u)
}

/// True when every body condition of `r` holds in `m`.
pub fn body_holds(r: &GroundRule, m: &BTreeSet<AtomId>) -> bool {
    r.pos.iter().all(|a| m.contains(a))
        && r.neg.iter().all(|a| !m.contains(a))
        && r.cards.iter().all(|c| {
            let t = card_true_count(c, m);
            t >= c.lower && c.upper.is_none_or(|u| t <= u)
        })
}

/// Least fixpoint of a positive program, by unsatisfied-premise counters and
/// a work queue: linear in total body size for the Horn part.
pub fn least_model(pp: &PositiveProgram) -> BTreeSet<AtomId> {
    let n = pp.atom_count;
    let mut occ_pos: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut occ_card: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut unsat: Vec<u32> = Vec::with_capacity(pp.rules.len());
    let mut card_count: Vec<Vec<u32>> = Vec::with_capacity(pp.rules.len());

    for (ri, r) in pp.rules.iter().enumerate() {
        let ri = ri as u32;
        let mut u = r.body.len() as u32;
        for &a in &r.body {
            occ_pos[a.index()].push(ri);
        }
        for (ci, (lower, elements)) in r.lower_cards.iter().enumerate() {
            if *lower > 0 {
                u += 1;
            }
            for &e in elements {
                occ_card[e.index()].push((ri, ci as u32));
            }
        }
        unsat.push(u);
        card_count.push(vec![0; r.lower_cards.len()]);
    }

    let mut derived = vec![false; n];
    let mut queue: Vec<AtomId> = Vec::new();
    let push = |a: AtomId, derived: &mut Vec<bool>, queue: &mut Vec<AtomId>| {
        if !derived[a.index()] {
            derived[a.index()] = true;
            queue.push(a);
        }
    };
    for (ri, r) in pp.rules.iter().enumerate() {
        if unsat[ri] == 0 {
            push(r.head, &mut derived, &mut queue);
        }
    }
    while let Some(a) = queue.pop() {
        for &ri in &occ_pos[a.index()] {
            unsat[ri as usize] -= 1;
            if unsat[ri as usize] == 0 {
                push(pp.rules[ri as usize].head, &mut derived, &mut queue);
            }
        }
        for &(ri, ci) in &occ_card[a.index()] {
            let (ri, ci) = (ri as usize, ci as usize);
            card_count[ri][ci] += 1;
            if card_count[ri][ci] == pp.rules[ri].lower_cards[ci].0 {
                unsat[ri] -= 1;
                if unsat[ri] == 0 {
                    push(pp.rules[ri].head, &mut derived, &mut queue);
                }
            }
        }
    }
    (0..n)
        .filter(|&i| derived[i])
        .map(AtomId::from_index)
        .collect()
}

/// The stable-model test: `candidate` must equal the least model of its own
/// reduct, and must satisfy every constraint. Upper bounds on applied rules
/// need no extra check: a violated upper bound deletes the rule from the
/// reduct, and the least model then lacks the head unless it is derived
/// elsewhere, so the fixpoint comparison already rejects such candidates.
pub fn is_stable(gp: &GroundProgram, candidate: &BTreeSet<AtomId>) -> bool {
    if least_model(&reduct(gp, candidate)) != *candidate {
        return false;
    }
    gp.rules
        .iter()
        .filter(|r| r.kind == HeadKind::Constraint)
        .all(|r| !body_holds(r, candidate))
}

/// A list of models, each a strictly ascending vector of atom ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSet {
    pub models: Vec<Vec<AtomId>>,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Orders models lexicographically by their characteristic bit vector
    /// over ascending AtomIds: models without atom 1 sort before models with
    /// it, ties broken by atom 2, and so on.
    pub fn sort_bitset_lex(&mut self, atom_count: usize) {
        self.models.sort_by_key(|m| {
            let mut bits = vec![false; atom_count];
            for a in m {
                bits[a.index()] = true;
            }
            bits
        });
    }

    /// Set view for order-insensitive comparison.
    pub fn as_set(&self) -> BTreeSet<Vec<AtomId>> {
        self.models.iter().cloned().collect()
    }

    /// Models as sets of atom names, for comparisons across programs whose
    /// atom tables assign different ids.
    pub fn name_sets(&self, atoms: &AtomTable) -> BTreeSet<BTreeSet<String>> {
        self.models
            .iter()
            .map(|m| m.iter().map(|&a| atoms.name(a)).collect())
            .collect()
    }
}

/// Tests every subset of the atom table with `is_stable`. Models come back
/// in bitset-lexicographic order.
pub fn enumerate_bruteforce(
    gp: &GroundProgram,
    atom_limit: usize,
) -> Result<ModelSet, OracleError> {
    let n = gp.atom_count();
    let limit = atom_limit.min(MASK_LIMIT);
    if n > limit {
        return Err(OracleError::TooManyAtoms { atoms: n, limit });
    }
    let mut out = ModelSet::default();
    for mask in 0u64..(1u64 << n) {
        let candidate: BTreeSet<AtomId> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(AtomId::from_index)
            .collect();
        if is_stable(gp, &candidate) {
            out.models.push(candidate.into_iter().collect());
        }
    }
    out.sort_bitset_lex(n);
    Ok(out)
}

/// Propositional formula in negation normal form over atom ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Lit { atom: AtomId, positive: bool },
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            Formula::Lit { atom, positive } => values[atom.index()] == *positive,
            Formula::And(fs) => fs.iter().all(|f| f.eval(values)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(values)),
        }
    }
}

fn or_of(mut fs: Vec<Formula>) -> Formula {
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Formula::Or(fs)
    }
}

fn and_of(mut fs: Vec<Formula>) -> Formula {
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Formula::And(fs)
    }
}

/// Renders a formula with atom names: `-a` for negation, `&` and `|` for the
/// connectives, conjunctions parenthesized inside disjunctions.
pub fn format_formula(f: &Formula, atoms: &AtomTable) -> String {
    fn go(f: &Formula, atoms: &AtomTable, nested: bool, out: &mut String) {
        match f {
            Formula::Lit { atom, positive } => {
                if !positive {
                    out.push('-');
                }
                out.push_str(&atoms.name(*atom));
            }
            Formula::And(fs) if fs.is_empty() => out.push_str("true"),
            Formula::Or(fs) if fs.is_empty() => out.push_str("false"),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                if nested {
                    out.push('(');
                }
                for (i, sub) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    go(sub, atoms, true, out);
                }
                if nested {
                    out.push(')');
                }
            }
        }
    }
    let mut out = String::new();
    go(f, atoms, false, &mut out);
    out
}

/// Clause set whose models are exactly the supported models of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionFormula {
    pub atom_count: usize,
    pub clauses: Vec<Formula>,
}

impl CompletionFormula {
    /// Truth-table enumeration of the clause set, bitset-lexicographic order.
    pub fn supported_models(&self, atom_limit: usize) -> Result<ModelSet, OracleError> {
        let n = self.atom_count;
        let limit = atom_limit.min(MASK_LIMIT);
        if n > limit {
            return Err(OracleError::TooManyAtoms { atoms: n, limit });
        }
        let mut out = ModelSet::default();
        let mut values = vec![false; n];
        for mask in 0u64..(1u64 << n) {
            for (i, v) in values.iter_mut().enumerate() {
                *v = mask & (1 << i) != 0;
            }
            if self.clauses.iter().all(|c| c.eval(&values)) {
                out.models.push(
                    (0..n)
                        .filter(|&i| values[i])
                        .map(AtomId::from_index)
                        .collect(),
                );
            }
        }
        out.sort_bitset_lex(n);
        Ok(out)
    }
}

/// Clark completion of a normal/constraint program: each atom becomes
/// equivalent to the disjunction of its rule bodies (false when it heads no
/// rule), each constraint becomes its negated body. The equivalences are
/// compiled to NNF clauses.
pub fn clark_completion(gp: &GroundProgram) -> Result<CompletionFormula, OracleError> {
    if gp.has_choice() || gp.has_cardinality() {
        return Err(OracleError::Unsupported(
            "completion is defined for normal rules and constraints only",
        ));
    }
    let n = gp.atom_count();
    let mut by_head: Vec<Vec<&GroundRule>> = vec![Vec::new(); n];
    let mut clauses = Vec::new();
    for r in &gp.rules {
        match r.kind {
            HeadKind::Normal => by_head[r.heads[0].index()].push(r),
            HeadKind::Constraint => clauses.push(or_of(negated_body(r))),
            HeadKind::Choice => unreachable!(),
        }
    }
    for i in 0..n {
        let id = AtomId::from_index(i);
        let rules = &by_head[i];
        if rules.is_empty() {
            clauses.push(Formula::Lit { atom: id, positive: false });
            continue;
        }
        // atom <- body, clause per rule: a | -b1 | ... | c1 | ...
        for r in rules {
            let mut parts = vec![Formula::Lit { atom: id, positive: true }];
            parts.extend(negated_body(r));
            clauses.push(or_of(parts));
        }
        // atom -> some body; trivially true when some body is empty.
        if rules.iter().any(|r| r.pos.is_empty() && r.neg.is_empty()) {
            continue;
        }
        let mut parts = vec![Formula::Lit { atom: id, positive: false }];
        for r in rules {
            let body: Vec<Formula> = r
                .pos
                .iter()
                .map(|&a| Formula::Lit { atom: a, positive: true })
                .chain(r.neg.iter().map(|&a| Formula::Lit { atom: a, positive: false }))
                .collect();
            parts.push(and_of(body));
        }
        clauses.push(or_of(parts));
    }
    Ok(CompletionFormula { atom_count: n, clauses })
}

fn negated_body(r: &GroundRule) -> Vec<Formula> {
    r.pos
        .iter()
        .map(|&a| Formula::Lit { atom: a, positive: false })
        .chain(r.neg.iter().map(|&a| Formula::Lit { atom: a, positive: true }))
        .collect()
}

/// True when the positive dependency graph (head to positive body atom) is
/// acyclic, decided by Kahn-style peeling.
pub fn is_tight(gp: &GroundProgram) -> Result<bool, OracleError> {
    if gp.has_choice() || gp.has_cardinality() {
        return Err(OracleError::Unsupported(
            "tightness is defined for normal rules and constraints only",
        ));
    }
    let n = gp.atom_count();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for r in &gp.rules {
        if r.kind != HeadKind::Normal {
            continue;
        }
        for b in &r.pos {
            succ[r.heads[0].index()].push(b.index());
            indeg[b.index()] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = queue.pop() {
        seen += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    Ok(seen == n)
}
