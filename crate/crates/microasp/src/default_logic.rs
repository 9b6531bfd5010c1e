//! Propositional default logic over conjunctions of literals.
//!
//! A theory is a set of literal facts plus defaults `pre : j1, ..., jm /
//! cons` whose prerequisite, justifications, and consequent are all literal
//! conjunctions. An extension is a deductively closed literal set E that
//! equals the closure of the facts under exactly those defaults whose
//! justifications are each consistent with E (Reiter's fixed point, which in
//! this fragment needs no general theorem proving).
//!
//! Extensions are enumerated by deciding, default by default, whether its
//! justifications will survive against the final extension, propagating
//! decisions through optimistic and pessimistic closures, and verifying the
//! fixed point independently at each leaf. The branching order follows a
//! relaxed stratification of the defaults so that producers of an atom are
//! decided before its consumers whenever the dependency graph allows it.

use crate::ast::HeadKind;
use crate::ground::{AtomId, GroundProgram};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A propositional literal: an atom or its classical negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub atom: String,
    pub positive: bool,
}

impl Lit {
    pub fn pos(atom: impl Into<String>) -> Lit {
        Lit { atom: atom.into(), positive: true }
    }

    pub fn neg(atom: impl Into<String>) -> Lit {
        Lit { atom: atom.into(), positive: false }
    }

    pub fn complement(&self) -> Lit {
        Lit { atom: self.atom.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid literal '{text}': expected an atom with an optional leading '-'")]
pub struct InvalidLit {
    pub text: String,
}

impl FromStr for Lit {
    type Err = InvalidLit;

    fn from_str(s: &str) -> Result<Lit, InvalidLit> {
        let trimmed = s.trim();
        let (positive, name) = match trimmed.strip_prefix('-') {
            Some(rest) => (false, rest),
            None => (true, trimmed),
        };
        let mut chars = name.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_lowercase())
            && chars.all(|c| {
                c.is_ascii_lowercase() || c.is_ascii_digit() || "_(),".contains(c)
            });
        if ok {
            Ok(Lit { atom: name.to_string(), positive })
        } else {
            Err(InvalidLit { text: s.to_string() })
        }
    }
}

/// `prerequisite : justifications / consequent`, all literal conjunctions.
/// An empty prerequisite is vacuously derivable; an empty justification list
/// makes the default a plain inference rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Default {
    pub prerequisite: BTreeSet<Lit>,
    pub justifications: Vec<BTreeSet<Lit>>,
    pub consequent: BTreeSet<Lit>,
}

impl fmt::Display for Default {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d: ")?;
        if self.prerequisite.is_empty() {
            write!(f, "true")?;
        } else {
            write_conj(f, &self.prerequisite)?;
        }
        write!(f, " : ")?;
        for (i, j) in self.justifications.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_conj(f, j)?;
        }
        if !self.justifications.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "/ ")?;
        write_conj(f, &self.consequent)?;
        write!(f, ".")
    }
}

fn write_conj(f: &mut fmt::Formatter<'_>, conj: &BTreeSet<Lit>) -> fmt::Result {
    for (i, l) in conj.iter().enumerate() {
        if i > 0 {
            write!(f, " & ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DefaultTheory {
    pub facts: BTreeSet<Lit>,
    pub defaults: Vec<Default>,
}

impl fmt::Display for DefaultTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.facts.is_empty() {
            write!(f, "fact: ")?;
            write_conj(f, &self.facts)?;
            writeln!(f, ".")?;
        }
        for d in &self.defaults {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A deductively closed set of literals. The inconsistent closure contains
/// every literal and is represented explicitly rather than materialized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LitSet {
    Consistent(BTreeSet<Lit>),
    Inconsistent,
}

impl LitSet {
    pub fn contains(&self, lit: &Lit) -> bool {
        match self {
            LitSet::Consistent(set) => set.contains(lit),
            LitSet::Inconsistent => true,
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self, LitSet::Inconsistent)
    }
}

impl fmt::Display for LitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LitSet::Inconsistent => write!(f, "inconsistent"),
            LitSet::Consistent(set) => {
                for (i, l) in set.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub literals: LitSet,
    /// Indices of the defaults applied in the closure: prerequisite
    /// derivable and every justification consistent with the extension.
    pub generating: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtensionSet {
    /// Sorted by literal set, so enumeration order is deterministic.
    pub extensions: Vec<Extension>,
}

impl ExtensionSet {
    pub fn len(&self) -> usize {
        self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extensions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    /// True when some extension contains the literal.
    Brave,
    /// True when every extension contains the literal; vacuously true for a
    /// theory without extensions.
    Skeptical,
}

/// Closure of the facts under the active defaults, applied whenever their
/// prerequisite is derivable and ignoring justifications. Returns the
/// inconsistent closure as soon as complementary literals meet.
pub fn closure(
    facts: &BTreeSet<Lit>,
    defaults: &[Default],
    active: &BTreeSet<usize>,
) -> LitSet {
    let mut lits = facts.clone();
    for l in facts {
        if lits.contains(&l.complement()) {
            return LitSet::Inconsistent;
        }
    }
    let mut applied = vec![false; defaults.len()];
    loop {
        let mut changed = false;
        for &i in active {
            if applied[i] {
                continue;
            }
            let d = &defaults[i];
            if !d.prerequisite.iter().all(|l| lits.contains(l)) {
                continue;
            }
            applied[i] = true;
            changed = true;
            for l in &d.consequent {
                if lits.contains(&l.complement()) {
                    return LitSet::Inconsistent;
                }
                lits.insert(l.clone());
            }
        }
        if !changed {
            break;
        }
    }
    LitSet::Consistent(lits)
}

/// Is the conjunction consistent together with `e`?
fn conj_consistent_with(conj: &BTreeSet<Lit>, e: &LitSet) -> bool {
    match e {
        LitSet::Inconsistent => false,
        LitSet::Consistent(set) => conj
            .iter()
            .all(|l| !set.contains(&l.complement()) && !conj.contains(&l.complement())),
    }
}

fn admissible_under(defaults: &[Default], e: &LitSet) -> BTreeSet<usize> {
    (0..defaults.len())
        .filter(|&i| {
            defaults[i]
                .justifications
                .iter()
                .all(|j| conj_consistent_with(j, e))
        })
        .collect()
}

/// Branching order: producers before consumers where the dependency graph
/// is acyclic, remaining (cyclic) defaults in input order.
fn branch_order(defaults: &[Default]) -> Vec<usize> {
    let mut provides: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, d) in defaults.iter().enumerate() {
        for l in &d.consequent {
            provides.entry(l.atom.as_str()).or_default().push(i);
        }
    }
    let n = defaults.len();
    let mut succs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut indeg = vec![0usize; n];
    for (j, d) in defaults.iter().enumerate() {
        let reads = d
            .prerequisite
            .iter()
            .chain(d.justifications.iter().flatten());
        for l in reads {
            let Some(producers) = provides.get(l.atom.as_str()) else { continue };
            for &i in producers {
                if i != j && succs[i].insert(j) {
                    indeg[j] += 1;
                }
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while let Some(i) = ready.pop_first() {
        order.push(i);
        placed[i] = true;
        for &j in &succs[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 && !placed[j] {
                ready.insert(j);
            }
        }
    }
    for i in 0..n {
        if !placed[i] {
            order.push(i);
        }
    }
    order
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Undecided,
    In,
    Out,
}

struct Search<'t> {
    theory: &'t DefaultTheory,
    order: Vec<usize>,
    status: Vec<Status>,
    found: BTreeMap<LitSet, Extension>,
}

impl Search<'_> {
    fn set_of(&self, want: Status, also_undecided: bool) -> BTreeSet<usize> {
        (0..self.status.len())
            .filter(|&i| {
                self.status[i] == want
                    || (also_undecided && self.status[i] == Status::Undecided)
            })
            .collect()
    }

    /// Applies forced decisions until stable. False when the branch cannot
    /// lead to a leaf that the forcing rules would not reach elsewhere.
    fn propagate(&mut self) -> bool {
        let defaults = &self.theory.defaults;
        loop {
            let e_min = closure(&self.theory.facts, defaults, &self.set_of(Status::In, false));
            // A default assumed admissible whose justification is already
            // contradicted stays contradicted in every completion; the same
            // extension, if real, is reachable on the branch without it.
            for i in 0..defaults.len() {
                if self.status[i] == Status::In
                    && !defaults[i]
                        .justifications
                        .iter()
                        .all(|j| conj_consistent_with(j, &e_min))
                {
                    return false;
                }
            }
            let e_max =
                closure(&self.theory.facts, defaults, &self.set_of(Status::In, true));
            let mut forced = false;
            for i in 0..defaults.len() {
                if self.status[i] != Status::Undecided {
                    continue;
                }
                let d = &defaults[i];
                let blocked = !d
                    .justifications
                    .iter()
                    .all(|j| conj_consistent_with(j, &e_min));
                let unreachable = !d.prerequisite.iter().all(|l| e_max.contains(l));
                if blocked || unreachable {
                    self.status[i] = Status::Out;
                    forced = true;
                } else if d.prerequisite.iter().all(|l| e_min.contains(l))
                    && d.justifications.iter().all(|j| conj_consistent_with(j, &e_max))
                {
                    // Admissible against the largest possible extension, so
                    // admissible against all of them.
                    self.status[i] = Status::In;
                    forced = true;
                }
            }
            if !forced {
                return true;
            }
        }
    }

    fn leaf(&mut self) {
        let defaults = &self.theory.defaults;
        let e = closure(&self.theory.facts, defaults, &self.set_of(Status::In, false));
        let admissible = admissible_under(defaults, &e);
        let check = closure(&self.theory.facts, defaults, &admissible);
        if check != e {
            return;
        }
        let generating: BTreeSet<usize> = admissible
            .into_iter()
            .filter(|&i| defaults[i].prerequisite.iter().all(|l| e.contains(l)))
            .collect();
        self.found
            .entry(e.clone())
            .or_insert(Extension { literals: e, generating });
    }

    fn dive(&mut self) {
        let saved = self.status.clone();
        if self.propagate() {
            match self
                .order
                .iter()
                .copied()
                .find(|&i| self.status[i] == Status::Undecided)
            {
                None => self.leaf(),
                Some(i) => {
                    self.status[i] = Status::In;
                    self.dive();
                    self.status = saved.clone();
                    self.status[i] = Status::Out;
                    self.dive();
                }
            }
        }
        self.status = saved;
    }
}

/// Enumerates all extensions of the theory. An inconsistent set of facts
/// yields exactly one extension, the inconsistent one.
pub fn extensions(theory: &DefaultTheory) -> ExtensionSet {
    let mut search = Search {
        theory,
        order: branch_order(&theory.defaults),
        status: vec![Status::Undecided; theory.defaults.len()],
        found: BTreeMap::new(),
    };
    search.dive();
    ExtensionSet { extensions: search.found.into_values().collect() }
}

pub fn query(theory: &DefaultTheory, lit: &Lit, mode: QueryMode) -> bool {
    let exts = extensions(theory);
    match mode {
        QueryMode::Brave => exts.extensions.iter().any(|e| e.literals.contains(lit)),
        QueryMode::Skeptical => exts.extensions.iter().all(|e| e.literals.contains(lit)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("cannot translate {0} to a default theory")]
    Unsupported(&'static str),
}

/// Translates a ground normal program with constraints into a default
/// theory: facts stay facts, `a :- b, not c` becomes `b : -c / a`, and each
/// constraint gets a fresh guard atom `f_i` in `pre : -c, -f_i / f_i` so
/// that violating the constraint forces the fixed point to miss. Stable
/// models then correspond exactly to extensions restricted to program atoms.
pub fn program_to_defaults(gp: &GroundProgram) -> Result<DefaultTheory, TranslateError> {
    let mut theory = DefaultTheory::default();
    let lit_name = |a: AtomId| gp.atoms.name(a);
    let names: BTreeSet<String> = (0..gp.atom_count())
        .map(|i| lit_name(AtomId::from_index(i)))
        .collect();
    let mut used_fresh: BTreeSet<String> = BTreeSet::new();
    let mut constraint_no = 0usize;
    for r in &gp.rules {
        if !r.cards.is_empty() {
            return Err(TranslateError::Unsupported("a cardinality bound"));
        }
        match r.kind {
            HeadKind::Choice => return Err(TranslateError::Unsupported("a choice rule")),
            HeadKind::Normal => {
                let head = Lit::pos(lit_name(r.heads[0]));
                if r.pos.is_empty() && r.neg.is_empty() {
                    theory.facts.insert(head);
                    continue;
                }
                theory.defaults.push(Default {
                    prerequisite: r.pos.iter().map(|&a| Lit::pos(lit_name(a))).collect(),
                    justifications: r
                        .neg
                        .iter()
                        .map(|&a| BTreeSet::from([Lit::neg(lit_name(a))]))
                        .collect(),
                    consequent: BTreeSet::from([head]),
                });
            }
            HeadKind::Constraint => {
                constraint_no += 1;
                let mut fresh = format!("f_{constraint_no}");
                while names.contains(&fresh) || used_fresh.contains(&fresh) {
                    fresh.push('_');
                }
                used_fresh.insert(fresh.clone());
                let mut justifications: Vec<BTreeSet<Lit>> = r
                    .neg
                    .iter()
                    .map(|&a| BTreeSet::from([Lit::neg(lit_name(a))]))
                    .collect();
                justifications.push(BTreeSet::from([Lit::neg(fresh.clone())]));
                theory.defaults.push(Default {
                    prerequisite: r.pos.iter().map(|&a| Lit::pos(lit_name(a))).collect(),
                    justifications,
                    consequent: BTreeSet::from([Lit::pos(fresh)]),
                });
            }
        }
    }
    Ok(theory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground;
    use crate::parse::{parse_default_theory, parse_program};

    fn lit(s: &str) -> Lit {
        s.parse().unwrap()
    }

    fn conj(s: &str) -> BTreeSet<Lit> {
        s.split('&').map(|p| lit(p.trim())).collect()
    }

    fn positive_atoms(e: &Extension) -> BTreeSet<String> {
        match &e.literals {
            LitSet::Consistent(set) => set
                .iter()
                .filter(|l| l.positive)
                .map(|l| l.atom.clone())
                .collect(),
            LitSet::Inconsistent => panic!("unexpected inconsistent extension"),
        }
    }

    #[test]
    fn closure_applies_reachable_defaults() {
        let defaults = vec![
            Default {
                prerequisite: conj("a"),
                justifications: vec![],
                consequent: conj("b"),
            },
            Default {
                prerequisite: conj("b"),
                justifications: vec![],
                consequent: conj("c"),
            },
        ];
        let facts = conj("a");
        let all: BTreeSet<usize> = [0, 1].into();
        assert_eq!(closure(&facts, &defaults, &all), LitSet::Consistent(conj("a & b & c")));
        assert_eq!(
            closure(&facts, &defaults, &BTreeSet::new()),
            LitSet::Consistent(conj("a"))
        );
    }

    #[test]
    fn nixon_diamond_has_two_extensions() {
        let theory = parse_default_theory(
            "fact: republican & quaker.\n\
             d: republican : -pacifist / -pacifist.\n\
             d: quaker : pacifist / pacifist.\n",
        )
        .unwrap();
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 2);
        // Sorted by literal set: the -pacifist extension comes first.
        assert!(exts.extensions[0].literals.contains(&lit("-pacifist")));
        assert!(exts.extensions[1].literals.contains(&lit("pacifist")));
        assert_eq!(exts.extensions[0].generating, BTreeSet::from([0]));
        assert_eq!(exts.extensions[1].generating, BTreeSet::from([1]));
        assert!(query(&theory, &lit("pacifist"), QueryMode::Brave));
        assert!(!query(&theory, &lit("pacifist"), QueryMode::Skeptical));
        assert!(query(&theory, &lit("republican"), QueryMode::Skeptical));
    }

    #[test]
    fn self_blocking_default_has_no_extension() {
        let theory = parse_default_theory("d: true : -a / a.\n").unwrap();
        let exts = extensions(&theory);
        assert!(exts.is_empty());
        // Brave queries fail, skeptical ones hold vacuously.
        assert!(!query(&theory, &lit("a"), QueryMode::Brave));
        assert!(query(&theory, &lit("a"), QueryMode::Skeptical));
    }

    #[test]
    fn inconsistent_facts_give_the_inconsistent_extension() {
        let theory = parse_default_theory(
            "fact: a & -a.\nd: true : b / b.\n",
        )
        .unwrap();
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 1);
        assert!(exts.extensions[0].literals.is_inconsistent());
        assert!(exts.extensions[0].generating.is_empty());
        assert!(query(&theory, &lit("anything"), QueryMode::Brave));
    }

    #[test]
    fn justification_free_defaults_can_derive_inconsistency() {
        let theory = parse_default_theory("fact: a.\nd: a : / -a.\n").unwrap();
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 1);
        assert!(exts.extensions[0].literals.is_inconsistent());
        assert_eq!(exts.extensions[0].generating, BTreeSet::from([0]));
    }

    #[test]
    fn inference_chains_need_no_branching() {
        let theory = parse_default_theory(
            "fact: a.\nd: a : / b.\nd: b : / c.\nd: z : / w.\n",
        )
        .unwrap();
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 1);
        assert_eq!(exts.extensions[0].literals, LitSet::Consistent(conj("a & b & c")));
        assert_eq!(exts.extensions[0].generating, BTreeSet::from([0, 1]));
    }

    #[test]
    fn translated_even_loop_has_two_extensions() {
        let gp = ground(&parse_program("a :- not b. b :- not a.").unwrap()).unwrap();
        let theory = program_to_defaults(&gp).unwrap();
        assert_eq!(theory.defaults.len(), 2);
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 2);
        let sets: BTreeSet<BTreeSet<String>> =
            exts.extensions.iter().map(positive_atoms).collect();
        let expected: BTreeSet<BTreeSet<String>> = [
            BTreeSet::from(["a".to_string()]),
            BTreeSet::from(["b".to_string()]),
        ]
        .into();
        assert_eq!(sets, expected);
    }

    #[test]
    fn translated_constraint_kills_extensions() {
        let gp = ground(&parse_program("a :- not b. :- a.").unwrap()).unwrap();
        let theory = program_to_defaults(&gp).unwrap();
        assert!(extensions(&theory).is_empty());
    }

    #[test]
    fn translated_constraint_spares_other_extensions() {
        let gp =
            ground(&parse_program("a :- not b. b :- not a. :- a.").unwrap()).unwrap();
        let theory = program_to_defaults(&gp).unwrap();
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 1);
        assert_eq!(
            positive_atoms(&exts.extensions[0]),
            BTreeSet::from(["b".to_string()])
        );
    }

    #[test]
    fn facts_translate_to_facts() {
        let gp = ground(&parse_program("a. b :- a.").unwrap()).unwrap();
        let theory = program_to_defaults(&gp).unwrap();
        assert_eq!(theory.facts, conj("a"));
        assert_eq!(theory.defaults.len(), 1);
        let exts = extensions(&theory);
        assert_eq!(exts.len(), 1);
        assert_eq!(exts.extensions[0].literals, LitSet::Consistent(conj("a & b")));
    }

    #[test]
    fn fresh_guard_names_avoid_program_atoms() {
        let gp = ground(&parse_program("f_1. :- f_1.").unwrap()).unwrap();
        let theory = program_to_defaults(&gp).unwrap();
        let guard = &theory.defaults[0].consequent;
        assert_eq!(guard.len(), 1);
        let name = &guard.first().unwrap().atom;
        assert_ne!(name, "f_1");
        assert!(name.starts_with("f_1"));
    }

    #[test]
    fn choice_and_cardinality_are_not_translatable() {
        let gp = ground(&parse_program("{a}.").unwrap()).unwrap();
        assert!(matches!(
            program_to_defaults(&gp),
            Err(TranslateError::Unsupported("a choice rule"))
        ));
        let gp = ground(&parse_program("{b}. a :- 1 { b }.").unwrap()).unwrap();
        assert!(program_to_defaults(&gp).is_err());
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let theory = parse_default_theory(
            "fact: bird & -penguin.\n\
             d: bird : flies / flies.\n\
             d: true : -clrd(v1,c2) / clrd(v1,c1).\n\
             d: a & b : / c.\n",
        )
        .unwrap();
        let text = theory.to_string();
        let reparsed = parse_default_theory(&text).unwrap();
        assert_eq!(theory, reparsed);
    }

    #[test]
    fn literal_parsing_accepts_compound_atoms() {
        assert_eq!(lit("-clrd(v1,c2)"), Lit::neg("clrd(v1,c2)"));
        assert_eq!(lit("ok"), Lit::pos("ok"));
        assert!("Pacifist".parse::<Lit>().is_err());
        assert!("".parse::<Lit>().is_err());
    }
}
