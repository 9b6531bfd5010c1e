//! Ground (variable-free) programs over dense atom ids.
//!
//! Grounding maps each distinct ground atom to an [`AtomId`], dense and
//! 1-based, assigned in first-occurrence order so that two runs over the same
//! input number atoms identically. Rules here carry no builtins: those are
//! evaluated away during grounding.

use crate::ast::{Atom, HeadKind};
use std::collections::HashMap;
use std::fmt;

/// Dense 1-based id of a ground atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    /// Zero-based index for vector addressing.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        AtomId(i as u32 + 1)
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijection between ground atoms and ids, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id of `atom`, allocating the next id on first sight.
    pub fn intern(&mut self, atom: &Atom) -> AtomId {
        debug_assert!(atom.is_ground(), "cannot intern non-ground atom {atom}");
        if let Some(&id) = self.index.get(atom) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32 + 1);
        self.atoms.push(atom.clone());
        self.index.insert(atom.clone(), id);
        id
    }

    pub fn lookup(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    /// Looks an atom up by its printed name, e.g. `clrd(v1,c2)`.
    pub fn lookup_name(&self, name: &str) -> Option<AtomId> {
        self.atoms
            .iter()
            .position(|a| a.to_string() == name)
            .map(AtomId::from_index)
    }

    pub fn get(&self, id: AtomId) -> &Atom {
        &self.atoms[id.index()]
    }

    pub fn name(&self, id: AtomId) -> String {
        self.get(id).to_string()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &Atom)> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (AtomId::from_index(i), a))
    }
}

/// Ground cardinality body literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundCard {
    pub lower: u32,
    pub upper: Option<u32>,
    pub elements: Vec<AtomId>,
}

/// Ground rule. Same head conventions as [`crate::ast::Rule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub kind: HeadKind,
    pub heads: Vec<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
    pub cards: Vec<GroundCard>,
}

impl GroundRule {
    pub fn fact(head: AtomId) -> Self {
        GroundRule {
            kind: HeadKind::Normal,
            heads: vec![head],
            pos: Vec::new(),
            neg: Vec::new(),
            cards: Vec::new(),
        }
    }
}

/// A fully instantiated program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub atoms: AtomTable,
    pub rules: Vec<GroundRule>,
}

impl GroundProgram {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn has_cardinality(&self) -> bool {
        self.rules.iter().any(|r| !r.cards.is_empty())
    }

    pub fn has_choice(&self) -> bool {
        self.rules.iter().any(|r| r.kind == HeadKind::Choice)
    }

    /// True when every id referenced by a rule resolves in the atom table.
    pub fn ids_in_table(&self) -> bool {
        let n = self.atoms.len() as u32;
        let ok = |id: &AtomId| id.0 >= 1 && id.0 <= n;
        self.rules.iter().all(|r| {
            r.heads.iter().all(ok)
                && r.pos.iter().all(ok)
                && r.neg.iter().all(ok)
                && r.cards.iter().all(|c| c.elements.iter().all(ok))
        })
    }

    fn fmt_rule(&self, r: &GroundRule, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match r.kind {
            HeadKind::Normal => write!(f, "{}", self.atoms.get(r.heads[0]))?,
            HeadKind::Constraint => {}
            HeadKind::Choice => {
                write!(f, "{{ ")?;
                for (i, h) in r.heads.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", self.atoms.get(*h))?;
                }
                write!(f, " }}")?;
            }
        }
        let has_body = !r.pos.is_empty() || !r.neg.is_empty() || !r.cards.is_empty();
        if has_body || r.kind == HeadKind::Constraint {
            if r.kind != HeadKind::Constraint {
                write!(f, " ")?;
            }
            write!(f, ":- ")?;
            let mut first = true;
            let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
                if first {
                    first = false;
                    Ok(())
                } else {
                    write!(f, ", ")
                }
            };
            for a in &r.pos {
                sep(f)?;
                write!(f, "{}", self.atoms.get(*a))?;
            }
            for a in &r.neg {
                sep(f)?;
                write!(f, "not {}", self.atoms.get(*a))?;
            }
            for c in &r.cards {
                sep(f)?;
                if c.lower > 0 {
                    write!(f, "{} ", c.lower)?;
                }
                write!(f, "{{ ")?;
                for (i, e) in c.elements.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", self.atoms.get(*e))?;
                }
                write!(f, " }}")?;
                if let Some(u) = c.upper {
                    write!(f, " {u}")?;
                }
            }
        }
        write!(f, ".")
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            self.fmt_rule(r, f)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Three-valued assignment state of one atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

/// One trail record: which atom was set, to what, at which decision level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub atom: AtomId,
    pub value: bool,
    pub level: u32,
}

/// Partial assignment with a replayable trail.
///
/// The trail records assignments in the order they were made; popping it back
/// to a level restores the value map exactly. An atom is never on the trail
/// twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Truth>,
    trail: Vec<TrailEntry>,
}

impl Assignment {
    pub fn new(num_atoms: usize) -> Self {
        Assignment {
            values: vec![Truth::Unknown; num_atoms],
            trail: Vec::new(),
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, atom: AtomId) -> Truth {
        self.values[atom.index()]
    }

    pub fn is_assigned(&self, atom: AtomId) -> bool {
        self.value(atom) != Truth::Unknown
    }

    /// Sets an unassigned atom. Panics if it already has a value.
    pub fn assign(&mut self, atom: AtomId, value: bool, level: u32) {
        assert_eq!(
            self.values[atom.index()],
            Truth::Unknown,
            "atom {atom} assigned twice"
        );
        self.values[atom.index()] = if value { Truth::True } else { Truth::False };
        self.trail.push(TrailEntry { atom, value, level });
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    /// Undoes every assignment made above `level`, returning the popped
    /// entries newest-first.
    pub fn backtrack_to(&mut self, level: u32) -> Vec<TrailEntry> {
        let mut popped = Vec::new();
        while let Some(e) = self.trail.last().copied() {
            if e.level <= level {
                break;
            }
            self.trail.pop();
            self.values[e.atom.index()] = Truth::Unknown;
            popped.push(e);
        }
        popped
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| *v != Truth::Unknown)
    }

    /// Atoms currently true, ascending.
    pub fn true_atoms(&self) -> Vec<AtomId> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == Truth::True)
            .map(|(i, _)| AtomId::from_index(i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intern_is_a_bijection_in_first_occurrence_order() {
        let mut t = AtomTable::new();
        let a = Atom::prop("a");
        let b = Atom::prop("b");
        let ia = t.intern(&a);
        let ib = t.intern(&b);
        assert_eq!(ia, AtomId(1));
        assert_eq!(ib, AtomId(2));
        assert_eq!(t.intern(&a), ia, "re-interning must return the same id");
        assert_eq!(t.get(ia), &a);
        assert_eq!(t.lookup(&b), Some(ib));
        assert_eq!(t.lookup_name("b"), Some(ib));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn trail_replay_and_backtrack() {
        let mut a = Assignment::new(3);
        a.assign(AtomId(1), true, 0);
        a.assign(AtomId(2), false, 1);
        a.assign(AtomId(3), true, 2);
        assert!(a.is_total());
        assert_eq!(a.true_atoms(), vec![AtomId(1), AtomId(3)]);
        let popped = a.backtrack_to(0);
        assert_eq!(popped.len(), 2);
        assert_eq!(popped[0].atom, AtomId(3));
        assert_eq!(a.value(AtomId(2)), Truth::Unknown);
        assert_eq!(a.value(AtomId(1)), Truth::True);
    }

    #[test]
    #[should_panic(expected = "assigned twice")]
    fn double_assignment_panics() {
        let mut a = Assignment::new(1);
        a.assign(AtomId(1), true, 0);
        a.assign(AtomId(1), false, 0);
    }

    #[test]
    fn ground_program_prints_canonical_text() {
        let mut gp = GroundProgram::default();
        let a = gp.atoms.intern(&Atom::prop("a"));
        let b = gp.atoms.intern(&Atom::prop("b"));
        gp.rules.push(GroundRule {
            kind: HeadKind::Normal,
            heads: vec![a],
            pos: vec![],
            neg: vec![b],
            cards: vec![],
        });
        gp.rules.push(GroundRule::fact(b));
        gp.rules.push(GroundRule {
            kind: HeadKind::Constraint,
            heads: vec![],
            pos: vec![a, b],
            neg: vec![],
            cards: vec![],
        });
        assert_eq!(gp.to_string(), "a :- not b.\nb.\n:- a, b.\n");
        assert!(gp.ids_in_table());
    }
}
