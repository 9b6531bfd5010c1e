//! Backtracking search for stable models.
//!
//! The search assigns truth values to atoms one decision at a time, and
//! between decisions runs a propagation fixpoint built from per-rule
//! counters: forward firing, all-supports-falsified, backchaining over the
//! last live support, constraint and cardinality criticality, and an
//! unfounded-set pass that computes an optimistic derivability bound and
//! falsifies everything outside it. Backtracking is chronological: the most
//! recent unflipped decision is reversed on conflict. Every total assignment
//! that survives propagation is re-checked with the oracle before it is
//! reported, which keeps extended constructs honest at negligible cost.

use crate::ast::HeadKind;
use crate::ground::{Assignment, AtomId, GroundProgram, Truth};
use crate::oracle::{self, ModelSet, PositiveProgram, PositiveRule};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Highest occurrence count among unresolved rules, ties by lowest id.
    Occurrence,
    /// Lowest unassigned atom id.
    FirstUnassigned,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Stop after this many models; 0 enumerates all of them.
    pub max_models: usize,
    pub heuristic: Heuristic,
    /// Reserved for randomized tie-breaking. The built-in heuristics are
    /// deterministic and ignore it.
    pub seed: u64,
    /// Abort with the models found so far once this many conflicts occur.
    pub conflict_limit: Option<u64>,
    /// Failed-literal probing before each decision. Off by default; it
    /// shrinks the tree on hard instances but costs a propagation round per
    /// unassigned atom.
    pub lookahead: bool,
    /// Recompute every counter from scratch after each propagation fixpoint
    /// and panic on drift. Test instrumentation.
    pub check_counters: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_models: 0,
            heuristic: Heuristic::Occurrence,
            seed: 0,
            conflict_limit: None,
            lookahead: false,
            check_counters: false,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("conflict limit {limit} exceeded; {} models found before stopping", found.len())]
    ConflictLimit { limit: u64, found: ModelSet },
}

#[derive(Debug, Clone, Default)]
pub struct SolveResult {
    /// Models in discovery order.
    pub models: ModelSet,
    /// True when enumeration stopped at `max_models`.
    pub truncated: bool,
}

/// Outcome of propagating an assignment to fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint(Assignment),
    Conflict,
}

struct Conflict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CardStatus {
    Open,
    MustTrue,
    MustFalse,
}

#[derive(Debug, Clone)]
struct CoreCard {
    lower: u32,
    upper: Option<u32>,
    elements: Vec<AtomId>,
}

/// Counter state for one search. The assignment trail doubles as the
/// propagation queue: `applied` marks how many trail entries have had their
/// counter effects applied, and backtracking reverses exactly the applied
/// prefix of what it pops.
struct Core<'p> {
    gp: &'p GroundProgram,
    check_counters: bool,
    n: usize,
    cards: Vec<Vec<CoreCard>>,
    cond_total: Vec<u32>,
    pos_occ: Vec<Vec<u32>>,
    neg_occ: Vec<Vec<u32>>,
    head_occ: Vec<Vec<u32>>,
    card_occ: Vec<Vec<(u32, u32)>>,
    cond_true: Vec<u32>,
    cond_false: Vec<u32>,
    card_true: Vec<Vec<u32>>,
    card_false: Vec<Vec<u32>>,
    live_support: Vec<u32>,
    assignment: Assignment,
    applied: usize,
    level: u32,
}

impl<'p> Core<'p> {
    fn new(gp: &'p GroundProgram, cfg: &SearchConfig) -> Self {
        let n = gp.atom_count();
        let nr = gp.rules.len();
        let mut core = Core {
            gp,
            check_counters: cfg.check_counters,
            n,
            cards: Vec::with_capacity(nr),
            cond_total: vec![0; nr],
            pos_occ: vec![Vec::new(); n],
            neg_occ: vec![Vec::new(); n],
            head_occ: vec![Vec::new(); n],
            card_occ: vec![Vec::new(); n],
            cond_true: vec![0; nr],
            cond_false: vec![0; nr],
            card_true: Vec::with_capacity(nr),
            card_false: Vec::with_capacity(nr),
            live_support: vec![0; n],
            assignment: Assignment::new(n),
            applied: 0,
            level: 0,
        };
        for (ri, r) in gp.rules.iter().enumerate() {
            let ri32 = ri as u32;
            for &a in &r.pos {
                core.pos_occ[a.index()].push(ri32);
            }
            for &a in &r.neg {
                core.neg_occ[a.index()].push(ri32);
            }
            for &h in &r.heads {
                core.head_occ[h.index()].push(ri32);
            }
            let mut rule_cards = Vec::with_capacity(r.cards.len());
            for (ci, c) in r.cards.iter().enumerate() {
                let mut elements: Vec<AtomId> = Vec::with_capacity(c.elements.len());
                for &e in &c.elements {
                    if !elements.contains(&e) {
                        elements.push(e);
                        core.card_occ[e.index()].push((ri32, ci as u32));
                    }
                }
                debug_assert!(c.upper.is_none_or(|u| c.lower <= u));
                rule_cards.push(CoreCard { lower: c.lower, upper: c.upper, elements });
            }
            core.cond_total[ri] =
                (r.pos.len() + r.neg.len() + rule_cards.len()) as u32;
            core.card_true.push(vec![0; rule_cards.len()]);
            core.card_false.push(vec![0; rule_cards.len()]);
            core.cards.push(rule_cards);
        }
        // Cards can be decided before any element is: a zero lower bound may
        // already hold, an unreachable lower bound already fail.
        for ri in 0..nr {
            for ci in 0..core.cards[ri].len() {
                match core.card_status(ri, ci) {
                    CardStatus::MustTrue => core.cond_true[ri] += 1,
                    CardStatus::MustFalse => core.cond_false[ri] += 1,
                    CardStatus::Open => {}
                }
            }
        }
        for (ri, r) in gp.rules.iter().enumerate() {
            if core.cond_false[ri] == 0 {
                for &h in &r.heads {
                    core.live_support[h.index()] += 1;
                }
            }
        }
        core
    }

    fn card_status(&self, ri: usize, ci: usize) -> CardStatus {
        let c = &self.cards[ri][ci];
        let t = self.card_true[ri][ci];
        let possible = c.elements.len() as u32 - self.card_false[ri][ci];
        if possible < c.lower || c.upper.is_some_and(|u| t > u) {
            CardStatus::MustFalse
        } else if t >= c.lower && c.upper.is_none_or(|u| possible <= u) {
            CardStatus::MustTrue
        } else {
            CardStatus::Open
        }
    }

    /// Assigns `atom` to `value` at the current level, or reports a conflict
    /// when it already holds the opposite value. Counter effects are applied
    /// later, when the trail entry is drained.
    fn force(&mut self, atom: AtomId, value: bool) -> Result<(), Conflict> {
        match self.assignment.value(atom) {
            Truth::Unknown => {
                self.assignment.assign(atom, value, self.level);
                Ok(())
            }
            Truth::True if value => Ok(()),
            Truth::False if !value => Ok(()),
            _ => Err(Conflict),
        }
    }

    /// Structural consequences that hold before any decision: atoms without
    /// a single potentially-supporting rule are false, rules whose body is
    /// already satisfied fire.
    fn seed_initial(&mut self) -> Result<(), Conflict> {
        for i in 0..self.n {
            if self.live_support[i] == 0 {
                self.force(AtomId::from_index(i), false)?;
            }
        }
        for (ri, r) in self.gp.rules.iter().enumerate() {
            if self.cond_false[ri] == 0 && self.cond_true[ri] == self.cond_total[ri] {
                match r.kind {
                    HeadKind::Normal => self.force(r.heads[0], true)?,
                    HeadKind::Constraint => return Err(Conflict),
                    HeadKind::Choice => {}
                }
            }
        }
        Ok(())
    }

    fn drain(&mut self) -> Result<(), Conflict> {
        while self.applied < self.assignment.trail().len() {
            let e = self.assignment.trail()[self.applied];
            self.applied += 1;
            self.apply_assignment(e.atom, e.value)?;
        }
        Ok(())
    }

    /// Applies one trail entry's counter effects. Every counter update runs
    /// to completion even when a conflict surfaces partway through: `undo_to`
    /// reverses applied entries wholesale, so partial application would
    /// corrupt the counters. Conflicts are collected and reported at the end.
    fn apply_assignment(&mut self, atom: AtomId, value: bool) -> Result<(), Conflict> {
        let i = atom.index();
        let mut outcome = Ok(());
        let note = |r: Result<(), Conflict>, outcome: &mut Result<(), Conflict>| {
            if r.is_err() {
                *outcome = Err(Conflict);
            }
        };
        if value {
            if self.live_support[i] == 0 {
                outcome = Err(Conflict);
            }
            for k in 0..self.pos_occ[i].len() {
                let r = self.pos_occ[i][k] as usize;
                note(self.cond_became_true(r), &mut outcome);
            }
            for k in 0..self.neg_occ[i].len() {
                let r = self.neg_occ[i][k] as usize;
                note(self.cond_became_false(r), &mut outcome);
            }
            for k in 0..self.card_occ[i].len() {
                let (r, ci) = self.card_occ[i][k];
                note(self.card_elem(r as usize, ci as usize, true), &mut outcome);
            }
        } else {
            for k in 0..self.pos_occ[i].len() {
                let r = self.pos_occ[i][k] as usize;
                note(self.cond_became_false(r), &mut outcome);
            }
            for k in 0..self.neg_occ[i].len() {
                let r = self.neg_occ[i][k] as usize;
                note(self.cond_became_true(r), &mut outcome);
            }
            for k in 0..self.card_occ[i].len() {
                let (r, ci) = self.card_occ[i][k];
                note(self.card_elem(r as usize, ci as usize, false), &mut outcome);
            }
        }
        outcome
    }

    fn cond_became_true(&mut self, r: usize) -> Result<(), Conflict> {
        self.cond_true[r] += 1;
        if self.cond_true[r] == self.cond_total[r] {
            match self.gp.rules[r].kind {
                HeadKind::Normal => self.force(self.gp.rules[r].heads[0], true)?,
                HeadKind::Constraint => return Err(Conflict),
                HeadKind::Choice => {}
            }
        } else {
            self.check_constraint_forcing(r)?;
        }
        Ok(())
    }

    fn cond_became_false(&mut self, r: usize) -> Result<(), Conflict> {
        self.cond_false[r] += 1;
        let mut outcome = Ok(());
        if self.cond_false[r] == 1 {
            // The rule just died; its heads each lose one live support. The
            // loop must finish even on conflict so the supports stay exact.
            for k in 0..self.gp.rules[r].heads.len() {
                let h = self.gp.rules[r].heads[k];
                self.live_support[h.index()] -= 1;
                if self.live_support[h.index()] == 0 && self.force(h, false).is_err() {
                    outcome = Err(Conflict);
                }
            }
        }
        outcome
    }

    fn card_elem(&mut self, r: usize, ci: usize, value: bool) -> Result<(), Conflict> {
        let pre = self.card_status(r, ci);
        if value {
            self.card_true[r][ci] += 1;
        } else {
            self.card_false[r][ci] += 1;
        }
        let post = self.card_status(r, ci);
        match (pre, post) {
            (CardStatus::Open, CardStatus::MustTrue) => self.cond_became_true(r),
            (CardStatus::Open, CardStatus::MustFalse) => self.cond_became_false(r),
            _ => {
                // Still open, but the counts moved: a constraint waiting on
                // this card may have become critical.
                if self.gp.rules[r].kind == HeadKind::Constraint {
                    self.check_constraint_forcing(r)?;
                }
                Ok(())
            }
        }
    }

    /// When all but one condition of a live constraint hold, the remaining
    /// one must fail.
    fn check_constraint_forcing(&mut self, r: usize) -> Result<(), Conflict> {
        if self.gp.rules[r].kind != HeadKind::Constraint
            || self.cond_false[r] != 0
            || self.cond_true[r] + 1 != self.cond_total[r]
        {
            return Ok(());
        }
        for k in 0..self.gp.rules[r].pos.len() {
            let a = self.gp.rules[r].pos[k];
            if self.assignment.value(a) == Truth::Unknown {
                return self.force(a, false);
            }
        }
        for k in 0..self.gp.rules[r].neg.len() {
            let a = self.gp.rules[r].neg[k];
            if self.assignment.value(a) == Truth::Unknown {
                return self.force(a, true);
            }
        }
        for ci in 0..self.cards[r].len() {
            if self.card_status(r, ci) == CardStatus::Open {
                return self.require_card_false(r, ci);
            }
        }
        // The unknown condition may already be assigned but not yet drained;
        // the pending trail entry will re-trigger this check.
        Ok(())
    }

    /// The card must end up satisfied: force elements pinned by a critical
    /// bound.
    fn require_card_true(&mut self, r: usize, ci: usize) -> Result<(), Conflict> {
        match self.card_status(r, ci) {
            CardStatus::MustFalse => Err(Conflict),
            CardStatus::MustTrue => Ok(()),
            CardStatus::Open => {
                let c = &self.cards[r][ci];
                let t = self.card_true[r][ci];
                let possible = c.elements.len() as u32 - self.card_false[r][ci];
                let elements = c.elements.clone();
                if c.upper == Some(t) {
                    // At the ceiling: everything still open stays out.
                    for e in elements {
                        if self.assignment.value(e) == Truth::Unknown {
                            self.force(e, false)?;
                        }
                    }
                } else if possible == c.lower {
                    // No slack below: every non-false element is needed.
                    for e in elements {
                        if self.assignment.value(e) == Truth::Unknown {
                            self.force(e, true)?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// The card must end up violated: force elements when only one way out
    /// of the bound interval remains.
    fn require_card_false(&mut self, r: usize, ci: usize) -> Result<(), Conflict> {
        match self.card_status(r, ci) {
            CardStatus::MustTrue => Err(Conflict),
            CardStatus::MustFalse => Ok(()),
            CardStatus::Open => {
                let c = &self.cards[r][ci];
                let t = self.card_true[r][ci];
                let possible = c.elements.len() as u32 - self.card_false[r][ci];
                let elements = c.elements.clone();
                if t >= c.lower {
                    // Can no longer finish below the lower bound, so the
                    // count must overshoot the upper one.
                    let Some(u) = c.upper else { return Err(Conflict) };
                    if possible <= u {
                        return Err(Conflict);
                    }
                    if possible == u + 1 {
                        for e in elements {
                            if self.assignment.value(e) == Truth::Unknown {
                                self.force(e, true)?;
                            }
                        }
                    }
                } else {
                    let can_overshoot = c.upper.is_some_and(|u| possible > u);
                    if !can_overshoot && t + 1 == c.lower {
                        for e in elements {
                            if self.assignment.value(e) == Truth::Unknown {
                                self.force(e, false)?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// A true atom whose live support shrank to a single rule needs that
    /// rule's body to hold.
    fn backchain_sweep(&mut self) -> Result<(), Conflict> {
        for i in 0..self.n {
            if self.assignment.value(AtomId::from_index(i)) != Truth::True
                || self.live_support[i] != 1
            {
                continue;
            }
            let r = self.head_occ[i]
                .iter()
                .map(|&r| r as usize)
                .find(|&r| self.cond_false[r] == 0)
                .expect("live support count says one head rule is live");
            for k in 0..self.gp.rules[r].pos.len() {
                let a = self.gp.rules[r].pos[k];
                self.force(a, true)?;
            }
            for k in 0..self.gp.rules[r].neg.len() {
                let a = self.gp.rules[r].neg[k];
                self.force(a, false)?;
            }
            for ci in 0..self.cards[r].len() {
                self.require_card_true(r, ci)?;
            }
        }
        Ok(())
    }

    /// Computes the optimistic derivability bound: the least model of the
    /// live rules read positively, with negative literals assumed satisfied
    /// and false atoms removed. Anything outside the bound is unfounded and
    /// forced false; a true atom outside it is a conflict.
    fn unfounded_pass(&mut self) -> Result<(), Conflict> {
        let mut pp = PositiveProgram { atom_count: self.n, rules: Vec::new() };
        for (ri, r) in self.gp.rules.iter().enumerate() {
            if r.kind == HeadKind::Constraint || self.cond_false[ri] > 0 {
                continue;
            }
            let lower_cards: Vec<(u32, Vec<AtomId>)> = self.cards[ri]
                .iter()
                .map(|c| {
                    let alive: Vec<AtomId> = c
                        .elements
                        .iter()
                        .copied()
                        .filter(|&e| self.assignment.value(e) != Truth::False)
                        .collect();
                    (c.lower, alive)
                })
                .collect();
            for &h in &r.heads {
                if self.assignment.value(h) == Truth::False {
                    continue;
                }
                pp.rules.push(PositiveRule {
                    head: h,
                    body: r.pos.clone(),
                    lower_cards: lower_cards.clone(),
                });
            }
        }
        let atmost = oracle::least_model(&pp);
        for i in 0..self.n {
            let a = AtomId::from_index(i);
            if atmost.contains(&a) {
                continue;
            }
            match self.assignment.value(a) {
                Truth::True => return Err(Conflict),
                Truth::Unknown => self.force(a, false)?,
                Truth::False => {}
            }
        }
        Ok(())
    }

    fn propagate_fixpoint(&mut self) -> Result<(), Conflict> {
        loop {
            self.drain()?;
            let before = self.assignment.trail().len();
            self.backchain_sweep()?;
            if self.assignment.trail().len() != before {
                continue;
            }
            self.unfounded_pass()?;
            if self.assignment.trail().len() == before {
                break;
            }
        }
        if self.check_counters {
            self.verify_counters();
        }
        Ok(())
    }

    /// Undoes all assignments above `level`, reversing counter updates for
    /// the prefix of popped entries that had been applied.
    fn undo_to(&mut self, level: u32) {
        let popped = self.assignment.backtrack_to(level);
        let new_len = self.assignment.trail().len();
        for (j, e) in popped.iter().enumerate() {
            // popped is newest-first; recover each entry's old trail index.
            let idx = new_len + popped.len() - 1 - j;
            if idx < self.applied {
                self.unapply_assignment(e.atom, e.value);
            }
        }
        self.applied = self.applied.min(new_len);
        debug_assert_eq!(self.applied, new_len, "unapplied entries below backtrack level");
        self.level = level;
    }

    fn unapply_assignment(&mut self, atom: AtomId, value: bool) {
        let i = atom.index();
        if value {
            for k in 0..self.pos_occ[i].len() {
                let r = self.pos_occ[i][k] as usize;
                self.cond_true[r] -= 1;
            }
            for k in 0..self.neg_occ[i].len() {
                let r = self.neg_occ[i][k] as usize;
                self.uncond_false(r);
            }
            for k in 0..self.card_occ[i].len() {
                let (r, ci) = self.card_occ[i][k];
                self.card_unelem(r as usize, ci as usize, true);
            }
        } else {
            for k in 0..self.pos_occ[i].len() {
                let r = self.pos_occ[i][k] as usize;
                self.uncond_false(r);
            }
            for k in 0..self.neg_occ[i].len() {
                let r = self.neg_occ[i][k] as usize;
                self.cond_true[r] -= 1;
            }
            for k in 0..self.card_occ[i].len() {
                let (r, ci) = self.card_occ[i][k];
                self.card_unelem(r as usize, ci as usize, false);
            }
        }
    }

    fn uncond_false(&mut self, r: usize) {
        self.cond_false[r] -= 1;
        if self.cond_false[r] == 0 {
            // The rule revives; exact inverse of the death transition.
            for k in 0..self.gp.rules[r].heads.len() {
                let h = self.gp.rules[r].heads[k];
                self.live_support[h.index()] += 1;
            }
        }
    }

    fn card_unelem(&mut self, r: usize, ci: usize, value: bool) {
        let post = self.card_status(r, ci);
        if value {
            self.card_true[r][ci] -= 1;
        } else {
            self.card_false[r][ci] -= 1;
        }
        let pre = self.card_status(r, ci);
        match (pre, post) {
            (CardStatus::Open, CardStatus::MustTrue) => self.cond_true[r] -= 1,
            (CardStatus::Open, CardStatus::MustFalse) => self.uncond_false(r),
            _ => {}
        }
    }

    fn pick_branch_atom(&self, heuristic: Heuristic) -> Option<AtomId> {
        let first_unassigned = (0..self.n)
            .map(AtomId::from_index)
            .find(|&a| self.assignment.value(a) == Truth::Unknown);
        match heuristic {
            Heuristic::FirstUnassigned => first_unassigned,
            Heuristic::Occurrence => {
                let mut counts = vec![0u32; self.n];
                for (ri, r) in self.gp.rules.iter().enumerate() {
                    if self.cond_false[ri] > 0 || self.cond_true[ri] == self.cond_total[ri] {
                        continue;
                    }
                    for &h in &r.heads {
                        counts[h.index()] += 1;
                    }
                    for &a in &r.pos {
                        counts[a.index()] += 1;
                    }
                    for &a in &r.neg {
                        counts[a.index()] += 1;
                    }
                    for c in &self.cards[ri] {
                        for &e in &c.elements {
                            counts[e.index()] += 1;
                        }
                    }
                }
                let mut best: Option<(u32, AtomId)> = None;
                for i in 0..self.n {
                    let a = AtomId::from_index(i);
                    if self.assignment.value(a) != Truth::Unknown {
                        continue;
                    }
                    if best.is_none_or(|(c, _)| counts[i] > c) {
                        best = Some((counts[i], a));
                    }
                }
                best.map(|(_, a)| a).or(first_unassigned)
            }
        }
    }

    /// Failed-literal probing: try each unassigned atom true; when that
    /// conflicts, the atom must be false. Probe conflicts do not count
    /// against the conflict limit.
    fn lookahead_round(&mut self) -> Result<bool, Conflict> {
        let mut changed = false;
        for i in 0..self.n {
            let a = AtomId::from_index(i);
            if self.assignment.value(a) != Truth::Unknown {
                continue;
            }
            let saved = self.level;
            self.level = saved + 1;
            self.force(a, true).ok().expect("atom was unassigned");
            let failed = self.propagate_fixpoint().is_err();
            self.undo_to(saved);
            if failed {
                self.force(a, false)?;
                self.propagate_fixpoint()?;
                changed = true;
            }
        }
        Ok(changed)
    }

    /// Recomputes every counter from the assignment and panics on drift.
    fn verify_counters(&self) {
        let val = |a: AtomId| self.assignment.value(a);
        let mut live = vec![0u32; self.n];
        for (ri, r) in self.gp.rules.iter().enumerate() {
            let mut ct = 0u32;
            let mut cf = 0u32;
            for &a in &r.pos {
                match val(a) {
                    Truth::True => ct += 1,
                    Truth::False => cf += 1,
                    Truth::Unknown => {}
                }
            }
            for &a in &r.neg {
                match val(a) {
                    Truth::True => cf += 1,
                    Truth::False => ct += 1,
                    Truth::Unknown => {}
                }
            }
            for (ci, c) in self.cards[ri].iter().enumerate() {
                let t = c.elements.iter().filter(|&&e| val(e) == Truth::True).count() as u32;
                let f = c.elements.iter().filter(|&&e| val(e) == Truth::False).count() as u32;
                assert_eq!(
                    (self.card_true[ri][ci], self.card_false[ri][ci]),
                    (t, f),
                    "card counters drifted for rule {ri} card {ci}"
                );
                match self.card_status(ri, ci) {
                    CardStatus::MustTrue => ct += 1,
                    CardStatus::MustFalse => cf += 1,
                    CardStatus::Open => {}
                }
            }
            assert_eq!(
                (self.cond_true[ri], self.cond_false[ri]),
                (ct, cf),
                "condition counters drifted for rule {ri}"
            );
            if cf == 0 {
                for &h in &r.heads {
                    live[h.index()] += 1;
                }
            }
        }
        assert_eq!(self.live_support, live, "live support counters drifted");
    }
}

#[derive(Debug, Clone, Copy)]
struct Decision {
    atom: AtomId,
    flipped: bool,
}

/// Propagates `given` to fixpoint over `gp`, together with the structural
/// consequences that hold in every stable model (facts fire, unsupported
/// atoms are false). Returns the extended assignment, or `Conflict` when
/// some atom is forced both ways.
pub fn propagate(gp: &GroundProgram, given: &Assignment) -> Propagation {
    let cfg = SearchConfig::default();
    let mut core = Core::new(gp, &cfg);
    if core.seed_initial().is_err() {
        return Propagation::Conflict;
    }
    for e in given.trail() {
        if core.force(e.atom, e.value).is_err() {
            return Propagation::Conflict;
        }
    }
    match core.propagate_fixpoint() {
        Ok(()) => Propagation::Fixpoint(core.assignment),
        Err(Conflict) => Propagation::Conflict,
    }
}

/// Delegates to the oracle's stability test.
pub fn check_model(gp: &GroundProgram, atoms: &BTreeSet<AtomId>) -> bool {
    oracle::is_stable(gp, atoms)
}

pub fn solve(gp: &GroundProgram, cfg: &SearchConfig) -> Result<SolveResult, SolveError> {
    solve_with(gp, cfg, |_, _| {})
}

/// Enumerates stable models, invoking `on_model(index, atoms)` as each one
/// is found (1-based, atoms ascending).
pub fn solve_with(
    gp: &GroundProgram,
    cfg: &SearchConfig,
    mut on_model: impl FnMut(usize, &[AtomId]),
) -> Result<SolveResult, SolveError> {
    let mut core = Core::new(gp, cfg);
    let mut decisions: Vec<Decision> = Vec::new();
    let mut result = SolveResult::default();
    let mut conflicts: u64 = 0;

    if core.seed_initial().is_err() {
        return Ok(result);
    }
    loop {
        match core.propagate_fixpoint() {
            Err(Conflict) => {
                conflicts += 1;
                if let Some(limit) = cfg.conflict_limit {
                    if conflicts > limit {
                        return Err(SolveError::ConflictLimit { limit, found: result.models });
                    }
                }
                if !backtrack_flip(&mut core, &mut decisions) {
                    break;
                }
            }
            Ok(()) => {
                if core.assignment.is_total() {
                    let atoms = core.assignment.true_atoms();
                    let set: BTreeSet<AtomId> = atoms.iter().copied().collect();
                    if oracle::is_stable(gp, &set) {
                        result.models.models.push(atoms.clone());
                        on_model(result.models.len(), &atoms);
                        if cfg.max_models > 0 && result.models.len() == cfg.max_models {
                            result.truncated = true;
                            break;
                        }
                    } else if !gp.has_cardinality() {
                        // Propagation provably subsumes the guard on programs
                        // without cardinality bounds; a rejection there is a
                        // propagation bug worth hearing about.
                        eprintln!(
                            "warning: stability guard rejected a propagated total assignment"
                        );
                    }
                    if !backtrack_flip(&mut core, &mut decisions) {
                        break;
                    }
                } else {
                    if cfg.lookahead {
                        match core.lookahead_round() {
                            Ok(true) => continue,
                            Ok(false) => {}
                            Err(Conflict) => {
                                conflicts += 1;
                                if let Some(limit) = cfg.conflict_limit {
                                    if conflicts > limit {
                                        return Err(SolveError::ConflictLimit {
                                            limit,
                                            found: result.models,
                                        });
                                    }
                                }
                                if !backtrack_flip(&mut core, &mut decisions) {
                                    break;
                                }
                                continue;
                            }
                        }
                    }
                    let atom = core
                        .pick_branch_atom(cfg.heuristic)
                        .expect("a non-total assignment has an unassigned atom");
                    decisions.push(Decision { atom, flipped: false });
                    core.level = decisions.len() as u32;
                    core.force(atom, true)
                        .ok()
                        .expect("branch atom was unassigned");
                }
            }
        }
    }
    Ok(result)
}

/// Chronological backtracking: undo to the newest unflipped decision and try
/// its other value. False once every branch is exhausted.
fn backtrack_flip(core: &mut Core<'_>, decisions: &mut Vec<Decision>) -> bool {
    while let Some(d) = decisions.pop() {
        core.undo_to(decisions.len() as u32);
        if !d.flipped {
            decisions.push(Decision { atom: d.atom, flipped: true });
            core.level = decisions.len() as u32;
            core.force(d.atom, false)
                .ok()
                .expect("atom is fresh after undo");
            return true;
        }
    }
    false
}
