//! Seeded random program corpora shared by the integration tests.
//!
//! Everything is a pure function of the seed, so a failing case reproduces
//! from the seed printed in the assertion message.

use microasp::ast::{Atom, Cardinality, CmpOp, Comparison, HeadKind, Literal, Program, Rule, Term};
use microasp::ground::{AtomId, GroundCard, GroundProgram, GroundRule};
use microasp::theorybase::Lcg64;
use std::collections::BTreeSet;

/// Shape knobs for [`random_ground_program`].
pub struct GroundGen {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub choice: bool,
    pub cards: bool,
}

impl GroundGen {
    /// Every construct the solver supports.
    pub fn full(max_atoms: usize, max_rules: usize) -> Self {
        GroundGen { max_atoms, max_rules, choice: true, cards: true }
    }

    /// Normal rules and constraints only, the fragment completion and the
    /// default-logic translation accept.
    pub fn normal_only(max_atoms: usize, max_rules: usize) -> Self {
        GroundGen { max_atoms, max_rules, choice: false, cards: false }
    }
}

fn pick(rng: &mut Lcg64, ids: &[AtomId]) -> AtomId {
    ids[rng.bounded(ids.len() as u64) as usize]
}

/// Up to `max` distinct atoms, possibly none.
fn pick_set(rng: &mut Lcg64, ids: &[AtomId], max: u64) -> Vec<AtomId> {
    let k = rng.bounded(max + 1);
    let mut set = BTreeSet::new();
    for _ in 0..k {
        set.insert(pick(rng, ids));
    }
    set.into_iter().collect()
}

fn random_card(rng: &mut Lcg64, ids: &[AtomId]) -> GroundCard {
    let mut elements = pick_set(rng, ids, 4);
    if elements.is_empty() {
        elements.push(pick(rng, ids));
    }
    let len = elements.len() as u64;
    // Mostly satisfiable bounds; now and then a lower bound beyond the
    // element count, which is legal but can never hold.
    let lower = if rng.bounded(8) == 0 {
        rng.bounded(len + 3) as u32
    } else {
        rng.bounded(len + 1) as u32
    };
    let upper = if rng.bounded(4) == 0 {
        None
    } else {
        let room = len + 1 - (lower as u64).min(len);
        Some(lower + rng.bounded(room) as u32)
    };
    GroundCard { lower, upper, elements }
}

fn random_rule(rng: &mut Lcg64, ids: &[AtomId], cfg: &GroundGen) -> GroundRule {
    let roll = rng.bounded(100);
    if roll < 15 {
        return GroundRule::fact(pick(rng, ids));
    }
    let pos = pick_set(rng, ids, 2);
    let mut neg = pick_set(rng, ids, 2);
    let mut cards = Vec::new();
    if cfg.cards && rng.bounded(4) == 0 {
        cards.push(random_card(rng, ids));
    }
    if cfg.choice && roll >= 80 {
        let mut heads = pick_set(rng, ids, 3);
        if heads.is_empty() {
            heads.push(pick(rng, ids));
        }
        return GroundRule { kind: HeadKind::Choice, heads, pos, neg, cards };
    }
    if roll >= 60 {
        // A constraint with an empty body kills every model; give it at
        // least one condition so most programs stay interesting.
        if pos.is_empty() && neg.is_empty() && cards.is_empty() {
            neg.push(pick(rng, ids));
        }
        return GroundRule { kind: HeadKind::Constraint, heads: Vec::new(), pos, neg, cards };
    }
    GroundRule { kind: HeadKind::Normal, heads: vec![pick(rng, ids)], pos, neg, cards }
}

/// A random ground program with 2 to `max_atoms` atoms and 1 to `max_rules`
/// rules, drawn from the constructs `cfg` allows.
pub fn random_ground_program(seed: u64, cfg: &GroundGen) -> GroundProgram {
    let mut rng = Lcg64::new(seed);
    let mut gp = GroundProgram::default();
    let n = 2 + rng.bounded(cfg.max_atoms as u64 - 1) as usize;
    let ids: Vec<AtomId> = (1..=n)
        .map(|i| gp.atoms.intern(&Atom::prop(format!("a{i}"))))
        .collect();
    let n_rules = 1 + rng.bounded(cfg.max_rules as u64) as usize;
    for _ in 0..n_rules {
        gp.rules.push(random_rule(&mut rng, &ids, cfg));
    }
    debug_assert!(gp.ids_in_table());
    gp
}

fn cv(name: &str) -> Term {
    Term::Constant(name.to_string())
}

fn vx() -> Term {
    Term::Variable("X".to_string())
}

fn vy() -> Term {
    Term::Variable("Y".to_string())
}

fn a1(pred: &str, t: Term) -> Atom {
    Atom::new(pred, vec![t])
}

/// A random non-ground program over a small constant pool, assembled from
/// rule templates that are safe and arity-consistent by construction. The
/// naive instantiation never exceeds 20 ground atoms: three constants come
/// with unary predicates only, the binary predicate only ever joins a
/// two-constant pool.
pub fn random_nonground_program(seed: u64) -> Program {
    let mut rng = Lcg64::new(seed);
    let consts: Vec<&str> = if rng.bounded(4) == 0 {
        vec!["a", "b", "c"]
    } else {
        vec!["a", "b"]
    };
    let binary = consts.len() == 2;
    let mut program = Program::default();

    let n_facts = 1 + rng.bounded(consts.len() as u64) as usize;
    let mut seen = BTreeSet::new();
    for _ in 0..n_facts {
        let c = consts[rng.bounded(consts.len() as u64) as usize];
        if seen.insert(c) {
            program.facts.push(a1("q", cv(c)));
        }
    }
    if binary && rng.bounded(2) == 0 {
        let u = consts[rng.bounded(2) as usize];
        let v = consts[rng.bounded(2) as usize];
        if u != v {
            program.facts.push(Atom::new("r", vec![cv(u), cv(v)]));
        }
    }

    let q_x = Literal::pos(a1("q", vx()));
    let n_rules = 1 + rng.bounded(5) as usize;
    for _ in 0..n_rules {
        let template = rng.bounded(if binary { 11 } else { 8 });
        let rule = match template {
            0 => Rule::normal(a1("p", vx()), vec![q_x.clone()]),
            1 => Rule::normal(a1("p", vx()), vec![q_x.clone(), Literal::neg(a1("s", vx()))]),
            2 => Rule::normal(a1("s", vx()), vec![q_x.clone(), Literal::neg(a1("p", vx()))]),
            3 => Rule::constraint(vec![Literal::pos(a1("p", vx())), Literal::pos(a1("s", vx()))]),
            4 => {
                let mut r = Rule::normal(a1("p", vx()), vec![q_x.clone()]);
                r.body_builtins.push(Comparison { lhs: vx(), op: CmpOp::Ne, rhs: cv("a") });
                r
            }
            5 => {
                let mut r = Rule::normal(a1("s", vx()), vec![q_x.clone()]);
                r.body_builtins.push(Comparison { lhs: vx(), op: CmpOp::Lt, rhs: cv("b") });
                r
            }
            6 => Rule::choice(vec![a1("p", vx())], vec![q_x.clone()]),
            7 => {
                // w :- L { p(a); p(b..) } U, q(X).
                let elements: Vec<Atom> = consts.iter().map(|c| a1("p", cv(c))).collect();
                let lower = rng.bounded(elements.len() as u64 + 1) as u32;
                let upper = if rng.bounded(2) == 0 {
                    None
                } else {
                    Some(lower + rng.bounded(2) as u32)
                };
                let mut r = Rule::normal(Atom::prop("w"), vec![q_x.clone()]);
                r.body_cards.push(Cardinality { lower, upper, elements });
                r
            }
            8 => Rule::normal(
                Atom::new("r", vec![vx(), vy()]),
                vec![q_x.clone(), Literal::pos(a1("q", vy()))],
            ),
            9 => Rule::normal(a1("p", vx()), vec![Literal::pos(Atom::new("r", vec![vx(), vy()]))]),
            _ => Rule::normal(a1("s", vy()), vec![Literal::pos(Atom::new("r", vec![vx(), vy()]))]),
        };
        program.rules.push(rule);
    }
    program
}
