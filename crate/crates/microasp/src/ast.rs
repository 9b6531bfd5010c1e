//! Surface syntax of the rule language.
//!
//! A [`Program`] is a list of rules plus a list of ground facts. Rules come in
//! three head forms (normal, constraint, choice) and bodies mix plain literals,
//! cardinality literals over positive atoms, and builtin comparisons. The
//! `Display` impls define the canonical text form: parsing the printed text
//! yields a structurally identical program.

use std::fmt;

/// A term: integer, symbolic constant, or variable.
///
/// The derived order doubles as the comparison order used by builtins:
/// integers come first (numerically), then constants (lexicographically).
/// Variables never reach a ground comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Integer(i64),
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Integer(n) => write!(f, "{n}"),
            Term::Constant(c) => f.write_str(c),
            Term::Variable(v) => f.write_str(v),
        }
    }
}

/// A predicate applied to zero or more terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    /// Zero-arity atom.
    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom { predicate: predicate.into(), args: Vec::new() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// An atom or its default negation (`not a`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, negated: true }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Body literal `L { a1; ...; an } U` over positive atoms.
///
/// `upper` of `None` means unbounded. Satisfied by a model when the number of
/// true elements lies in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cardinality {
    pub lower: u32,
    pub upper: Option<u32>,
    pub elements: Vec<Atom>,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower > 0 {
            write!(f, "{} ", self.lower)?;
        }
        write!(f, "{{ ")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " }}")?;
        if let Some(u) = self.upper {
            write!(f, " {u}")?;
        }
        Ok(())
    }
}

/// Comparison operator usable in rule bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
}

impl CmpOp {
    pub fn eval(self, lhs: &Term, rhs: &Term) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        })
    }
}

/// Builtin comparison between two terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub lhs: Term,
    pub op: CmpOp,
    pub rhs: Term,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

/// What kind of head a rule carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeadKind {
    /// Single head atom derived when the body holds.
    Normal,
    /// No head; the body must not hold.
    Constraint,
    /// Brace-delimited atoms each freely choosable when the body holds.
    Choice,
}

/// One rule. `heads` holds exactly one atom for `Normal`, none for
/// `Constraint`, and at least one for `Choice`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub kind: HeadKind,
    pub heads: Vec<Atom>,
    pub body_lits: Vec<Literal>,
    pub body_cards: Vec<Cardinality>,
    pub body_builtins: Vec<Comparison>,
}

impl Rule {
    pub fn normal(head: Atom, body_lits: Vec<Literal>) -> Self {
        Rule {
            kind: HeadKind::Normal,
            heads: vec![head],
            body_lits,
            body_cards: Vec::new(),
            body_builtins: Vec::new(),
        }
    }

    pub fn constraint(body_lits: Vec<Literal>) -> Self {
        Rule {
            kind: HeadKind::Constraint,
            heads: Vec::new(),
            body_lits,
            body_cards: Vec::new(),
            body_builtins: Vec::new(),
        }
    }

    pub fn choice(heads: Vec<Atom>, body_lits: Vec<Literal>) -> Self {
        Rule {
            kind: HeadKind::Choice,
            heads,
            body_lits,
            body_cards: Vec::new(),
            body_builtins: Vec::new(),
        }
    }

    pub fn has_body(&self) -> bool {
        !self.body_lits.is_empty() || !self.body_cards.is_empty() || !self.body_builtins.is_empty()
    }

    /// All variable names occurring anywhere in the rule.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |t: &Term| {
            if let Term::Variable(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        };
        for a in &self.heads {
            a.args.iter().for_each(&mut push);
        }
        for l in &self.body_lits {
            l.atom.args.iter().for_each(&mut push);
        }
        for c in &self.body_cards {
            for a in &c.elements {
                a.args.iter().for_each(&mut push);
            }
        }
        for b in &self.body_builtins {
            push(&b.lhs);
            push(&b.rhs);
        }
        out
    }

    /// Variable names bound by positive non-builtin body literals.
    pub fn bound_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for l in &self.body_lits {
            if l.negated {
                continue;
            }
            for t in &l.atom.args {
                if let Term::Variable(v) = t {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            HeadKind::Normal => write!(f, "{}", self.heads[0])?,
            HeadKind::Constraint => {}
            HeadKind::Choice => {
                write!(f, "{{ ")?;
                for (i, a) in self.heads.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, " }}")?;
            }
        }
        if self.has_body() || self.kind == HeadKind::Constraint {
            if self.kind != HeadKind::Constraint {
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
            for l in &self.body_lits {
                sep(f)?;
                write!(f, "{l}")?;
            }
            for c in &self.body_cards {
                sep(f)?;
                write!(f, "{c}")?;
            }
            for b in &self.body_builtins {
                sep(f)?;
                write!(f, "{b}")?;
            }
        }
        write!(f, ".")
    }
}

/// A parsed program: rules plus the extensional database.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub facts: Vec<Atom>,
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.facts {
            writeln!(f, "{a}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Severity of a validation finding. Only `Error` blocks grounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, tied to the rule (or fact) it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule_index: Option<usize>,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.rule_index {
            Some(i) => write!(f, "{sev}: rule {i}: {}", self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

/// Checks safety, arity consistency, and cardinality bound sanity.
///
/// Safety: every variable in a rule must occur in at least one positive
/// non-builtin body literal. Arities are declared implicitly by first use
/// (facts scanned before rules). A cardinality literal whose lower bound
/// exceeds its element count is flagged as a warning, not an error: it is
/// syntactically fine and simply unsatisfiable.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut arity: std::collections::HashMap<String, (usize, String)> =
        std::collections::HashMap::new();
    let mut check_arity =
        |atom: &Atom, rule_index: Option<usize>, whr: &str, out: &mut Vec<Diagnostic>| {
            let seen = arity
                .entry(atom.predicate.clone())
                .or_insert_with(|| (atom.args.len(), whr.to_string()));
            if seen.0 != atom.args.len() {
                out.push(Diagnostic {
                    rule_index,
                    severity: Severity::Error,
                    message: format!(
                        "arity mismatch for '{}': used with {} arguments here but {} in {}",
                        atom.predicate,
                        atom.args.len(),
                        seen.0,
                        seen.1
                    ),
                });
            }
        };

    for (i, fact) in program.facts.iter().enumerate() {
        if !fact.is_ground() {
            out.push(Diagnostic {
                rule_index: None,
                severity: Severity::Error,
                message: format!("fact {i} '{fact}' contains a variable"),
            });
        }
        check_arity(fact, None, &format!("fact {i}"), &mut out);
    }

    for (ri, rule) in program.rules.iter().enumerate() {
        let whr = format!("rule {ri}");
        for a in &rule.heads {
            check_arity(a, Some(ri), &whr, &mut out);
        }
        for l in &rule.body_lits {
            check_arity(&l.atom, Some(ri), &whr, &mut out);
        }
        for c in &rule.body_cards {
            for a in &c.elements {
                check_arity(a, Some(ri), &whr, &mut out);
            }
        }

        let bound = rule.bound_variables();
        for v in rule.variables() {
            if !bound.contains(&v) {
                out.push(Diagnostic {
                    rule_index: Some(ri),
                    severity: Severity::Error,
                    message: format!(
                        "unsafe variable '{v}': no occurrence in a positive body literal"
                    ),
                });
            }
        }

        match rule.kind {
            HeadKind::Normal => {
                if rule.heads.len() != 1 {
                    out.push(Diagnostic {
                        rule_index: Some(ri),
                        severity: Severity::Error,
                        message: "normal rule must have exactly one head atom".into(),
                    });
                }
            }
            HeadKind::Constraint => {
                if !rule.heads.is_empty() {
                    out.push(Diagnostic {
                        rule_index: Some(ri),
                        severity: Severity::Error,
                        message: "constraint must not have head atoms".into(),
                    });
                }
            }
            HeadKind::Choice => {
                if rule.heads.is_empty() {
                    out.push(Diagnostic {
                        rule_index: Some(ri),
                        severity: Severity::Error,
                        message: "choice rule must have at least one head atom".into(),
                    });
                }
            }
        }

        for c in &rule.body_cards {
            if c.elements.is_empty() {
                out.push(Diagnostic {
                    rule_index: Some(ri),
                    severity: Severity::Error,
                    message: "cardinality literal has no elements".into(),
                });
            }
            let mut seen = std::collections::HashSet::new();
            for a in &c.elements {
                if !seen.insert(a) {
                    out.push(Diagnostic {
                        rule_index: Some(ri),
                        severity: Severity::Error,
                        message: format!("duplicate element '{a}' in cardinality literal"),
                    });
                }
            }
            if let Some(u) = c.upper {
                if c.lower > u {
                    out.push(Diagnostic {
                        rule_index: Some(ri),
                        severity: Severity::Error,
                        message: format!("cardinality lower bound {} exceeds upper bound {u}", c.lower),
                    });
                }
            }
            if c.lower as usize > c.elements.len() {
                out.push(Diagnostic {
                    rule_index: Some(ri),
                    severity: Severity::Warning,
                    message: format!(
                        "cardinality lower bound {} exceeds element count {} (unsatisfiable)",
                        c.lower,
                        c.elements.len()
                    ),
                });
            }
        }
    }
    out
}

/// True when no `Error`-severity diagnostic is present.
pub fn is_valid(program: &Program) -> bool {
    validate(program).iter().all(|d| d.severity != Severity::Error)
}

/// Returned by operations that refuse to run on a program with validation
/// errors. Carries every diagnostic, warnings included; `Display` shows the
/// first error so the type can serve directly as an error message.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct InvalidProgram {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for InvalidProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.diagnostics.iter().find(|d| d.severity == Severity::Error) {
            Some(d) => write!(f, "{d}"),
            None => write!(f, "invalid program"),
        }
    }
}

/// Validates, returning `Err` if any error-severity diagnostic fires.
pub fn check_valid(program: &Program) -> Result<(), InvalidProgram> {
    let diagnostics = validate(program);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        Err(InvalidProgram { diagnostics })
    } else {
        Ok(())
    }
}
