//! Deterministic benchmark instances: graph families with reproducible
//! identifiers, encoders from graph problems into programs or default
//! theories, and a combinatorial counter that solves the same problems by
//! direct definition, independent of the solving pipeline.

use crate::ast::{
    Atom, Cardinality, CmpOp, Comparison, HeadKind, Literal, Program, Rule, Term,
};
use crate::default_logic::{self, Default, DefaultTheory, Lit};
use crate::grounder::ground;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// 64-bit linear congruential generator with the MMIX multiplier
/// 6364136223846793005 and increment 1442695040888963407, so random graph
/// ids are portable across implementations.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniformly distributed value in `[0, n)` via the high half of a
    /// 128-bit product.
    pub fn bounded(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {v} out of range 1..={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("{0}")]
    InvalidFamily(String),
}

/// A graph with 1-based vertices and a reproducible identifier. Undirected
/// edges are stored with `u < v`; the edge list is sorted either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub id: String,
    pub n: usize,
    pub directed: bool,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(
        id: impl Into<String>,
        n: usize,
        directed: bool,
        edges: Vec<(usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u < 1 || u > n {
                return Err(GraphError::VertexOutOfRange { v: u, n });
            }
            if v < 1 || v > n {
                return Err(GraphError::VertexOutOfRange { v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            normalized.push(if directed || u < v { (u, v) } else { (v, u) });
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(Graph { id: id.into(), n, directed, edges: normalized })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The arc relation used by directed encodings: stored edges for a
    /// directed graph, both orientations of every edge otherwise.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        if self.directed {
            self.edges.clone()
        } else {
            let mut out = Vec::with_capacity(self.edges.len() * 2);
            for &(u, v) in &self.edges {
                out.push((u, v));
                out.push((v, u));
            }
            out.sort_unstable();
            out
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.edges.binary_search(&(u, v)).is_ok()
        } else {
            let e = if u < v { (u, v) } else { (v, u) };
            u != v && self.edges.binary_search(&e).is_ok()
        }
    }

    /// Content-derived identifier for graphs that arrive without one:
    /// FNV-1a over the canonical edge list.
    pub fn content_id(n: usize, directed: bool, edges: &[(usize, usize)]) -> String {
        let mut canonical: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(u, v)| if directed || u < v { (u, v) } else { (v, u) })
            .collect();
        canonical.sort_unstable();
        let mut text = format!("{n} {} ", if directed { "d" } else { "u" });
        for (u, v) in canonical {
            text.push_str(&format!("{u},{v};"));
        }
        let mut hash: u64 = 14695981039346656037;
        for b in text.bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(1099511628211);
        }
        format!("g{hash:016x}")
    }

    /// Emits the graph in the format `parse_graph` reads, `c id` line
    /// included.
    pub fn to_file_text(&self) -> String {
        let mut out = format!(
            "c id {}\np graph {} {} {}\n",
            self.id,
            self.n,
            self.edges.len(),
            if self.directed { "directed" } else { "undirected" }
        );
        for &(u, v) in &self.edges {
            out.push_str(&format!("e {u} {v}\n"));
        }
        out
    }
}

/// Builds a graph from a family spec such as `cycle(8)`, `path(5)`,
/// `complete(4)`, `grid(2,3)`, `random(10,20,42)`, or `dicycle(6)` (the one
/// directed family, for kernel instances). The id is the canonical spec
/// text, so equal specs give interchangeable graphs.
pub fn make_graph(spec: &str) -> Result<Graph, GraphError> {
    let s = spec.trim();
    let bad = |msg: String| GraphError::InvalidFamily(msg);
    let open = s
        .find('(')
        .ok_or_else(|| bad(format!("family spec '{s}' has no parameter list")))?;
    if !s.ends_with(')') {
        return Err(bad(format!("family spec '{s}' has no closing parenthesis")));
    }
    let name = &s[..open];
    let params: Vec<u64> = s[open + 1..s.len() - 1]
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| bad(format!("bad parameter '{}' in '{s}'", p.trim())))
        })
        .collect::<Result<_, _>>()?;
    let id = format!(
        "{name}({})",
        params.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    );
    let arity = |want: usize| {
        if params.len() == want {
            Ok(())
        } else {
            Err(bad(format!("{name} takes {want} parameter(s), got {}", params.len())))
        }
    };
    match name {
        "cycle" => {
            arity(1)?;
            let n = params[0] as usize;
            if n < 3 {
                return Err(bad("cycle(n) needs n >= 3".to_string()));
            }
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
            edges.push((1, n));
            Graph::new(id, n, false, edges)
        }
        "path" => {
            arity(1)?;
            let n = params[0] as usize;
            if n < 1 {
                return Err(bad("path(n) needs n >= 1".to_string()));
            }
            Graph::new(id, n, false, (1..n).map(|i| (i, i + 1)).collect())
        }
        "complete" => {
            arity(1)?;
            let n = params[0] as usize;
            if n < 1 {
                return Err(bad("complete(n) needs n >= 1".to_string()));
            }
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    edges.push((u, v));
                }
            }
            Graph::new(id, n, false, edges)
        }
        "grid" => {
            arity(2)?;
            let (r, c) = (params[0] as usize, params[1] as usize);
            if r < 1 || c < 1 {
                return Err(bad("grid(r,c) needs r, c >= 1".to_string()));
            }
            let at = |i: usize, j: usize| (i - 1) * c + j;
            let mut edges = Vec::new();
            for i in 1..=r {
                for j in 1..=c {
                    if j < c {
                        edges.push((at(i, j), at(i, j + 1)));
                    }
                    if i < r {
                        edges.push((at(i, j), at(i + 1, j)));
                    }
                }
            }
            Graph::new(id, r * c, false, edges)
        }
        "random" => {
            arity(3)?;
            let (n, m, seed) = (params[0] as usize, params[1] as usize, params[2]);
            if n < 1 {
                return Err(bad("random(n,m,seed) needs n >= 1".to_string()));
            }
            let max = n * (n - 1) / 2;
            if m > max {
                return Err(bad(format!(
                    "random(n,m,seed): {m} edges requested but {n} vertices allow at most {max}"
                )));
            }
            let mut rng = Lcg64::new(seed);
            let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
            while set.len() < m {
                let u = 1 + rng.bounded(n as u64) as usize;
                let v = 1 + rng.bounded(n as u64) as usize;
                if u != v {
                    set.insert(if u < v { (u, v) } else { (v, u) });
                }
            }
            Graph::new(id, n, false, set.into_iter().collect())
        }
        "dicycle" => {
            arity(1)?;
            let n = params[0] as usize;
            if n < 2 {
                return Err(bad("dicycle(n) needs n >= 2".to_string()));
            }
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
            edges.push((n, 1));
            Graph::new(id, n, true, edges)
        }
        other => Err(bad(format!("unknown graph family '{other}'"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Problem {
    Coloring,
    Hamiltonian,
    Kernel,
    IndependentSet,
    VertexCover,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::Coloring,
        Problem::Hamiltonian,
        Problem::Kernel,
        Problem::IndependentSet,
        Problem::VertexCover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Coloring => "coloring",
            Problem::Hamiltonian => "hamiltonian",
            Problem::Kernel => "kernel",
            Problem::IndependentSet => "independentset",
            Problem::VertexCover => "vertexcover",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown problem '{0}': expected coloring, hamiltonian, kernel, independentset, or vertexcover")]
pub struct UnknownProblem(pub String);

impl FromStr for Problem {
    type Err = UnknownProblem;

    fn from_str(s: &str) -> Result<Problem, UnknownProblem> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProblem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Program,
    Defaults,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub problem: Problem,
    pub k: Option<u32>,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    Program(Program),
    Theory(DefaultTheory),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("problem '{0}' requires k >= 1")]
    MissingK(&'static str),
    #[error("hamiltonian needs at least 2 vertices")]
    TooSmall,
    #[error("no default-theory encoding for '{0}'")]
    NoDefaultTarget(&'static str),
    #[error("instance too large for brute force counting")]
    TooLarge,
}

/// Checks that the requested problem, parameter, and target fit the graph.
pub fn validate(graph: &Graph, spec: &BenchmarkSpec) -> Result<(), EncodeError> {
    match spec.problem {
        Problem::Coloring | Problem::IndependentSet | Problem::VertexCover => {
            if spec.k.is_none_or(|k| k < 1) {
                return Err(EncodeError::MissingK(spec.problem.name()));
            }
        }
        Problem::Hamiltonian => {
            if graph.n < 2 {
                return Err(EncodeError::TooSmall);
            }
        }
        Problem::Kernel => {}
    }
    if spec.target == Target::Defaults
        && !matches!(spec.problem, Problem::Coloring | Problem::Kernel)
    {
        return Err(EncodeError::NoDefaultTarget(spec.problem.name()));
    }
    Ok(())
}

fn vt(i: usize) -> Term {
    Term::Constant(format!("v{i}"))
}

fn ct(j: u32) -> Term {
    Term::Constant(format!("c{j}"))
}

fn var(name: &str) -> Term {
    Term::Variable(name.to_string())
}

fn fact(program: &mut Program, predicate: &str, args: Vec<Term>) {
    program.facts.push(Atom::new(predicate, args));
}

fn lt(lhs: Term, rhs: Term) -> Comparison {
    Comparison { lhs, op: CmpOp::Lt, rhs }
}

fn vertex_facts(program: &mut Program, g: &Graph) {
    for i in 1..=g.n {
        fact(program, "vtx", vec![vt(i)]);
    }
}

fn edge_facts(program: &mut Program, g: &Graph) {
    for &(u, v) in g.edges() {
        fact(program, "edge", vec![vt(u), vt(v)]);
    }
}

fn arc_facts(program: &mut Program, g: &Graph) {
    for (u, v) in g.arcs() {
        fact(program, "arc", vec![vt(u), vt(v)]);
    }
}

/// Generate-and-test k-coloring: choose colors per vertex, insist on exactly
/// one, forbid equal colors across an edge.
pub fn coloring_program(g: &Graph, k: u32) -> Program {
    let mut p = Program::default();
    vertex_facts(&mut p, g);
    for j in 1..=k {
        fact(&mut p, "col", vec![ct(j)]);
    }
    edge_facts(&mut p, g);
    let clrd = |v: Term, c: Term| Atom::new("clrd", vec![v, c]);
    p.rules.push(Rule::choice(
        vec![clrd(var("V"), var("C"))],
        vec![
            Literal::pos(Atom::new("vtx", vec![var("V")])),
            Literal::pos(Atom::new("col", vec![var("C")])),
        ],
    ));
    p.rules.push(Rule::normal(
        Atom::new("colored", vec![var("V")]),
        vec![Literal::pos(clrd(var("V"), var("C")))],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("vtx", vec![var("V")])),
        Literal::neg(Atom::new("colored", vec![var("V")])),
    ]));
    p.rules.push(Rule {
        kind: HeadKind::Constraint,
        heads: Vec::new(),
        body_lits: vec![
            Literal::pos(clrd(var("V"), var("C1"))),
            Literal::pos(clrd(var("V"), var("C2"))),
        ],
        body_cards: Vec::new(),
        body_builtins: vec![lt(var("C1"), var("C2"))],
    });
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("edge", vec![var("U"), var("V")])),
        Literal::pos(clrd(var("U"), var("C"))),
        Literal::pos(clrd(var("V"), var("C"))),
    ]));
    p
}

/// Hamiltonian cycle via in/2: choose arcs, exactly one out and one in per
/// vertex, everything reachable from vertex 1 along chosen arcs.
pub fn hamiltonian_program(g: &Graph) -> Program {
    let mut p = Program::default();
    vertex_facts(&mut p, g);
    arc_facts(&mut p, g);
    let inn = |u: Term, v: Term| Atom::new("in", vec![u, v]);
    p.rules.push(Rule::choice(
        vec![inn(var("U"), var("V"))],
        vec![Literal::pos(Atom::new("arc", vec![var("U"), var("V")]))],
    ));
    p.rules.push(Rule {
        kind: HeadKind::Constraint,
        heads: Vec::new(),
        body_lits: vec![
            Literal::pos(inn(var("U"), var("V"))),
            Literal::pos(inn(var("U"), var("W"))),
        ],
        body_cards: Vec::new(),
        body_builtins: vec![lt(var("V"), var("W"))],
    });
    p.rules.push(Rule {
        kind: HeadKind::Constraint,
        heads: Vec::new(),
        body_lits: vec![
            Literal::pos(inn(var("U"), var("W"))),
            Literal::pos(inn(var("V"), var("W"))),
        ],
        body_cards: Vec::new(),
        body_builtins: vec![lt(var("U"), var("V"))],
    });
    p.rules.push(Rule::normal(
        Atom::new("hasout", vec![var("U")]),
        vec![Literal::pos(inn(var("U"), var("V")))],
    ));
    p.rules.push(Rule::normal(
        Atom::new("hasin", vec![var("V")]),
        vec![Literal::pos(inn(var("U"), var("V")))],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("vtx", vec![var("U")])),
        Literal::neg(Atom::new("hasout", vec![var("U")])),
    ]));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("vtx", vec![var("V")])),
        Literal::neg(Atom::new("hasin", vec![var("V")])),
    ]));
    p.rules.push(Rule::normal(
        Atom::new("r", vec![var("V")]),
        vec![Literal::pos(inn(vt(1), var("V")))],
    ));
    p.rules.push(Rule::normal(
        Atom::new("r", vec![var("V")]),
        vec![
            Literal::pos(Atom::new("r", vec![var("U")])),
            Literal::pos(inn(var("U"), var("V"))),
        ],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("vtx", vec![var("V")])),
        Literal::neg(Atom::new("r", vec![var("V")])),
    ]));
    p
}

/// Kernel via the two-default negation pattern: each vertex is in or out,
/// the kernel is independent, and every excluded vertex has an arc into it.
pub fn kernel_program(g: &Graph) -> Program {
    let mut p = Program::default();
    vertex_facts(&mut p, g);
    arc_facts(&mut p, g);
    let inn = |v: Term| Atom::new("in", vec![v]);
    let out = |v: Term| Atom::new("out", vec![v]);
    p.rules.push(Rule::normal(
        inn(var("V")),
        vec![
            Literal::pos(Atom::new("vtx", vec![var("V")])),
            Literal::neg(out(var("V"))),
        ],
    ));
    p.rules.push(Rule::normal(
        out(var("V")),
        vec![
            Literal::pos(Atom::new("vtx", vec![var("V")])),
            Literal::neg(inn(var("V"))),
        ],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(inn(var("U"))),
        Literal::pos(inn(var("V"))),
        Literal::pos(Atom::new("arc", vec![var("U"), var("V")])),
    ]));
    p.rules.push(Rule::normal(
        Atom::new("dom", vec![var("V")]),
        vec![
            Literal::pos(Atom::new("arc", vec![var("V"), var("U")])),
            Literal::pos(inn(var("U"))),
        ],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(out(var("V"))),
        Literal::neg(Atom::new("dom", vec![var("V")])),
    ]));
    p
}

fn in_elements(g: &Graph) -> Vec<Atom> {
    (1..=g.n).map(|i| Atom::new("in", vec![vt(i)])).collect()
}

/// Independent set of size at least k: choose vertices, forbid adjacent
/// pairs, require the choice to reach the bound.
pub fn independentset_program(g: &Graph, k: u32) -> Program {
    let mut p = Program::default();
    vertex_facts(&mut p, g);
    edge_facts(&mut p, g);
    let inn = |v: Term| Atom::new("in", vec![v]);
    p.rules.push(Rule::choice(
        vec![inn(var("V"))],
        vec![Literal::pos(Atom::new("vtx", vec![var("V")]))],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("edge", vec![var("U"), var("V")])),
        Literal::pos(inn(var("U"))),
        Literal::pos(inn(var("V"))),
    ]));
    p.rules.push(Rule {
        kind: HeadKind::Normal,
        heads: vec![Atom::prop("ok")],
        body_lits: Vec::new(),
        body_cards: vec![Cardinality { lower: k, upper: None, elements: in_elements(g) }],
        body_builtins: Vec::new(),
    });
    p.rules.push(Rule::constraint(vec![Literal::neg(Atom::prop("ok"))]));
    p
}

/// Vertex cover of size at most k: choose vertices, cover every edge, cap
/// the count by forbidding k+1 choices.
pub fn vertexcover_program(g: &Graph, k: u32) -> Program {
    let mut p = Program::default();
    vertex_facts(&mut p, g);
    edge_facts(&mut p, g);
    let inn = |v: Term| Atom::new("in", vec![v]);
    p.rules.push(Rule::choice(
        vec![inn(var("V"))],
        vec![Literal::pos(Atom::new("vtx", vec![var("V")]))],
    ));
    p.rules.push(Rule::constraint(vec![
        Literal::pos(Atom::new("edge", vec![var("U"), var("V")])),
        Literal::neg(inn(var("U"))),
        Literal::neg(inn(var("V"))),
    ]));
    p.rules.push(Rule {
        kind: HeadKind::Constraint,
        heads: Vec::new(),
        body_lits: Vec::new(),
        body_cards: vec![Cardinality { lower: k + 1, upper: None, elements: in_elements(g) }],
        body_builtins: Vec::new(),
    });
    p
}

fn clrd_lit(i: usize, j: u32, positive: bool) -> Lit {
    let atom = format!("clrd(v{i},c{j})");
    if positive {
        Lit::pos(atom)
    } else {
        Lit::neg(atom)
    }
}

/// The k-coloring default theory: one default per vertex and color whose
/// justifications exclude the vertex's other colors, so the theory alone has
/// k^n extensions. With `killing` set, each edge and color also gets a
/// killing default `clrd(x,c) & clrd(y,c) : -f / f` over one shared guard
/// literal, eliminating improper colorings.
pub fn coloring_default_theory(g: &Graph, k: u32, killing: bool) -> DefaultTheory {
    let mut theory = DefaultTheory::default();
    for i in 1..=g.n {
        for j in 1..=k {
            theory.defaults.push(Default {
                prerequisite: BTreeSet::new(),
                justifications: (1..=k)
                    .filter(|&l| l != j)
                    .map(|l| BTreeSet::from([clrd_lit(i, l, false)]))
                    .collect(),
                consequent: BTreeSet::from([clrd_lit(i, j, true)]),
            });
        }
    }
    if killing {
        for &(u, v) in g.edges() {
            for c in 1..=k {
                theory.defaults.push(Default {
                    prerequisite: BTreeSet::from([
                        clrd_lit(u, c, true),
                        clrd_lit(v, c, true),
                    ]),
                    justifications: vec![BTreeSet::from([Lit::neg("f")])],
                    consequent: BTreeSet::from([Lit::pos("f")]),
                });
            }
        }
    }
    theory
}

/// Builds the requested encoding. Default-theory targets exist for coloring
/// (the killing-default theory) and kernel (translated from the choice-free
/// program encoding).
pub fn encode(graph: &Graph, spec: &BenchmarkSpec) -> Result<Encoded, EncodeError> {
    validate(graph, spec)?;
    let k = spec.k.unwrap_or(0);
    match spec.target {
        Target::Program => Ok(Encoded::Program(match spec.problem {
            Problem::Coloring => coloring_program(graph, k),
            Problem::Hamiltonian => hamiltonian_program(graph),
            Problem::Kernel => kernel_program(graph),
            Problem::IndependentSet => independentset_program(graph, k),
            Problem::VertexCover => vertexcover_program(graph, k),
        })),
        Target::Defaults => match spec.problem {
            Problem::Coloring => Ok(Encoded::Theory(coloring_default_theory(graph, k, true))),
            Problem::Kernel => {
                let gp = ground(&kernel_program(graph))
                    .expect("generated kernel program is valid");
                Ok(Encoded::Theory(
                    default_logic::program_to_defaults(&gp)
                        .expect("kernel encoding is choice-free"),
                ))
            }
            other => Err(EncodeError::NoDefaultTarget(other.name())),
        },
    }
}

/// Counts solutions by direct enumeration over the graph-theoretic
/// definitions, independent of the ASP pipeline. Needs n <= 12.
pub fn count_solutions_bruteforce(
    graph: &Graph,
    problem: Problem,
    k: Option<u32>,
) -> Result<u64, EncodeError> {
    validate(graph, &BenchmarkSpec { problem, k, target: Target::Program })?;
    let n = graph.n;
    if n > 12 {
        return Err(EncodeError::TooLarge);
    }
    match problem {
        Problem::Coloring => {
            let k = k.unwrap() as usize;
            if (k as u128).pow(n as u32) > 20_000_000 {
                return Err(EncodeError::TooLarge);
            }
            let mut colors = vec![0usize; n];
            let mut count = 0u64;
            loop {
                let proper = graph
                    .edges()
                    .iter()
                    .all(|&(u, v)| colors[u - 1] != colors[v - 1]);
                if proper {
                    count += 1;
                }
                let mut pos = 0;
                loop {
                    if pos == n {
                        return Ok(count);
                    }
                    colors[pos] += 1;
                    if colors[pos] < k {
                        break;
                    }
                    colors[pos] = 0;
                    pos += 1;
                }
            }
        }
        Problem::Hamiltonian => {
            // Directed traversals from vertex 1, matching the in/2 encoding:
            // an undirected cycle is counted once per direction.
            let mut rest: Vec<usize> = (2..=n).collect();
            let mut count = 0u64;
            count_ham(graph, 1, &mut rest, 0, &mut count);
            Ok(count)
        }
        Problem::Kernel => {
            let arcs = graph.arcs();
            let mut count = 0u64;
            for mask in 0u32..(1 << n) {
                let inside = |v: usize| mask >> (v - 1) & 1 == 1;
                let independent = arcs.iter().all(|&(u, v)| !(inside(u) && inside(v)));
                let dominated = (1..=n)
                    .filter(|&v| !inside(v))
                    .all(|v| arcs.iter().any(|&(a, b)| a == v && inside(b)));
                if independent && dominated {
                    count += 1;
                }
            }
            Ok(count)
        }
        Problem::IndependentSet => {
            let k = k.unwrap();
            let mut count = 0u64;
            for mask in 0u32..(1 << n) {
                let inside = |v: usize| mask >> (v - 1) & 1 == 1;
                let independent = graph
                    .edges()
                    .iter()
                    .all(|&(u, v)| !(inside(u) && inside(v)));
                if independent && mask.count_ones() >= k {
                    count += 1;
                }
            }
            Ok(count)
        }
        Problem::VertexCover => {
            let k = k.unwrap();
            let mut count = 0u64;
            for mask in 0u32..(1 << n) {
                let inside = |v: usize| mask >> (v - 1) & 1 == 1;
                let covered = graph
                    .edges()
                    .iter()
                    .all(|&(u, v)| inside(u) || inside(v));
                if covered && mask.count_ones() <= k {
                    count += 1;
                }
            }
            Ok(count)
        }
    }
}

fn count_ham(g: &Graph, last: usize, rest: &mut Vec<usize>, picked: usize, count: &mut u64) {
    if picked == rest.len() {
        if g.has_arc(last, 1) {
            *count += 1;
        }
        return;
    }
    for i in picked..rest.len() {
        let v = rest[i];
        if !g.has_arc(last, v) {
            continue;
        }
        rest.swap(picked, i);
        count_ham(g, v, rest, picked + 1, count);
        rest.swap(picked, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_bruteforce;
    use crate::parse::parse_graph;
    use crate::solver::{solve, SearchConfig};

    fn model_count(p: &Program) -> usize {
        let gp = ground(p).unwrap();
        solve(&gp, &SearchConfig::default()).unwrap().models.len()
    }

    #[test]
    fn cycle_three_is_the_triangle() {
        let g = make_graph("cycle(3)").unwrap();
        assert_eq!(g.id, "cycle(3)");
        assert_eq!(g.n, 3);
        assert!(!g.directed);
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn grid_two_by_two_has_four_edges() {
        let g = make_graph("grid(2,2)").unwrap();
        assert_eq!(g.n, 4);
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let g1 = make_graph("random(10,20,42)").unwrap();
        let g2 = make_graph("random(10, 20, 42)").unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.id, "random(10,20,42)");
        assert_eq!(g1.edges().len(), 20);
    }

    #[test]
    fn dicycle_is_directed() {
        let g = make_graph("dicycle(4)").unwrap();
        assert!(g.directed);
        assert_eq!(g.edges(), &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(g.has_arc(4, 1));
        assert!(!g.has_arc(1, 4));
    }

    #[test]
    fn bad_family_specs_are_rejected() {
        for spec in ["cycle(2)", "frob(3)", "random(4,99,1)", "grid(2)", "cycle", "cycle(x)"] {
            assert!(make_graph(spec).is_err(), "{spec} should be rejected");
        }
    }

    #[test]
    fn graph_files_round_trip() {
        for spec in ["cycle(5)", "dicycle(3)", "random(6,9,7)"] {
            let g = make_graph(spec).unwrap();
            let parsed = parse_graph(&g.to_file_text()).unwrap();
            assert_eq!(g, parsed, "{spec}");
        }
    }

    #[test]
    fn triangle_three_coloring_has_six_models() {
        let g = make_graph("cycle(3)").unwrap();
        assert_eq!(model_count(&coloring_program(&g, 3)), 6);
        assert_eq!(count_solutions_bruteforce(&g, Problem::Coloring, Some(3)).unwrap(), 6);
    }

    #[test]
    fn even_cycle_two_coloring_has_two_models() {
        let g = make_graph("cycle(4)").unwrap();
        assert_eq!(model_count(&coloring_program(&g, 2)), 2);
        assert_eq!(count_solutions_bruteforce(&g, Problem::Coloring, Some(2)).unwrap(), 2);
    }

    #[test]
    fn complete_four_has_six_directed_hamiltonian_cycles() {
        let g = make_graph("complete(4)").unwrap();
        assert_eq!(count_solutions_bruteforce(&g, Problem::Hamiltonian, None).unwrap(), 6);
        assert_eq!(model_count(&hamiltonian_program(&g)), 6);
    }

    #[test]
    fn directed_cycles_have_alternating_kernels() {
        let even = make_graph("dicycle(4)").unwrap();
        assert_eq!(count_solutions_bruteforce(&even, Problem::Kernel, None).unwrap(), 2);
        assert_eq!(model_count(&kernel_program(&even)), 2);
        let odd = make_graph("dicycle(3)").unwrap();
        assert_eq!(count_solutions_bruteforce(&odd, Problem::Kernel, None).unwrap(), 0);
        assert_eq!(model_count(&kernel_program(&odd)), 0);
    }

    #[test]
    fn two_cycle_kernels_are_the_singletons() {
        let g = make_graph("dicycle(2)").unwrap();
        let gp = ground(&kernel_program(&g)).unwrap();
        let models = enumerate_bruteforce(&gp, 20).unwrap().name_sets(&gp.atoms);
        let ins: BTreeSet<Vec<String>> = models
            .into_iter()
            .map(|m| m.into_iter().filter(|a| a.starts_with("in(")).collect())
            .collect();
        let expect: BTreeSet<Vec<String>> = [vec!["in(v1)".to_string()], vec!["in(v2)".to_string()]]
            .into_iter()
            .collect();
        assert_eq!(ins, expect);
    }

    #[test]
    fn path_three_has_one_independent_pair()  {
        let g = make_graph("path(3)").unwrap();
        assert_eq!(
            count_solutions_bruteforce(&g, Problem::IndependentSet, Some(2)).unwrap(),
            1
        );
        assert_eq!(model_count(&independentset_program(&g, 2)), 1);
    }

    #[test]
    fn path_three_has_one_small_cover() {
        let g = make_graph("path(3)").unwrap();
        assert_eq!(count_solutions_bruteforce(&g, Problem::VertexCover, Some(1)).unwrap(), 1);
        assert_eq!(model_count(&vertexcover_program(&g, 1)), 1);
    }

    #[test]
    fn unkilled_coloring_theory_has_k_to_the_n_extensions() {
        let g = make_graph("path(2)").unwrap();
        let theory = coloring_default_theory(&g, 2, false);
        assert_eq!(default_logic::extensions(&theory).len(), 4);
        let g3 = make_graph("cycle(3)").unwrap();
        let theory3 = coloring_default_theory(&g3, 2, false);
        assert_eq!(default_logic::extensions(&theory3).len(), 8);
    }

    #[test]
    fn killing_defaults_cut_improper_colorings() {
        let triangle = make_graph("cycle(3)").unwrap();
        assert!(default_logic::extensions(&coloring_default_theory(&triangle, 2, true))
            .is_empty());
        assert_eq!(
            default_logic::extensions(&coloring_default_theory(&triangle, 3, true)).len(),
            6
        );
        let path = make_graph("path(2)").unwrap();
        assert_eq!(
            default_logic::extensions(&coloring_default_theory(&path, 2, true)).len(),
            2
        );
    }

    #[test]
    fn encode_validates_spec_invariants() {
        let g = make_graph("path(3)").unwrap();
        assert_eq!(
            encode(&g, &BenchmarkSpec { problem: Problem::Coloring, k: None, target: Target::Program }),
            Err(EncodeError::MissingK("coloring"))
        );
        assert_eq!(
            encode(&g, &BenchmarkSpec { problem: Problem::VertexCover, k: Some(0), target: Target::Program }),
            Err(EncodeError::MissingK("vertexcover"))
        );
        let single = make_graph("path(1)").unwrap();
        assert_eq!(
            encode(&single, &BenchmarkSpec { problem: Problem::Hamiltonian, k: None, target: Target::Program }),
            Err(EncodeError::TooSmall)
        );
        assert_eq!(
            encode(&g, &BenchmarkSpec { problem: Problem::Hamiltonian, k: None, target: Target::Defaults }),
            Err(EncodeError::NoDefaultTarget("hamiltonian"))
        );
        assert!(matches!(
            encode(&g, &BenchmarkSpec { problem: Problem::Kernel, k: None, target: Target::Defaults }),
            Ok(Encoded::Theory(_))
        ));
    }

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.name().parse::<Problem>().unwrap(), p);
        }
        assert!("colouring".parse::<Problem>().is_err());
    }
}
