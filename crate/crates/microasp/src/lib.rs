//! A miniature answer-set programming toolchain.
//!
//! The pipeline mirrors the classic two-phase architecture: [`parse`] turns
//! rule text into an AST, [`grounder`] instantiates it into a variable-free
//! [`ground::GroundProgram`] while preserving stable models, and [`solver`]
//! enumerates stable models by backtracking search with counter-based
//! propagation and unfounded-set pruning. [`oracle`] provides brute-force
//! reference semantics (reduct, least model, enumeration, Clark completion)
//! used to cross-check everything else. [`default_logic`] computes Reiter
//! extensions for theories over literal conjunctions and translates ground
//! programs into them; [`theorybase`] generates deterministic graph-problem
//! benchmarks for both formalisms.

pub mod ast;
pub mod default_logic;
pub mod ground;
pub mod grounder;
pub mod herbrand;
pub mod oracle;
pub mod parse;
pub mod solver;
mod subst;
pub mod theorybase;

pub use ast::{check_valid, validate, Program};
pub use grounder::ground;
pub use parse::{parse_default_theory, parse_graph, parse_program, ParseError};
pub use solver::{solve, SearchConfig};
