//! Deterministic symbolic decision engine for policy-governed claim
//! adjudication.
//!
//! A terms-and-conditions knowledge base is written in a small many-sorted
//! first-order language: sorts, condition/goal predicates, and universally
//! quantified implication rules. A claim is a set of typed constants plus
//! ground condition facts. Coverage of a goal instance is decided by
//! grounding the theory over the claim's constants (the Herbrand universe is
//! finite because all function symbols are constants) and checking
//! propositional satisfiability of theory + facts + negated goal:
//!
//! * unsatisfiable — the claim is covered; a subset-minimal unsat core maps
//!   back through provenance to the rules and facts that prove it;
//! * satisfiable — the claim is not covered; the satisfying assignment is a
//!   total counterexample model.
//!
//! The engine is seedless and fully deterministic: identical inputs produce
//! byte-identical decisions, reports, and exports.

pub mod diag;
pub mod engine;
pub mod fol;
pub mod ground;
pub mod harness;
pub mod ingest;
pub mod kb;
pub mod parse;
pub mod serialize;
pub mod smtlib;
pub mod solver;

pub use diag::{DiagCode, Diagnostic, Severity, Span};
pub use engine::{decide, decide_all_goals, Decision, Verdict};
pub use fol::{
    Atom, Conjunct, Constant, GoalInstance, Literal, PredicateKind, PredicateSymbol, Sentence,
    Signature, Sort, Term,
};
pub use ground::{ground_problem, AtomTable, GroundClause, GroundProblem};
pub use kb::{ClaimDocument, KnowledgeBase};
pub use solver::{solve, SolveResult, SolverConfig};
