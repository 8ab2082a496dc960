//! SMT-LIB v2 export of a decision problem, for cross-checking the
//! internal prover against an external solver.
//!
//! The exported script asserts T ∧ φ ∧ ¬ψ under logic `UF`, so an external
//! `check-sat` answer of `unsat` corresponds to the engine's Covered
//! verdict and `sat` to NotCovered. Assertions are named (`|rule!<id>|`,
//! `|fact!<index>|`, `|goal!|`) so an external unsat core can be correlated
//! with the engine's own core; a comment block in the header carries the
//! same mapping for human readers.
//!
//! Sentences that quantify over a sort with no constants are skipped with
//! an explanatory comment: the engine grounds them to nothing (vacuous
//! over an empty domain), while SMT-LIB sorts are always inhabited, so
//! exporting them would strengthen the theory beyond what was decided.
//!
//! Output is byte-deterministic: declaration order drives everything.

use std::fmt::Write as _;

use crate::fol::{Conjunct, GoalInstance, Literal, Sentence};
use crate::kb::{ClaimDocument, KnowledgeBase};

/// Names that may not be used as plain SMT-LIB symbols: reserved words of
/// the language plus symbols predefined by Core and by common solver
/// preludes. Our identifier grammar can produce these, so they are mapped
/// to quoted symbols instead (see [`symbol`]).
const UNUSABLE: &[&str] = &[
    // reserved words
    "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING", "as", "exists", "forall", "let",
    "match", "par",
    // command names our identifier grammar can collide with
    "assert", "echo", "exit", "pop", "push", "reset",
    // Core theory symbols
    "Bool", "true", "false", "not", "and", "or", "xor", "ite", "distinct",
    // sorts predefined by common solvers regardless of logic
    "Int", "Real", "String", "Array", "RegLan", "RoundingMode",
];

/// Renders a name as an SMT-LIB symbol. Every name our grammar produces is
/// already a simple symbol (including `@`-qualified constants — `@` is a
/// legal symbol character), so the only hazard is collision with reserved
/// or predefined symbols; those are emitted as the quoted symbol
/// `|<name>!sym|`, which is collision-free because user names never
/// contain `!`.
fn symbol(name: &str) -> String {
    if UNUSABLE.contains(&name) {
        format!("|{}!sym|", name)
    } else {
        name.to_string()
    }
}

fn app(predicate: &str, args: &[String]) -> String {
    if args.is_empty() {
        symbol(predicate)
    } else {
        let mut s = String::new();
        s.push('(');
        s.push_str(&symbol(predicate));
        for a in args {
            s.push(' ');
            s.push_str(&symbol(a));
        }
        s.push(')');
        s
    }
}

fn literal(lit: &Literal) -> String {
    let args: Vec<String> = lit.atom.args.iter().map(|t| t.name().to_string()).collect();
    let a = app(&lit.atom.predicate, &args);
    if lit.negated {
        format!("(not {})", a)
    } else {
        a
    }
}

fn conjunct(c: &Conjunct) -> String {
    match c.0.as_slice() {
        [single] => literal(single),
        many => {
            let parts: Vec<String> = many.iter().map(literal).collect();
            format!("(and {})", parts.join(" "))
        }
    }
}

fn sentence_formula(s: &Sentence) -> String {
    let consequent = literal(&s.goal);
    let body = if s.antecedent.is_empty() {
        consequent
    } else {
        let antecedent = match s.antecedent.as_slice() {
            [single] => conjunct(single),
            many => {
                let parts: Vec<String> = many.iter().map(conjunct).collect();
                format!("(or {})", parts.join(" "))
            }
        };
        format!("(=> {} {})", antecedent, consequent)
    };
    if s.variables.is_empty() {
        body
    } else {
        let binders: Vec<String> = s
            .variables
            .iter()
            .map(|(v, sort)| format!("({} {})", symbol(v), symbol(sort)))
            .collect();
        format!("(forall ({}) {})", binders.join(" "), body)
    }
}

/// Exports the decision problem sat(T ∧ φ ∧ ¬ψ) as an SMT-LIB v2 script.
/// `unsat` from an external solver corresponds to Covered, `sat` to
/// NotCovered. Inputs are assumed mutually sort-checked.
pub fn export_smtlib(kb: &KnowledgeBase, claim: &ClaimDocument, goal: &GoalInstance) -> String {
    let sig = claim.extended_signature(kb);
    let mut out = String::new();
    let _ = writeln!(out, "(set-option :produce-unsat-cores true)");
    let _ = writeln!(out, "(set-logic UF)");

    for sort in &sig.sorts {
        let _ = writeln!(out, "(declare-sort {} 0)", symbol(&sort.name));
    }
    for c in &sig.constants {
        let _ = writeln!(out, "(declare-const {} {})", symbol(&c.name), symbol(&c.sort));
    }
    for p in &sig.predicates {
        let domain: Vec<String> = p.arity.iter().map(|s| symbol(s)).collect();
        let _ = writeln!(
            out,
            "(declare-fun {} ({}) Bool)",
            symbol(&p.name),
            domain.join(" ")
        );
    }

    // Sentences over uninhabited sorts are vacuous in the engine's finite
    // semantics; flag and skip them rather than over-assert.
    let mut skipped: Vec<(&str, &str)> = Vec::new();
    let mut exported: Vec<&Sentence> = Vec::new();
    for s in &kb.theory {
        match s
            .variables
            .iter()
            .find(|(_, sort)| sig.constants_of_sort(sort).next().is_none())
        {
            Some((_, sort)) => skipped.push((&s.id, sort)),
            None => exported.push(s),
        }
    }

    let _ = writeln!(out, "; assertion map:");
    for s in &exported {
        let _ = writeln!(out, ";   |rule!{}| = rule {}", s.id, s.id);
    }
    for (i, f) in claim.facts.iter().enumerate() {
        let _ = writeln!(out, ";   |fact!{}| = fact {}", i, f);
    }
    let _ = writeln!(out, ";   |goal!| = negated goal {}", goal);
    for (id, sort) in &skipped {
        let _ = writeln!(
            out,
            "; rule {} skipped: quantifies over sort {} with no constants",
            id, sort
        );
    }

    for s in &exported {
        let _ = writeln!(
            out,
            "(assert (! {} :named |rule!{}|))",
            sentence_formula(s),
            s.id
        );
    }
    for (i, f) in claim.facts.iter().enumerate() {
        let _ = writeln!(out, "(assert (! {} :named |fact!{}|))", literal(f), i);
    }
    let _ = writeln!(
        out,
        "(assert (! (not {}) :named |goal!|))",
        app(&goal.predicate, &goal.args)
    );
    let _ = writeln!(out, "(check-sat)");
    out
}
