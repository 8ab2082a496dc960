//! Many-sorted first-order term and formula algebra.
//!
//! The language is deliberately small: all function symbols are constants
//! (arity 0), there is no equality, and every theory sentence is a single
//! universally quantified implication whose antecedent is a disjunction of
//! conjunctions of condition literals and whose consequent is one literal.
//! This keeps the Herbrand universe finite, so grounding terminates and
//! satisfiability is decidable.
//!
//! All values here are immutable after construction and safe to share
//! across concurrent decision runs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{DiagCode, Diagnostic};

/// Checks the identifier grammar `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Constant names admit an optional sort qualifier (`ALICE` or
/// `ALICE@Person`) so entities extracted under different sorts with the same
/// surface form stay distinct within one claim.
pub fn is_constant_name(s: &str) -> bool {
    match s.split_once('@') {
        None => is_identifier(s),
        Some((stem, sort)) => is_identifier(stem) && is_identifier(sort),
    }
}

/// The stem of a constant name, without any `@Sort` qualifier.
pub fn constant_stem(s: &str) -> &str {
    match s.split_once('@') {
        None => s,
        Some((stem, _)) => stem,
    }
}

/// A domain of discourse, e.g. `Person` or `Trip`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sort {
    pub name: String,
}

impl Sort {
    pub fn new(name: impl Into<String>) -> Self {
        Sort { name: name.into() }
    }
}

/// Whether a predicate states a claim circumstance or an adjudication
/// outcome. Every predicate is exactly one of the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    Condition,
    Goal,
}

/// A typed predicate symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSymbol {
    pub name: String,
    /// Sort of each argument slot.
    pub arity: Vec<String>,
    pub kind: PredicateKind,
    /// Natural-language definition. Condition predicates carry the contract's
    /// own wording (terms like "relative" are often redefined); may be empty
    /// for goals.
    pub definition: String,
}

impl PredicateSymbol {
    pub fn condition(name: impl Into<String>, arity: Vec<String>, definition: impl Into<String>) -> Self {
        PredicateSymbol {
            name: name.into(),
            arity,
            kind: PredicateKind::Condition,
            definition: definition.into(),
        }
    }

    pub fn goal(name: impl Into<String>, arity: Vec<String>) -> Self {
        PredicateSymbol {
            name: name.into(),
            arity,
            kind: PredicateKind::Goal,
            definition: String::new(),
        }
    }
}

/// An arity-0 function symbol: a named entity of a sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub sort: String,
}

impl Constant {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Constant {
            name: name.into(),
            sort: sort.into(),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

/// A term is a variable or a constant; both are referenced by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A predicate applied to terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", arg)?;
        }
        f.write_str(")")
    }
}

/// An atom or its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// One disjunct of a sentence antecedent: a nonempty conjunction of
/// condition literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct(pub Vec<Literal>);

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, lit) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}", lit)?;
        }
        Ok(())
    }
}

/// Where a sentence came from in the source document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    /// Verbatim source text of the clause this rule formalizes.
    pub text: String,
    /// Location tag within the source document (section, page, ...).
    pub location: String,
}

/// A universally quantified implication: for every sort-respecting binding
/// of `variables`, if some antecedent disjunct holds then the goal literal
/// holds. An empty antecedent asserts the goal unconditionally.
///
/// Ordinary sentences conclude a goal-predicate literal. Structural
/// sentences (`structural = true`) may conclude a condition literal instead,
/// which is how symmetries and other implicit relation properties are
/// written (`is_relative(p, q) -> is_relative(q, p)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    /// Quantified variables, in declaration order: (name, sort).
    pub variables: Vec<(String, String)>,
    pub antecedent: Vec<Conjunct>,
    pub goal: Literal,
    pub structural: bool,
    pub provenance: Provenance,
}

/// A goal predicate applied to constants; the question a decision answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalInstance {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GoalInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(arg)?;
        }
        f.write_str(")")
    }
}

/// The vocabulary: sorts, predicates, and constants. A knowledge base
/// carries a signature with no constants; claims extend it per instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub sorts: Vec<Sort>,
    pub predicates: Vec<PredicateSymbol>,
    pub constants: Vec<Constant>,
}

impl Signature {
    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSymbol> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&Constant> {
        self.constants.iter().find(|c| c.name == name)
    }

    /// Constants of one sort, in declaration order.
    pub fn constants_of_sort<'a>(&'a self, sort: &'a str) -> impl Iterator<Item = &'a Constant> {
        self.constants.iter().filter(move |c| c.sort == sort)
    }

    /// A copy of this signature extended with the given constants.
    pub fn with_constants(&self, constants: &[Constant]) -> Signature {
        let mut sig = self.clone();
        sig.constants.extend_from_slice(constants);
        sig
    }
}

/// Checks signature invariants: identifier grammar, unique names, and
/// referential closure (every referenced sort is declared). Returns one
/// diagnostic per violation, in traversal order; pure.
pub fn validate_signature(sig: &Signature) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen_sorts = BTreeSet::new();
    for sort in &sig.sorts {
        if !is_identifier(&sort.name) {
            diags.push(Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("sort name `{}` is not a valid identifier", sort.name),
            ));
        }
        if !seen_sorts.insert(sort.name.as_str()) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateSort,
                format!("sort `{}` declared more than once", sort.name),
            ));
        }
    }

    let mut seen_preds = BTreeSet::new();
    for pred in &sig.predicates {
        if !is_identifier(&pred.name) {
            diags.push(Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("predicate name `{}` is not a valid identifier", pred.name),
            ));
        }
        if !seen_preds.insert(pred.name.as_str()) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicatePredicate,
                format!("predicate `{}` declared more than once", pred.name),
            ));
        }
        for (i, sort) in pred.arity.iter().enumerate() {
            if !sig.has_sort(sort) {
                diags.push(Diagnostic::error(
                    DiagCode::UnknownSort,
                    format!("unknown sort `{}` at {}/arg{}", sort, pred.name, i),
                ));
            }
        }
    }

    let mut seen_consts = BTreeSet::new();
    for constant in &sig.constants {
        if !is_constant_name(&constant.name) {
            diags.push(Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("constant name `{}` is not a valid identifier", constant.name),
            ));
        }
        if !seen_consts.insert(constant.name.as_str()) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateConstant,
                format!("constant `{}` declared more than once", constant.name),
            ));
        }
        if !sig.has_sort(&constant.sort) {
            diags.push(Diagnostic::error(
                DiagCode::UnknownSort,
                format!(
                    "constant `{}` has undeclared sort `{}`",
                    constant.name, constant.sort
                ),
            ));
        }
        let stem = constant_stem(&constant.name);
        if stem != stem.to_ascii_uppercase() {
            diags.push(Diagnostic::lint(
                DiagCode::ConstantCase,
                format!("constant `{}` is conventionally uppercase", constant.name),
            ));
        }
    }
    diags
}

/// Variable environment for checking one sentence.
struct VarEnv<'a> {
    vars: &'a [(String, String)],
}

impl<'a> VarEnv<'a> {
    fn sort_of(&self, name: &str) -> Option<&'a str> {
        self.vars
            .iter()
            .find(|(v, _)| v == name)
            .map(|(_, s)| s.as_str())
    }
}

/// Checks one literal of a sentence against the signature and variable
/// environment. `constants_allowed` is false inside theory sentences, where
/// only variables may appear.
fn check_sentence_literal(
    sig: &Signature,
    env: &VarEnv<'_>,
    lit: &Literal,
    where_: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let Some(pred) = sig.predicate(&lit.atom.predicate) else {
        diags.push(Diagnostic::error(
            DiagCode::UnknownPredicate,
            format!("unknown predicate `{}` in {}", lit.atom.predicate, where_),
        ));
        return;
    };
    if lit.atom.args.len() != pred.arity.len() {
        diags.push(Diagnostic::error(
            DiagCode::ArityMismatch,
            format!(
                "`{}` expects {} argument(s), got {} in {}",
                pred.name,
                pred.arity.len(),
                lit.atom.args.len(),
                where_
            ),
        ));
        return;
    }
    for (i, (arg, expected)) in lit.atom.args.iter().zip(&pred.arity).enumerate() {
        match arg {
            Term::Variable(v) => match env.sort_of(v) {
                None => diags.push(Diagnostic::error(
                    DiagCode::UnboundVariable,
                    format!("unbound variable `{}` at {}/arg{} in {}", v, pred.name, i, where_),
                )),
                Some(actual) if actual != expected => diags.push(Diagnostic::error(
                    DiagCode::SortMismatch,
                    format!(
                        "variable `{}` has sort `{}`, expected `{}` at {}/arg{} in {}",
                        v, actual, expected, pred.name, i, where_
                    ),
                )),
                Some(_) => {}
            },
            Term::Constant(c) => {
                // Theory sentences quantify over variables only; at the
                // knowledge-base stage the constant set is empty.
                diags.push(Diagnostic::error(
                    DiagCode::ConstantInRule,
                    format!("constant `{}` not allowed in {}", c, where_),
                ));
            }
        }
    }
}

/// Checks one sentence against a valid signature: closedness, arity and
/// sort agreement, and condition/goal placement. Pure; diagnostics come
/// back in a fixed traversal order.
pub fn sort_check(sig: &Signature, sentence: &Sentence) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if !is_identifier(&sentence.id) {
        diags.push(Diagnostic::error(
            DiagCode::InvalidIdentifier,
            format!("rule id `{}` is not a valid identifier", sentence.id),
        ));
    }

    let mut seen = BTreeSet::new();
    for (name, sort) in &sentence.variables {
        if !seen.insert(name.as_str()) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateVariable,
                format!("variable `{}` declared twice in rule {}", name, sentence.id),
            ));
        }
        if !sig.has_sort(sort) {
            diags.push(Diagnostic::error(
                DiagCode::UnknownSort,
                format!(
                    "variable `{}` has undeclared sort `{}` in rule {}",
                    name, sort, sentence.id
                ),
            ));
        }
    }

    let env = VarEnv {
        vars: &sentence.variables,
    };
    let where_ant = format!("antecedent of rule {}", sentence.id);
    for conjunct in &sentence.antecedent {
        for lit in &conjunct.0 {
            check_sentence_literal(sig, &env, lit, &where_ant, &mut diags);
            if let Some(pred) = sig.predicate(&lit.atom.predicate) {
                if pred.kind == PredicateKind::Goal {
                    diags.push(Diagnostic::error(
                        DiagCode::GoalPredicateInAntecedent,
                        format!(
                            "goal predicate `{}` may not appear in the antecedent of rule {}",
                            pred.name, sentence.id
                        ),
                    ));
                }
            }
        }
    }

    let where_goal = format!("consequent of rule {}", sentence.id);
    check_sentence_literal(sig, &env, &sentence.goal, &where_goal, &mut diags);
    if let Some(pred) = sig.predicate(&sentence.goal.atom.predicate) {
        if pred.kind == PredicateKind::Condition && !sentence.structural {
            diags.push(Diagnostic::error(
                DiagCode::ConditionPredicateAsGoal,
                format!(
                    "condition predicate `{}` as consequent requires a structural rule ({})",
                    pred.name, sentence.id
                ),
            ));
        }
    }
    diags
}

/// Checks a ground literal (a claim fact) against the signature: predicate
/// known and a condition, arguments are declared constants of the right
/// sorts.
pub fn check_fact(sig: &Signature, fact: &Literal) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let Some(pred) = sig.predicate(&fact.atom.predicate) else {
        diags.push(Diagnostic::error(
            DiagCode::UnknownPredicate,
            format!("unknown predicate `{}` in fact", fact.atom.predicate),
        ));
        return diags;
    };
    if pred.kind == PredicateKind::Goal {
        diags.push(Diagnostic::error(
            DiagCode::GoalFactForbidden,
            format!(
                "claims may not assert goal predicate `{}` as a fact",
                pred.name
            ),
        ));
    }
    if fact.atom.args.len() != pred.arity.len() {
        diags.push(Diagnostic::error(
            DiagCode::ArityMismatch,
            format!(
                "`{}` expects {} argument(s), got {} in fact",
                pred.name,
                pred.arity.len(),
                fact.atom.args.len()
            ),
        ));
        return diags;
    }
    for (i, (arg, expected)) in fact.atom.args.iter().zip(&pred.arity).enumerate() {
        match arg {
            Term::Variable(v) => diags.push(Diagnostic::error(
                DiagCode::FactNotGround,
                format!("fact contains variable `{}` at {}/arg{}", v, pred.name, i),
            )),
            Term::Constant(name) => match sig.constant(name) {
                None => diags.push(Diagnostic::error(
                    DiagCode::UnknownConstant,
                    format!("unknown constant `{}` at {}/arg{}", name, pred.name, i),
                )),
                Some(c) if c.sort != *expected => diags.push(Diagnostic::error(
                    DiagCode::SortMismatch,
                    format!(
                        "constant `{}` has sort `{}`, expected `{}` at {}/arg{}",
                        name, c.sort, expected, pred.name, i
                    ),
                )),
                Some(_) => {}
            },
        }
    }
    diags
}

/// Checks a goal instance: the predicate must be a declared goal and the
/// arguments declared constants of matching sorts.
pub fn check_goal_instance(sig: &Signature, goal: &GoalInstance) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let Some(pred) = sig.predicate(&goal.predicate) else {
        diags.push(Diagnostic::error(
            DiagCode::GoalNotDeclared,
            format!("goal predicate `{}` is not declared", goal.predicate),
        ));
        return diags;
    };
    if pred.kind != PredicateKind::Goal {
        diags.push(Diagnostic::error(
            DiagCode::GoalNotDeclared,
            format!("predicate `{}` is not a goal predicate", goal.predicate),
        ));
    }
    if goal.args.len() != pred.arity.len() {
        diags.push(Diagnostic::error(
            DiagCode::ArityMismatch,
            format!(
                "goal `{}` expects {} argument(s), got {}",
                pred.name,
                pred.arity.len(),
                goal.args.len()
            ),
        ));
        return diags;
    }
    for (i, (arg, expected)) in goal.args.iter().zip(&pred.arity).enumerate() {
        match sig.constant(arg) {
            None => diags.push(Diagnostic::error(
                DiagCode::UnknownConstant,
                format!("unknown constant `{}` at {}/arg{}", arg, pred.name, i),
            )),
            Some(c) if c.sort != *expected => diags.push(Diagnostic::error(
                DiagCode::SortMismatch,
                format!(
                    "constant `{}` has sort `{}`, expected `{}` at {}/arg{}",
                    arg, c.sort, expected, pred.name, i
                ),
            )),
            Some(_) => {}
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn person_sig() -> Signature {
        Signature {
            sorts: vec![Sort::new("Person")],
            predicates: vec![
                PredicateSymbol::condition("is_sick", vec!["Person".into()], "suffers an acute illness"),
                PredicateSymbol::goal("is_covered", vec!["Person".into()]),
            ],
            constants: vec![],
        }
    }

    #[test]
    fn minimal_signature_is_valid() {
        assert!(validate_signature(&person_sig()).is_empty());
    }

    #[test]
    fn undeclared_sort_in_predicate_is_reported() {
        let sig = Signature {
            sorts: vec![],
            predicates: vec![PredicateSymbol::condition(
                "is_relative",
                vec!["Person".into(), "Person".into()],
                "",
            )],
            constants: vec![],
        };
        let diags = validate_signature(&sig);
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.code == DiagCode::UnknownSort));
        assert!(diags[0].message.contains("is_relative/arg0"));
    }

    #[test]
    fn duplicate_predicate_is_reported() {
        let mut sig = person_sig();
        sig.predicates.push(PredicateSymbol::goal("is_covered", vec!["Person".into()]));
        let diags = validate_signature(&sig);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::DuplicatePredicate);
    }

    fn rule(antecedent_pred: &str, goal_pred: &str) -> Sentence {
        let var = || Term::Variable("p".into());
        Sentence {
            id: "r1".into(),
            variables: vec![("p".into(), "Person".into())],
            antecedent: vec![Conjunct(vec![Literal::positive(Atom::new(
                antecedent_pred,
                vec![var()],
            ))])],
            goal: Literal::positive(Atom::new(goal_pred, vec![var()])),
            structural: false,
            provenance: Provenance::default(),
        }
    }

    #[test]
    fn well_typed_sentence_passes() {
        assert!(sort_check(&person_sig(), &rule("is_sick", "is_covered")).is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let mut sig = person_sig();
        sig.predicates.push(PredicateSymbol::condition(
            "is_relative",
            vec!["Person".into(), "Person".into()],
            "",
        ));
        let diags = sort_check(&sig, &rule("is_relative", "is_covered"));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::ArityMismatch);
    }

    #[test]
    fn swapped_kinds_yield_both_placement_errors() {
        let diags = sort_check(&person_sig(), &rule("is_covered", "is_sick"));
        let codes: Vec<_> = diags.iter().map(|d| d.code).collect();
        assert!(codes.contains(&DiagCode::GoalPredicateInAntecedent));
        assert!(codes.contains(&DiagCode::ConditionPredicateAsGoal));
    }

    #[test]
    fn structural_rule_may_conclude_condition() {
        let mut s = rule("is_sick", "is_sick");
        s.structural = true;
        assert!(sort_check(&person_sig(), &s).is_empty());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let mut s = rule("is_sick", "is_covered");
        s.antecedent[0].0[0].atom.args[0] = Term::Variable("q".into());
        let diags = sort_check(&person_sig(), &s);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::UnboundVariable);
    }

    #[test]
    fn validation_is_pure_and_order_stable() {
        let sig = Signature {
            sorts: vec![],
            predicates: vec![
                PredicateSymbol::condition("a", vec!["X".into()], ""),
                PredicateSymbol::condition("b", vec!["Y".into()], ""),
            ],
            constants: vec![],
        };
        assert_eq!(validate_signature(&sig), validate_signature(&sig));
    }

    #[test]
    fn goal_fact_is_forbidden() {
        let mut sig = person_sig();
        sig.constants.push(Constant::new("ALICE", "Person"));
        let fact = Literal::positive(Atom::new("is_covered", vec![Term::Constant("ALICE".into())]));
        let diags = check_fact(&sig, &fact);
        assert_eq!(diags[0].code, DiagCode::GoalFactForbidden);
    }

    #[test]
    fn lowercase_constant_is_linted_not_rejected() {
        let mut sig = person_sig();
        sig.constants.push(Constant::new("alice", "Person"));
        let diags = validate_signature(&sig);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::ConstantCase);
        assert!(!diags[0].is_error());
    }
}
