//! Knowledge base and claim documents: the two inputs to a decision.
//!
//! A [`KnowledgeBase`] holds the vocabulary and theory formalized from a
//! policy document; its signature declares no constants. A
//! [`ClaimDocument`] supplies the per-claim constants and ground facts.
//! Both are immutable after construction and validated as whole documents.

use std::collections::BTreeSet;

use crate::diag::{DiagCode, Diagnostic};
use crate::fol::{
    self, Constant, Literal, PredicateKind, PredicateSymbol, Sentence, Signature,
};

/// Document-level metadata carried through serialization and digests.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KbMeta {
    pub name: String,
    pub version: String,
    /// Identifier of the policy document this theory was formalized from.
    pub source: String,
}

/// The formalized policy: signature plus theory.
///
/// Goal predicates are the `PredicateKind::Goal` entries of the signature;
/// they are not stored separately, so the two can never disagree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeBase {
    pub meta: KbMeta,
    pub signature: Signature,
    pub theory: Vec<Sentence>,
}

impl KnowledgeBase {
    /// Goal predicates in declaration order.
    pub fn goals(&self) -> impl Iterator<Item = &PredicateSymbol> {
        self.signature
            .predicates
            .iter()
            .filter(|p| p.kind == PredicateKind::Goal)
    }

    /// Condition predicates in declaration order.
    pub fn conditions(&self) -> impl Iterator<Item = &PredicateSymbol> {
        self.signature
            .predicates
            .iter()
            .filter(|p| p.kind == PredicateKind::Condition)
    }

    pub fn sentence(&self, id: &str) -> Option<&Sentence> {
        self.theory.iter().find(|s| s.id == id)
    }

    /// Validates the whole document: signature invariants, empty constant
    /// set, sentence well-formedness, unique rule ids, and advisory lints.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = fol::validate_signature(&self.signature);
        for constant in &self.signature.constants {
            diags.push(Diagnostic::error(
                DiagCode::ConstantInRule,
                format!(
                    "knowledge base declares constant `{}`; constants belong to claims",
                    constant.name
                ),
            ));
        }

        let mut seen = BTreeSet::new();
        for sentence in &self.theory {
            if !seen.insert(sentence.id.as_str()) {
                diags.push(Diagnostic::error(
                    DiagCode::DuplicateRule,
                    format!("rule id `{}` used more than once", sentence.id),
                ));
            }
            diags.extend(fol::sort_check(&self.signature, sentence));
            if sentence.provenance.text.is_empty() {
                diags.push(Diagnostic::lint(
                    DiagCode::EmptyProvenance,
                    format!("rule `{}` has no source text attached", sentence.id),
                ));
            }
        }

        for pred in self.conditions() {
            if pred.definition.is_empty() {
                diags.push(Diagnostic::lint(
                    DiagCode::MissingDefinition,
                    format!("condition predicate `{}` has no definition", pred.name),
                ));
            }
        }

        if self.signature.sorts.is_empty()
            && self.signature.predicates.is_empty()
            && self.theory.is_empty()
        {
            diags.push(Diagnostic::warning(
                DiagCode::EmptyKb,
                "knowledge base is empty",
            ));
        }
        diags
    }
}

/// One claim: its constants and asserted ground facts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClaimDocument {
    pub id: String,
    pub constants: Vec<Constant>,
    pub facts: Vec<Literal>,
    /// Original natural-language claim text, when the claim came through
    /// extraction. Echoed in reports; never consulted by the decision.
    pub raw_text: Option<String>,
}

impl ClaimDocument {
    /// The KB signature extended with this claim's constants — the
    /// vocabulary every fact and goal instance is checked against.
    pub fn extended_signature(&self, kb: &KnowledgeBase) -> Signature {
        kb.signature.with_constants(&self.constants)
    }

    /// Validates the claim against a knowledge base: claim id present,
    /// constants well-formed over declared sorts, facts ground and
    /// sort-checked, no goal-predicate facts.
    pub fn validate(&self, kb: &KnowledgeBase) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.id.is_empty() {
            diags.push(Diagnostic::error(
                DiagCode::MissingClaimId,
                "claim document has no id",
            ));
        } else if !fol::is_identifier(&self.id) {
            diags.push(Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("claim id `{}` is not a valid identifier", self.id),
            ));
        }

        let mut seen = BTreeSet::new();
        for constant in &self.constants {
            if !fol::is_constant_name(&constant.name) {
                diags.push(Diagnostic::error(
                    DiagCode::InvalidIdentifier,
                    format!("constant name `{}` is not a valid identifier", constant.name),
                ));
            }
            if !seen.insert(constant.name.as_str()) {
                diags.push(Diagnostic::error(
                    DiagCode::DuplicateConstant,
                    format!("constant `{}` declared more than once", constant.name),
                ));
            }
            if !kb.signature.has_sort(&constant.sort) {
                diags.push(Diagnostic::error(
                    DiagCode::UnknownSort,
                    format!(
                        "constant `{}` has undeclared sort `{}`",
                        constant.name, constant.sort
                    ),
                ));
            }
        }

        let sig = self.extended_signature(kb);
        for fact in &self.facts {
            diags.extend(fol::check_fact(&sig, fact));
        }
        diags
    }
}
