//! Canonical text serialization for knowledge bases and claims.
//!
//! The output re-parses to a structurally equal document (round-trip
//! identity) and is byte-deterministic: declaration order is preserved,
//! whitespace is normalized, strings are escaped minimally. Canonical
//! bytes are what input digests are computed over, so any formatting
//! change here is a breaking change for audit trails.

use std::fmt::Write as _;

use crate::fol::{Conjunct, Literal, PredicateKind, Sentence, Term};
use crate::kb::{ClaimDocument, KnowledgeBase};

/// Quotes a string for the document grammar: `\` `"` newline and tab are
/// escaped; everything else (including non-ASCII) passes through verbatim.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

fn write_term(out: &mut String, term: &Term) {
    out.push_str(term.name());
}

fn write_literal(out: &mut String, lit: &Literal) {
    if lit.negated {
        out.push('!');
    }
    out.push_str(&lit.atom.predicate);
    out.push('(');
    for (i, arg) in lit.atom.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, arg);
    }
    out.push(')');
}

fn write_sentence(out: &mut String, s: &Sentence) {
    if s.structural {
        out.push_str("structural ");
    }
    let _ = write!(out, "rule {}: ", s.id);
    if !s.variables.is_empty() {
        out.push_str("forall ");
        for (i, (v, sort)) in s.variables.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}:{}", v, sort);
        }
        out.push_str(". ");
    }
    for (i, Conjunct(lits)) in s.antecedent.iter().enumerate() {
        if i > 0 {
            out.push_str(" | ");
        }
        for (j, lit) in lits.iter().enumerate() {
            if j > 0 {
                out.push_str(" & ");
            }
            write_literal(out, lit);
        }
    }
    if !s.antecedent.is_empty() {
        out.push_str(" -> ");
    }
    write_literal(out, &s.goal);
    if !s.provenance.text.is_empty() || !s.provenance.location.is_empty() {
        let _ = write!(
            out,
            " @ {} {}",
            quote(&s.provenance.location),
            quote(&s.provenance.text)
        );
    }
    out.push('\n');
}

/// Renders a knowledge base in canonical form. `parse_kb` on the result
/// yields a structurally equal document.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    if !kb.meta.name.is_empty() {
        let _ = writeln!(out, "kb {}", kb.meta.name);
    }
    if !kb.meta.version.is_empty() {
        let _ = writeln!(out, "version {}", kb.meta.version);
    }
    if !kb.meta.source.is_empty() {
        let _ = writeln!(out, "source {}", kb.meta.source);
    }

    for sort in &kb.signature.sorts {
        let _ = writeln!(out, "sort {}", sort.name);
    }
    for pred in &kb.signature.predicates {
        let keyword = match pred.kind {
            PredicateKind::Condition => "cond",
            PredicateKind::Goal => "goal",
        };
        let _ = write!(out, "{} {}(", keyword, pred.name);
        for (i, sort) in pred.arity.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(sort);
        }
        out.push(')');
        if !pred.definition.is_empty() {
            out.push(' ');
            out.push_str(&quote(&pred.definition));
        }
        out.push('\n');
    }
    for sentence in &kb.theory {
        write_sentence(&mut out, sentence);
    }
    out
}

/// Renders a claim document in canonical form; round-trips through
/// `parse_claim`.
pub fn serialize_claim(claim: &ClaimDocument) -> String {
    let mut out = String::new();
    if !claim.id.is_empty() {
        let _ = writeln!(out, "claim {}", claim.id);
    }
    if let Some(text) = &claim.raw_text {
        let _ = writeln!(out, "text {}", quote(text));
    }
    for c in &claim.constants {
        let _ = writeln!(out, "const {}: {}", c.name, c.sort);
    }
    for fact in &claim.facts {
        out.push_str("fact ");
        write_literal(&mut out, fact);
        out.push('\n');
    }
    out
}
