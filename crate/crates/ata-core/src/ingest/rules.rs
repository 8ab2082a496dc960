//! The deterministic, fully offline extractor: a per-KB rule table that
//! maps surface patterns in claim text to entities and relation facts.
//!
//! Rule-table grammar (UTF-8, one rule per line, `#` comments):
//!
//! ```text
//! entity Person <x> filed               # capture slot in angle brackets
//! relation is_sister <1> is the sister of <2>
//! relation !is_relative <1> is estranged from <2>
//! ```
//!
//! Entity patterns contain exactly one capture slot (any name); relation
//! patterns contain the numbered slots `<1>`..`<n>` exactly once each,
//! where n is the predicate's arity. Literal pattern words match tokens
//! case-insensitively; a slot captures whatever token stands in its
//! position. Matching is a pure function of (text, rules), so byte-equal
//! inputs always produce byte-equal extractions.

use serde::{Deserialize, Serialize};

use crate::diag::{DiagCode, Diagnostic, Span};
use crate::fol::{constant_stem, Atom, Constant, Literal, PredicateKind, Term};
use crate::kb::KnowledgeBase;
use crate::parse::Parsed;

/// One token of a surface pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatTok {
    /// A literal word, stored lowercased; matches case-insensitively.
    Word(String),
    /// A capture slot. For entity rules the index is always 0; for
    /// relation rules it is the 0-based argument position.
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRule {
    pub sort: String,
    pub pattern: Vec<PatTok>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRule {
    pub predicate: String,
    pub negated: bool,
    pub pattern: Vec<PatTok>,
}

/// A parsed `.atarules` table, validated against a knowledge base.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTable {
    pub entities: Vec<EntityRule>,
    pub relations: Vec<RelationRule>,
}

/// Splits claim text into clean tokens: whitespace-separated, with
/// non-alphanumeric characters trimmed from both ends (interior
/// punctuation like hyphens or apostrophes is kept).
pub(crate) fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// Canonical constant stem for a captured surface form: uppercased, with
/// every non-ASCII-alphanumeric character replaced by `_`, prefixed with
/// `N` if the result would not start with a letter. Always a valid
/// identifier.
pub fn normalize_stem(surface: &str) -> String {
    let mut stem: String = surface
        .to_uppercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if !stem.starts_with(|c: char| c.is_ascii_alphabetic()) {
        stem.insert(0, 'N');
    }
    stem
}

fn parse_pattern(
    words: &[&str],
    line: u32,
    diags: &mut Vec<Diagnostic>,
) -> Vec<PatTok> {
    words
        .iter()
        .map(|w| {
            if let Some(name) = w.strip_prefix('<').and_then(|w| w.strip_suffix('>')) {
                match name.parse::<usize>() {
                    Ok(n) if n >= 1 => PatTok::Slot(n - 1),
                    _ => {
                        if name.is_empty() {
                            diags.push(
                                Diagnostic::error(DiagCode::SyntaxError, "empty capture slot `<>`")
                                    .with_span(Span::new(line, 1, 0)),
                            );
                        }
                        // Named (non-numeric) slots are only meaningful in
                        // entity rules, which have a single capture.
                        PatTok::Slot(0)
                    }
                }
            } else {
                PatTok::Word(w.to_lowercase())
            }
        })
        .collect()
}

fn slot_positions(pattern: &[PatTok]) -> Vec<usize> {
    pattern
        .iter()
        .filter_map(|t| match t {
            PatTok::Slot(i) => Some(*i),
            PatTok::Word(_) => None,
        })
        .collect()
}

/// Parses a rule table and validates every rule against the KB signature:
/// unknown sorts/predicates, goal-predicate targets, and malformed capture
/// slots are all errors.
pub fn parse_rules(text: &str, kb: &KnowledgeBase) -> Parsed<RuleTable> {
    let mut diags = Vec::new();
    let mut table = RuleTable::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let span = Span::new(line_no, 1, line.trim_end().chars().count() as u32);
        match words[0] {
            "entity" => {
                if words.len() < 3 {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::SyntaxError,
                            "expected `entity <Sort> <pattern>`",
                        )
                        .with_span(span),
                    );
                    continue;
                }
                let sort = words[1];
                if !kb.signature.has_sort(sort) {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::UnknownSort,
                            format!("unknown sort `{}` in entity rule", sort),
                        )
                        .with_span(span),
                    );
                    continue;
                }
                let pattern = parse_pattern(&words[2..], line_no, &mut diags);
                if slot_positions(&pattern).len() != 1 {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::SyntaxError,
                            "entity pattern must contain exactly one capture slot",
                        )
                        .with_span(span),
                    );
                    continue;
                }
                table.entities.push(EntityRule {
                    sort: sort.to_string(),
                    pattern,
                });
            }
            "relation" => {
                if words.len() < 3 {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::SyntaxError,
                            "expected `relation <predicate> <pattern>`",
                        )
                        .with_span(span),
                    );
                    continue;
                }
                let (negated, pred_name) = match words[1].strip_prefix('!') {
                    Some(p) => (true, p),
                    None => (false, words[1]),
                };
                let Some(pred) = kb.signature.predicate(pred_name) else {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::UnknownPredicate,
                            format!("unknown predicate `{}` in relation rule", pred_name),
                        )
                        .with_span(span),
                    );
                    continue;
                };
                if pred.kind == PredicateKind::Goal {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::GoalFactForbidden,
                            format!(
                                "goal predicate `{}` may not be an extraction target",
                                pred_name
                            ),
                        )
                        .with_span(span),
                    );
                    continue;
                }
                let arity = pred.arity.len();
                let pattern = parse_pattern(&words[2..], line_no, &mut diags);
                let mut slots = slot_positions(&pattern);
                slots.sort_unstable();
                let expected: Vec<usize> = (0..arity).collect();
                if slots != expected {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::SyntaxError,
                            format!(
                                "relation pattern for `{}` must contain slots <1>..<{}> exactly once each",
                                pred_name, arity
                            ),
                        )
                        .with_span(span),
                    );
                    continue;
                }
                table.relations.push(RelationRule {
                    predicate: pred_name.to_string(),
                    negated,
                    pattern,
                });
            }
            other => {
                diags.push(
                    Diagnostic::error(
                        DiagCode::SyntaxError,
                        format!("unknown rule keyword `{}`; expected entity or relation", other),
                    )
                    .with_span(span),
                );
            }
        }
    }
    let value = if crate::diag::has_errors(&diags) {
        None
    } else {
        Some(table)
    };
    Parsed {
        value,
        diagnostics: diags,
    }
}

/// Matches `pattern` at `start`, returning captured (slot, surface) pairs.
fn match_at(pattern: &[PatTok], tokens: &[String], start: usize) -> Option<Vec<(usize, String)>> {
    if start + pattern.len() > tokens.len() {
        return None;
    }
    let mut captures = Vec::new();
    for (offset, tok) in pattern.iter().enumerate() {
        let word = &tokens[start + offset];
        match tok {
            PatTok::Word(w) => {
                if !word.to_lowercase().eq(w) {
                    return None;
                }
            }
            PatTok::Slot(i) => captures.push((*i, word.clone())),
        }
    }
    Some(captures)
}

/// Surface forms captured for `sort`, ordered by first occurrence in the
/// text (ties broken by rule order), deduplicated case-insensitively.
pub fn match_entities(table: &RuleTable, sort: &str, text: &str) -> Vec<String> {
    let tokens = tokenize(text);
    let mut found: Vec<(usize, usize, String)> = Vec::new();
    for (rule_idx, rule) in table
        .entities
        .iter()
        .enumerate()
        .filter(|(_, r)| r.sort == sort)
    {
        for start in 0..tokens.len() {
            if let Some(caps) = match_at(&rule.pattern, &tokens, start) {
                for (_, surface) in caps {
                    found.push((start, rule_idx, surface));
                }
            }
        }
    }
    found.sort_by_key(|e| (e.0, e.1));
    let mut seen: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for (_, _, surface) in found {
        let folded = surface.to_lowercase();
        if !seen.contains(&folded) {
            seen.push(folded);
            out.push(surface);
        }
    }
    out
}

/// Names a sort's captured surfaces: normalized stems, with `_2`, `_3`, …
/// appended on collision between distinct surfaces that normalize alike.
pub fn name_entities(surfaces: &[String]) -> Vec<String> {
    let mut taken: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for surface in surfaces {
        let stem = normalize_stem(surface);
        let mut candidate = stem.clone();
        let mut n = 2;
        while taken.contains(&candidate) {
            candidate = format!("{}_{}", stem, n);
            n += 1;
        }
        taken.push(candidate.clone());
        out.push(candidate);
    }
    out
}

/// Resolves a captured surface form to one of the available constants: the
/// first constant of the wanted sort whose stem equals the normalized
/// capture (so `Bob` resolves to `BOB` and to the qualified `BOB@Person`).
fn resolve(surface: &str, want_sort: &str, constants: &[Constant]) -> Option<String> {
    let stem = normalize_stem(surface);
    constants
        .iter()
        .find(|c| c.sort == want_sort && constant_stem(&c.name).eq_ignore_ascii_case(&stem))
        .map(|c| c.name.clone())
}

/// Ground literals for `predicate` matched in the text, each argument
/// resolved against the supplied constants; matches with any unresolvable
/// slot produce nothing. First-occurrence order, exact duplicates merged.
pub fn match_relations(
    table: &RuleTable,
    predicate: &str,
    arity: &[String],
    constants: &[Constant],
    text: &str,
) -> Vec<Literal> {
    let tokens = tokenize(text);
    let mut found: Vec<(usize, usize, Literal)> = Vec::new();
    for (rule_idx, rule) in table
        .relations
        .iter()
        .enumerate()
        .filter(|(_, r)| r.predicate == predicate)
    {
        for start in 0..tokens.len() {
            let Some(caps) = match_at(&rule.pattern, &tokens, start) else {
                continue;
            };
            let mut args: Vec<Option<String>> = vec![None; arity.len()];
            for (slot, surface) in caps {
                args[slot] = resolve(&surface, &arity[slot], constants);
            }
            let Some(args) = args.into_iter().collect::<Option<Vec<String>>>() else {
                continue;
            };
            let atom = Atom {
                predicate: predicate.to_string(),
                args: args.into_iter().map(Term::Constant).collect(),
            };
            let lit = if rule.negated {
                Literal::negative(atom)
            } else {
                Literal::positive(atom)
            };
            found.push((start, rule_idx, lit));
        }
    }
    found.sort_by_key(|e| (e.0, e.1));
    let mut out: Vec<Literal> = Vec::new();
    for (_, _, lit) in found {
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    out
}
