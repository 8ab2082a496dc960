//! Parsers for the knowledge-base and claim-document languages.
//!
//! Both languages are line-oriented: every declaration fits on one line,
//! `#` starts a comment, and blank lines are ignored. Parsing is total —
//! it never aborts mid-file; each bad line yields a diagnostic and the
//! parse continues, so a single run reports every problem in the file.
//!
//! Knowledge-base grammar:
//!
//! ```text
//! kb TravelPolicy
//! version 3
//! source TRAVEL-TC-2024
//! sort Person
//! cond is_sick(Person) "suffers an acute illness"
//! goal is_covered(Person)
//! rule r1: forall p:Person. is_sick(p) -> is_covered(p) @ "2.1" "Acute illness is covered."
//! structural rule sym: forall p:Person, q:Person. is_sister(p, q) -> is_sister(q, p)
//! ```
//!
//! Rule bodies use `&` for conjunction, `|` to separate antecedent
//! disjuncts, and `!` for negation. A body without `->` asserts its goal
//! literal unconditionally. The optional `@ "<location>" "<text>"` suffix
//! attaches source provenance.
//!
//! Claim grammar:
//!
//! ```text
//! claim CLM001
//! text "Alice, the sister of Bob, fell sick."
//! const ALICE: Person
//! fact is_sister(ALICE, BOB)
//! fact !is_relative(ALICE, BOB)
//! ```
//!
//! Constant names may carry a sort qualifier (`ALICE@Person`) when the
//! same surface form was extracted under two sorts.

use std::collections::BTreeSet;

use crate::diag::{DiagCode, Diagnostic, Span};
use crate::fol::{
    self, Atom, Conjunct, Constant, Literal, PredicateKind, PredicateSymbol, Provenance,
    Sentence, Signature, Sort, Term,
};
use crate::kb::{ClaimDocument, KbMeta, KnowledgeBase};

/// Outcome of a total parse: a value when no error occurred, plus every
/// diagnostic collected along the way (warnings and lints survive success).
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: Option<T>,
    pub diagnostics: Vec<Diagnostic>,
}

impl<T> Parsed<T> {
    pub fn has_errors(&self) -> bool {
        crate::diag::has_errors(&self.diagnostics)
    }

    /// The value, or the full diagnostic list when parsing failed.
    pub fn into_result(self) -> Result<T, Vec<Diagnostic>> {
        match self.value {
            Some(v) => Ok(v),
            None => Err(self.diagnostics),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Arrow,
    Amp,
    Pipe,
    Bang,
    At,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("`{}`", s),
            TokKind::Str(_) => "string".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Comma => "`,`".into(),
            TokKind::Colon => "`:`".into(),
            TokKind::Dot => "`.`".into(),
            TokKind::Arrow => "`->`".into(),
            TokKind::Amp => "`&`".into(),
            TokKind::Pipe => "`|`".into(),
            TokKind::Bang => "`!`".into(),
            TokKind::At => "`@`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    span: Span,
}

/// Tokenizes one line. Columns are 1-based character positions.
fn lex_line(line: &str, line_no: u32) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let col = i as u32 + 1;
        let simple = |kind: TokKind| Token {
            kind,
            span: Span::new(line_no, col, 1),
        };
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push(simple(TokKind::LParen));
                i += 1;
            }
            ')' => {
                toks.push(simple(TokKind::RParen));
                i += 1;
            }
            ',' => {
                toks.push(simple(TokKind::Comma));
                i += 1;
            }
            ':' => {
                toks.push(simple(TokKind::Colon));
                i += 1;
            }
            '.' => {
                toks.push(simple(TokKind::Dot));
                i += 1;
            }
            '&' => {
                toks.push(simple(TokKind::Amp));
                i += 1;
            }
            '|' => {
                toks.push(simple(TokKind::Pipe));
                i += 1;
            }
            '!' => {
                toks.push(simple(TokKind::Bang));
                i += 1;
            }
            '@' => {
                toks.push(simple(TokKind::At));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push(Token {
                        kind: TokKind::Arrow,
                        span: Span::new(line_no, col, 2),
                    });
                    i += 2;
                } else {
                    return Err(Diagnostic::error(
                        DiagCode::SyntaxError,
                        "expected `->`",
                    )
                    .with_span(Span::new(line_no, col, 1)));
                }
            }
            '"' => {
                let mut value = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => {
                            return Err(Diagnostic::error(
                                DiagCode::SyntaxError,
                                "unterminated string",
                            )
                            .with_span(Span::new(line_no, col, (j - i) as u32)));
                        }
                        Some('"') => {
                            j += 1;
                            break;
                        }
                        Some('\\') => match chars.get(j + 1) {
                            Some('"') => {
                                value.push('"');
                                j += 2;
                            }
                            Some('\\') => {
                                value.push('\\');
                                j += 2;
                            }
                            Some('n') => {
                                value.push('\n');
                                j += 2;
                            }
                            Some('t') => {
                                value.push('\t');
                                j += 2;
                            }
                            other => {
                                return Err(Diagnostic::error(
                                    DiagCode::SyntaxError,
                                    format!(
                                        "unknown escape `\\{}`",
                                        other.map(|c| c.to_string()).unwrap_or_default()
                                    ),
                                )
                                .with_span(Span::new(line_no, j as u32 + 1, 2)));
                            }
                        },
                        Some(&ch) => {
                            value.push(ch);
                            j += 1;
                        }
                    }
                }
                toks.push(Token {
                    kind: TokKind::Str(value),
                    span: Span::new(line_no, col, (j - i) as u32),
                });
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                toks.push(Token {
                    kind: TokKind::Ident(word),
                    span: Span::new(line_no, col, (j - i) as u32),
                });
                i = j;
            }
            other => {
                return Err(Diagnostic::error(
                    DiagCode::SyntaxError,
                    format!("unexpected character `{}`", other),
                )
                .with_span(Span::new(line_no, col, 1)));
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Token cursor
// ---------------------------------------------------------------------------

struct Cursor {
    toks: Vec<Token>,
    i: usize,
    line: u32,
    eol_col: u32,
}

impl Cursor {
    fn new(toks: Vec<Token>, line: u32) -> Self {
        let eol_col = toks
            .last()
            .map(|t| t.span.col + t.span.len)
            .unwrap_or(1);
        Cursor {
            toks,
            i: 0,
            line,
            eol_col,
        }
    }

    fn peek(&self) -> Option<&TokKind> {
        self.toks.get(self.i).map(|t| &t.kind)
    }

    fn peek_span(&self) -> Span {
        self.toks
            .get(self.i)
            .map(|t| t.span)
            .unwrap_or(Span::new(self.line, self.eol_col, 1))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == Some(kind) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(DiagCode::SyntaxError, message).with_span(self.peek_span())
    }

    fn expect(&mut self, kind: TokKind) -> Result<Span, Diagnostic> {
        match self.peek() {
            Some(k) if *k == kind => Ok(self.bump().unwrap().span),
            Some(k) => Err(self.error_here(format!(
                "expected {}, found {}",
                kind.describe(),
                k.describe()
            ))),
            None => Err(self.error_here(format!(
                "expected {} before end of line",
                kind.describe()
            ))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(TokKind::Ident(_)) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Ident(s) => Ok((s, t.span)),
                    _ => unreachable!(),
                }
            }
            Some(k) => Err(self.error_here(format!("expected {}, found {}", what, k.describe()))),
            None => Err(self.error_here(format!("expected {} before end of line", what))),
        }
    }

    fn expect_str(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(TokKind::Str(_)) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Str(s) => Ok((s, t.span)),
                    _ => unreachable!(),
                }
            }
            Some(k) => Err(self.error_here(format!("expected {}, found {}", what, k.describe()))),
            None => Err(self.error_here(format!("expected {} before end of line", what))),
        }
    }

    fn expect_end(&mut self) -> Result<(), Diagnostic> {
        if let Some(k) = self.peek() {
            Err(self.error_here(format!("unexpected {} at end of declaration", k.describe())))
        } else {
            Ok(())
        }
    }
}

/// Splits off the first word of a comment-stripped line, for keyword
/// dispatch before tokenization.
fn first_word(line: &str) -> Option<(&str, &str)> {
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return None;
    }
    let end = trimmed
        .find(|c: char| c.is_whitespace())
        .unwrap_or(trimmed.len());
    Some((&trimmed[..end], &trimmed[end..]))
}

/// Strips a trailing comment from a free-text line (used for `version` and
/// `source`, whose payload is not tokenized).
fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

fn check_declared_name(name: &str, span: Span, what: &str, diags: &mut Vec<Diagnostic>) {
    if !fol::is_identifier(name) {
        diags.push(
            Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("{} `{}` is not a valid identifier", what, name),
            )
            .with_span(span),
        );
    }
}

// ---------------------------------------------------------------------------
// Knowledge-base parser
// ---------------------------------------------------------------------------

/// Parses knowledge-base text. Total: collects every diagnostic; the value
/// is present iff no error was found. Declarations may appear in any order;
/// vocabulary is resolved before rule bodies are checked.
pub fn parse_kb(text: &str) -> Parsed<KnowledgeBase> {
    let mut diags = Vec::new();
    let mut meta = KbMeta::default();
    let mut sig = Signature::default();
    let mut theory: Vec<Sentence> = Vec::new();

    let mut seen_header: BTreeSet<&'static str> = BTreeSet::new();
    let mut pred_lines: Vec<(u32, &str)> = Vec::new();
    let mut rule_lines: Vec<(u32, &str)> = Vec::new();

    // Pass 1: headers and sorts; stash predicate and rule lines so the
    // vocabulary is complete before bodies are checked.
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let Some((word, rest)) = first_word(raw) else {
            continue;
        };
        match word {
            "kb" | "version" | "source" => {
                let value = strip_comment(rest).trim();
                let key: &'static str = match word {
                    "kb" => "kb",
                    "version" => "version",
                    _ => "source",
                };
                if !seen_header.insert(key) {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::DuplicateHeader,
                            format!("`{}` given more than once", key),
                        )
                        .with_span(Span::new(line_no, 1, word.len() as u32)),
                    );
                    continue;
                }
                match key {
                    "kb" => {
                        check_declared_name(
                            value,
                            Span::new(line_no, 1, raw.chars().count() as u32),
                            "knowledge base name",
                            &mut diags,
                        );
                        meta.name = value.to_string();
                    }
                    "version" => meta.version = value.to_string(),
                    _ => meta.source = value.to_string(),
                }
            }
            "sort" => match lex_line(raw, line_no) {
                Err(d) => diags.push(d),
                Ok(toks) => {
                    let mut cur = Cursor::new(toks, line_no);
                    cur.bump(); // `sort`
                    let parsed = cur
                        .expect_ident("sort name")
                        .and_then(|(name, span)| cur.expect_end().map(|_| (name, span)));
                    match parsed {
                        Err(d) => diags.push(d),
                        Ok((name, span)) => {
                            check_declared_name(&name, span, "sort name", &mut diags);
                            if sig.has_sort(&name) {
                                diags.push(
                                    Diagnostic::error(
                                        DiagCode::DuplicateSort,
                                        format!("sort `{}` declared more than once", name),
                                    )
                                    .with_span(span),
                                );
                            } else {
                                sig.sorts.push(Sort::new(name));
                            }
                        }
                    }
                }
            },
            "cond" | "goal" => pred_lines.push((line_no, raw)),
            "rule" | "structural" => rule_lines.push((line_no, raw)),
            other => diags.push(
                Diagnostic::error(
                    DiagCode::SyntaxError,
                    format!("unknown declaration `{}`", other),
                )
                .with_span(Span::new(line_no, 1, other.len() as u32)),
            ),
        }
    }

    // Pass 2: predicates.
    for (line_no, raw) in pred_lines {
        if let Some(p) = parse_pred_line(raw, line_no, &sig, &mut diags) {
            sig.predicates.push(p);
        }
    }

    // Pass 3: rules.
    let mut rule_ids = BTreeSet::new();
    for (line_no, raw) in rule_lines {
        if let Some(s) = parse_rule_line(raw, line_no, &sig, &mut rule_ids, &mut diags) {
            theory.push(s);
        }
    }

    if sig.sorts.is_empty() && sig.predicates.is_empty() && theory.is_empty() {
        diags.push(Diagnostic::warning(
            DiagCode::EmptyKb,
            "knowledge base is empty",
        ));
    }

    let value = if crate::diag::has_errors(&diags) {
        None
    } else {
        Some(KnowledgeBase {
            meta,
            signature: sig,
            theory,
        })
    };
    Parsed {
        value,
        diagnostics: diags,
    }
}

/// `cond name(Sort, ...) "definition"` or `goal name(Sort, ...)`.
fn parse_pred_line(
    raw: &str,
    line_no: u32,
    sig: &Signature,
    diags: &mut Vec<Diagnostic>,
) -> Option<PredicateSymbol> {
    let toks = match lex_line(raw, line_no) {
        Ok(t) => t,
        Err(d) => {
            diags.push(d);
            return None;
        }
    };
    let mut cur = Cursor::new(toks, line_no);
    let kind = match cur.bump().map(|t| t.kind) {
        Some(TokKind::Ident(w)) if w == "cond" => PredicateKind::Condition,
        _ => PredicateKind::Goal,
    };

    let inner = (|| -> Result<PredicateSymbol, Diagnostic> {
        let (name, name_span) = cur.expect_ident("predicate name")?;
        check_declared_name(&name, name_span, "predicate name", diags);
        cur.expect(TokKind::LParen)?;
        let mut arity = Vec::new();
        if !cur.eat(&TokKind::RParen) {
            loop {
                let (sort, span) = cur.expect_ident("sort name")?;
                if !sig.has_sort(&sort) {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::UnknownSort,
                            format!("unknown sort `{}` at {}/arg{}", sort, name, arity.len()),
                        )
                        .with_span(span),
                    );
                }
                arity.push(sort);
                if cur.eat(&TokKind::RParen) {
                    break;
                }
                cur.expect(TokKind::Comma)?;
            }
        }
        let definition = match cur.peek() {
            Some(TokKind::Str(_)) => cur.expect_str("definition")?.0,
            _ => String::new(),
        };
        cur.expect_end()?;
        if sig.predicate(&name).is_some() {
            diags.push(
                Diagnostic::error(
                    DiagCode::DuplicatePredicate,
                    format!("predicate `{}` declared more than once", name),
                )
                .with_span(name_span),
            );
            return Err(Diagnostic::error(DiagCode::DuplicatePredicate, String::new()));
        }
        if kind == PredicateKind::Condition && definition.is_empty() {
            diags.push(
                Diagnostic::lint(
                    DiagCode::MissingDefinition,
                    format!("condition predicate `{}` has no definition", name),
                )
                .with_span(name_span),
            );
        }
        Ok(PredicateSymbol {
            name,
            arity,
            kind,
            definition,
        })
    })();
    match inner {
        Ok(p) => Some(p),
        Err(d) => {
            // An empty message marks a duplicate already reported above.
            if !d.message.is_empty() {
                diags.push(d);
            }
            None
        }
    }
}

/// One variable binding context while parsing a rule body.
struct RuleVars {
    vars: Vec<(String, String)>,
}

impl RuleVars {
    fn sort_of(&self, name: &str) -> Option<&str> {
        self.vars
            .iter()
            .find(|(v, _)| v == name)
            .map(|(_, s)| s.as_str())
    }
}

/// `rule id: forall v:Sort, ... . dnf -> literal @ "loc" "text"` — also the
/// `structural rule` form and the arrow-less unconditional form.
fn parse_rule_line(
    raw: &str,
    line_no: u32,
    sig: &Signature,
    rule_ids: &mut BTreeSet<String>,
    diags: &mut Vec<Diagnostic>,
) -> Option<Sentence> {
    let toks = match lex_line(raw, line_no) {
        Ok(t) => t,
        Err(d) => {
            diags.push(d);
            return None;
        }
    };
    let mut cur = Cursor::new(toks, line_no);
    let structural = match cur.bump().map(|t| t.kind) {
        Some(TokKind::Ident(w)) if w == "structural" => {
            match cur.peek() {
                Some(TokKind::Ident(w2)) if w2 == "rule" => {
                    cur.bump();
                }
                _ => {
                    diags.push(cur.error_here("expected `rule` after `structural`"));
                    return None;
                }
            }
            true
        }
        _ => false,
    };

    let inner = (|| -> Result<Sentence, Diagnostic> {
        let (id, id_span) = cur.expect_ident("rule id")?;
        check_declared_name(&id, id_span, "rule id", diags);
        if !rule_ids.insert(id.clone()) {
            diags.push(
                Diagnostic::error(
                    DiagCode::DuplicateRule,
                    format!("rule id `{}` used more than once", id),
                )
                .with_span(id_span),
            );
        }
        cur.expect(TokKind::Colon)?;

        let mut vars = RuleVars { vars: Vec::new() };
        if matches!(cur.peek(), Some(TokKind::Ident(w)) if w == "forall") {
            cur.bump();
            loop {
                let (v, v_span) = cur.expect_ident("variable name")?;
                check_declared_name(&v, v_span, "variable name", diags);
                cur.expect(TokKind::Colon)?;
                let (sort, sort_span) = cur.expect_ident("sort name")?;
                if !sig.has_sort(&sort) {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::UnknownSort,
                            format!("unknown sort `{}` for variable `{}`", sort, v),
                        )
                        .with_span(sort_span),
                    );
                }
                if vars.sort_of(&v).is_some() {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::DuplicateVariable,
                            format!("variable `{}` declared twice", v),
                        )
                        .with_span(v_span),
                    );
                } else {
                    vars.vars.push((v, sort));
                }
                if cur.eat(&TokKind::Dot) {
                    break;
                }
                cur.expect(TokKind::Comma)?;
            }
        }

        // Parse a DNF; if an arrow follows it was the antecedent, otherwise
        // it must be a single literal asserted unconditionally.
        let first = parse_dnf(&mut cur, sig, &vars, diags)?;
        let (antecedent, goal) = if cur.eat(&TokKind::Arrow) {
            for conjunct in &first {
                for lit in &conjunct.0 {
                    if let Some(p) = sig.predicate(&lit.atom.predicate) {
                        if p.kind == PredicateKind::Goal {
                            diags.push(Diagnostic::error(
                                DiagCode::GoalPredicateInAntecedent,
                                format!(
                                    "goal predicate `{}` may not appear in an antecedent",
                                    p.name
                                ),
                            ));
                        }
                    }
                }
            }
            let goal = parse_literal(&mut cur, sig, &vars, diags)?;
            (first, goal)
        } else {
            match first.as_slice() {
                [Conjunct(lits)] if lits.len() == 1 => (Vec::new(), lits[0].clone()),
                _ => {
                    return Err(cur.error_here("expected `->` after antecedent"));
                }
            }
        };

        if let Some(p) = sig.predicate(&goal.atom.predicate) {
            if p.kind == PredicateKind::Condition && !structural {
                diags.push(Diagnostic::error(
                    DiagCode::ConditionPredicateAsGoal,
                    format!(
                        "condition predicate `{}` as consequent requires `structural rule`",
                        p.name
                    ),
                ));
            }
        }

        let provenance = if cur.eat(&TokKind::At) {
            let (location, _) = cur.expect_str("provenance location")?;
            let (text, _) = cur.expect_str("provenance text")?;
            Provenance { text, location }
        } else {
            Provenance::default()
        };
        if provenance.text.is_empty() {
            diags.push(
                Diagnostic::lint(
                    DiagCode::EmptyProvenance,
                    format!("rule `{}` has no source text attached", id),
                )
                .with_span(id_span),
            );
        }
        cur.expect_end()?;

        Ok(Sentence {
            id,
            variables: vars.vars,
            antecedent,
            goal,
            structural,
            provenance,
        })
    })();
    match inner {
        Ok(s) => Some(s),
        Err(d) => {
            diags.push(d);
            None
        }
    }
}

fn parse_dnf(
    cur: &mut Cursor,
    sig: &Signature,
    vars: &RuleVars,
    diags: &mut Vec<Diagnostic>,
) -> Result<Vec<Conjunct>, Diagnostic> {
    let mut disjuncts = Vec::new();
    loop {
        let mut lits = vec![parse_literal(cur, sig, vars, diags)?];
        while cur.eat(&TokKind::Amp) {
            lits.push(parse_literal(cur, sig, vars, diags)?);
        }
        disjuncts.push(Conjunct(lits));
        if !cur.eat(&TokKind::Pipe) {
            break;
        }
    }
    Ok(disjuncts)
}

/// `[!] name(term, ...)` inside a rule body; every term is a variable.
fn parse_literal(
    cur: &mut Cursor,
    sig: &Signature,
    vars: &RuleVars,
    diags: &mut Vec<Diagnostic>,
) -> Result<Literal, Diagnostic> {
    let negated = cur.eat(&TokKind::Bang);
    let (name, name_span) = cur.expect_ident("predicate name")?;
    cur.expect(TokKind::LParen)?;
    let mut args = Vec::new();
    let mut arg_spans = Vec::new();
    if !cur.eat(&TokKind::RParen) {
        loop {
            let (v, v_span) = cur.expect_ident("variable name")?;
            args.push(Term::Variable(v));
            arg_spans.push(v_span);
            if cur.eat(&TokKind::RParen) {
                break;
            }
            cur.expect(TokKind::Comma)?;
        }
    }

    match sig.predicate(&name) {
        None => diags.push(
            Diagnostic::error(
                DiagCode::UnknownPredicate,
                format!("unknown predicate `{}`", name),
            )
            .with_span(name_span),
        ),
        Some(p) => {
            if args.len() != p.arity.len() {
                diags.push(
                    Diagnostic::error(
                        DiagCode::ArityMismatch,
                        format!(
                            "`{}` expects {} argument(s), got {}",
                            p.name,
                            p.arity.len(),
                            args.len()
                        ),
                    )
                    .with_span(name_span),
                );
            } else {
                for (i, (arg, expected)) in args.iter().zip(&p.arity).enumerate() {
                    let Term::Variable(v) = arg else { continue };
                    match vars.sort_of(v) {
                        None => diags.push(
                            Diagnostic::error(
                                DiagCode::UnboundVariable,
                                format!("unbound variable `{}`", v),
                            )
                            .with_span(arg_spans[i]),
                        ),
                        Some(actual) if actual != expected => diags.push(
                            Diagnostic::error(
                                DiagCode::SortMismatch,
                                format!(
                                    "variable `{}` has sort `{}`, expected `{}`",
                                    v, actual, expected
                                ),
                            )
                            .with_span(arg_spans[i]),
                        ),
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Ok(Literal {
        atom: Atom::new(name, args),
        negated,
    })
}

// ---------------------------------------------------------------------------
// Claim parser
// ---------------------------------------------------------------------------

/// Parses claim text against a knowledge base. Total, like [`parse_kb`];
/// facts are sort-checked against the KB signature extended with the
/// claim's own constants.
pub fn parse_claim(text: &str, kb: &KnowledgeBase) -> Parsed<ClaimDocument> {
    let mut diags = Vec::new();
    let mut id: Option<String> = None;
    let mut raw_text: Option<String> = None;
    let mut constants: Vec<Constant> = Vec::new();
    let mut fact_lines: Vec<(u32, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let Some((word, _)) = first_word(raw) else {
            continue;
        };
        match word {
            "claim" => match lex_line(raw, line_no) {
                Err(d) => diags.push(d),
                Ok(toks) => {
                    let mut cur = Cursor::new(toks, line_no);
                    cur.bump();
                    match cur
                        .expect_ident("claim id")
                        .and_then(|r| cur.expect_end().map(|_| r))
                    {
                        Err(d) => diags.push(d),
                        Ok((name, span)) => {
                            check_declared_name(&name, span, "claim id", &mut diags);
                            if id.is_some() {
                                diags.push(
                                    Diagnostic::error(
                                        DiagCode::DuplicateHeader,
                                        "`claim` given more than once",
                                    )
                                    .with_span(span),
                                );
                            } else {
                                id = Some(name);
                            }
                        }
                    }
                }
            },
            "text" => match lex_line(raw, line_no) {
                Err(d) => diags.push(d),
                Ok(toks) => {
                    let mut cur = Cursor::new(toks, line_no);
                    cur.bump();
                    match cur
                        .expect_str("claim text")
                        .and_then(|r| cur.expect_end().map(|_| r))
                    {
                        Err(d) => diags.push(d),
                        Ok((value, span)) => {
                            if raw_text.is_some() {
                                diags.push(
                                    Diagnostic::error(
                                        DiagCode::DuplicateHeader,
                                        "`text` given more than once",
                                    )
                                    .with_span(span),
                                );
                            } else {
                                raw_text = Some(value);
                            }
                        }
                    }
                }
            },
            "const" => match lex_line(raw, line_no) {
                Err(d) => diags.push(d),
                Ok(toks) => {
                    let mut cur = Cursor::new(toks, line_no);
                    cur.bump();
                    if let Err(d) = parse_const_line(&mut cur, kb, &mut constants, &mut diags) {
                        diags.push(d);
                    }
                }
            },
            "fact" => fact_lines.push((line_no, raw)),
            other => diags.push(
                Diagnostic::error(
                    DiagCode::SyntaxError,
                    format!("unknown declaration `{}`", other),
                )
                .with_span(Span::new(line_no, 1, other.len() as u32)),
            ),
        }
    }

    if id.is_none() {
        diags.push(Diagnostic::error(
            DiagCode::MissingClaimId,
            "claim document has no `claim <id>` line",
        ));
    }

    let sig = kb.signature.with_constants(&constants);
    let mut facts = Vec::new();
    for (line_no, raw) in fact_lines {
        if let Some(fact) = parse_fact_line(raw, line_no, &sig, &mut diags) {
            facts.push(fact);
        }
    }

    let value = if crate::diag::has_errors(&diags) {
        None
    } else {
        Some(ClaimDocument {
            id: id.unwrap_or_default(),
            constants,
            facts,
            raw_text,
        })
    };
    Parsed {
        value,
        diagnostics: diags,
    }
}

/// Constant name with optional `@Sort` qualifier, assembled to one name.
fn parse_constant_name(cur: &mut Cursor) -> Result<(String, Span), Diagnostic> {
    let (stem, span) = cur.expect_ident("constant name")?;
    if cur.eat(&TokKind::At) {
        let (qual, qspan) = cur.expect_ident("sort qualifier")?;
        let len = qspan.col + qspan.len - span.col;
        Ok((
            format!("{}@{}", stem, qual),
            Span::new(span.line, span.col, len),
        ))
    } else {
        Ok((stem, span))
    }
}

/// `const NAME: Sort` (cursor already past `const`).
fn parse_const_line(
    cur: &mut Cursor,
    kb: &KnowledgeBase,
    constants: &mut Vec<Constant>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let (name, name_span) = parse_constant_name(cur)?;
    cur.expect(TokKind::Colon)?;
    let (sort, sort_span) = cur.expect_ident("sort name")?;
    cur.expect_end()?;

    if !fol::is_constant_name(&name) {
        diags.push(
            Diagnostic::error(
                DiagCode::InvalidIdentifier,
                format!("constant name `{}` is not a valid identifier", name),
            )
            .with_span(name_span),
        );
    }
    if !kb.signature.has_sort(&sort) {
        diags.push(
            Diagnostic::error(
                DiagCode::UnknownSort,
                format!("unknown sort `{}`", sort),
            )
            .with_span(sort_span),
        );
    }
    if constants.iter().any(|c| c.name == name) {
        diags.push(
            Diagnostic::error(
                DiagCode::DuplicateConstant,
                format!("constant `{}` declared more than once", name),
            )
            .with_span(name_span),
        );
    } else {
        let stem = fol::constant_stem(&name);
        if stem != stem.to_ascii_uppercase() {
            diags.push(
                Diagnostic::lint(
                    DiagCode::ConstantCase,
                    format!("constant `{}` is conventionally uppercase", name),
                )
                .with_span(name_span),
            );
        }
        constants.push(Constant { name, sort });
    }
    Ok(())
}

/// `fact [!]pred(CONST, ...)`.
fn parse_fact_line(
    raw: &str,
    line_no: u32,
    sig: &Signature,
    diags: &mut Vec<Diagnostic>,
) -> Option<Literal> {
    let toks = match lex_line(raw, line_no) {
        Ok(t) => t,
        Err(d) => {
            diags.push(d);
            return None;
        }
    };
    let mut cur = Cursor::new(toks, line_no);
    cur.bump(); // `fact`

    let inner = (|| -> Result<Literal, Diagnostic> {
        let negated = cur.eat(&TokKind::Bang);
        let (name, name_span) = cur.expect_ident("predicate name")?;
        cur.expect(TokKind::LParen)?;
        let mut args = Vec::new();
        let mut arg_spans = Vec::new();
        if !cur.eat(&TokKind::RParen) {
            loop {
                let (c, span) = parse_constant_name(&mut cur)?;
                args.push(Term::Constant(c));
                arg_spans.push(span);
                if cur.eat(&TokKind::RParen) {
                    break;
                }
                cur.expect(TokKind::Comma)?;
            }
        }
        cur.expect_end()?;

        match sig.predicate(&name) {
            None => diags.push(
                Diagnostic::error(
                    DiagCode::UnknownPredicate,
                    format!("unknown predicate `{}`", name),
                )
                .with_span(name_span),
            ),
            Some(p) => {
                if p.kind == PredicateKind::Goal {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::GoalFactForbidden,
                            format!("claims may not assert goal predicate `{}` as a fact", p.name),
                        )
                        .with_span(name_span),
                    );
                }
                if args.len() != p.arity.len() {
                    diags.push(
                        Diagnostic::error(
                            DiagCode::ArityMismatch,
                            format!(
                                "`{}` expects {} argument(s), got {}",
                                p.name,
                                p.arity.len(),
                                args.len()
                            ),
                        )
                        .with_span(name_span),
                    );
                } else {
                    for (i, (arg, expected)) in args.iter().zip(&p.arity).enumerate() {
                        let Term::Constant(cname) = arg else { continue };
                        match sig.constant(cname) {
                            None => diags.push(
                                Diagnostic::error(
                                    DiagCode::UnknownConstant,
                                    format!("unknown constant `{}`", cname),
                                )
                                .with_span(arg_spans[i]),
                            ),
                            Some(c) if c.sort != *expected => diags.push(
                                Diagnostic::error(
                                    DiagCode::SortMismatch,
                                    format!(
                                        "constant `{}` has sort `{}`, expected `{}`",
                                        cname, c.sort, expected
                                    ),
                                )
                                .with_span(arg_spans[i]),
                            ),
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        Ok(Literal {
            atom: Atom::new(name, args),
            negated,
        })
    })();
    match inner {
        Ok(l) => Some(l),
        Err(d) => {
            diags.push(d);
            None
        }
    }
}
