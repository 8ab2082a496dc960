//! Diagnostics: structured findings from validation and parsing.
//!
//! Operations that check well-formedness return `Vec<Diagnostic>` instead of
//! failing on the first problem, so a single pass over a file reports every
//! violation. An empty list means the input is valid.

use std::fmt;

use serde::Serialize;

/// How bad a finding is. Only `Error` blocks downstream use of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Severity {
    /// Advisory style finding (e.g. lowercase constant name).
    Lint,
    /// Suspicious but usable (e.g. empty knowledge base).
    Warning,
    /// The input violates an invariant and must be fixed.
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Severity::Lint => "lint",
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        f.write_str(s)
    }
}

/// Stable machine-readable code for a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagCode {
    SyntaxError,
    InvalidIdentifier,
    DuplicateSort,
    DuplicatePredicate,
    DuplicateConstant,
    DuplicateRule,
    DuplicateVariable,
    UnknownSort,
    UnknownPredicate,
    UnknownConstant,
    UnboundVariable,
    ArityMismatch,
    SortMismatch,
    GoalPredicateInAntecedent,
    ConditionPredicateAsGoal,
    GoalFactForbidden,
    ConstantInRule,
    FactNotGround,
    #[serde(rename = "EmptyKB")]
    EmptyKb,
    MissingClaimId,
    DuplicateHeader,
    GoalNotDeclared,
    ConstantCase,
    EmptyProvenance,
    MissingDefinition,
    ClauseBudgetExceeded,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // The variant name is the stable wire form, except for the
        // capitalization of `EmptyKB`.
        match self {
            DiagCode::EmptyKb => f.write_str("EmptyKB"),
            other => write!(f, "{:?}", other),
        }
    }
}

/// A half-open source region: 1-based line and column, byte length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub fn new(line: u32, col: u32, len: u32) -> Self {
        Span { line, col, len }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One validation or parse finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    /// Position in the parsed text; `None` for findings on in-memory values.
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn error(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn warning(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn lint(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Lint,
            code,
            message: message.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(
                f,
                "{}: {} [{}] at {}",
                self.severity, self.message, self.code, span
            ),
            None => write!(f, "{}: {} [{}]", self.severity, self.message, self.code),
        }
    }
}

/// True if any diagnostic in the list is an error.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
