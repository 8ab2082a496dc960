//! The decision engine: one adjudication from knowledge base + claim +
//! goal to an explained, auditable verdict.
//!
//! Order of operations is fixed: the consistency of T ∧ φ is checked
//! first, and an inconsistent theory/fact set short-circuits to the
//! `Inconsistent` verdict — coverage is never derived ex falso. Only then
//! is the goal tested (Covered iff T ∧ φ ∧ ¬ψ is unsatisfiable). The
//! proof-relevant unsat core or the counterexample model is mapped back to
//! source provenance, review triggers are evaluated, and the decision is
//! stamped with content digests of both inputs.
//!
//! A decision is a pure function of (KnowledgeBase, ClaimDocument,
//! GoalInstance, trigger rules). The claim's raw text is never consulted:
//! two claims with equal constants and facts decide identically, byte for
//! byte, whatever their texts say.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic, Span};
use crate::fol::{GoalInstance, Literal, PredicateKind};
use crate::ground::{self, ClauseProvenance, GroundProblem};
use crate::kb::{ClaimDocument, KnowledgeBase};
use crate::parse::Parsed;
use crate::serialize;
use crate::solver::{self, SolveResult, SolverConfig, Validity};

/// The three possible adjudication outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The goal is entailed: T ∧ φ ∧ ¬ψ is unsatisfiable.
    Covered,
    /// A counterexample interpretation exists in which the goal fails.
    NotCovered,
    /// T ∧ φ is itself unsatisfiable; the claim needs human review.
    Inconsistent,
}

impl Verdict {
    /// Stable wire form, also used by the CLI exit-code contract.
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Covered => "covered",
            Verdict::NotCovered => "not_covered",
            Verdict::Inconsistent => "inconsistent",
        }
    }
}

/// What a core-trace entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreEntryKind {
    Rule,
    Fact,
    NegatedGoal,
}

impl CoreEntryKind {
    fn as_str(&self) -> &'static str {
        match self {
            CoreEntryKind::Rule => "rule",
            CoreEntryKind::Fact => "fact",
            CoreEntryKind::NegatedGoal => "negated_goal",
        }
    }
}

/// One entry of a proof-relevant core, resolved back to its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreEntry {
    pub kind: CoreEntryKind,
    /// Rule id for rules; the rendered literal for facts; the rendered
    /// goal instance for the negated goal.
    pub id: String,
    /// Variable binding of the sentence instance (declaration order);
    /// empty for facts and the goal.
    pub binding: Vec<(String, String)>,
    /// Source text the rule was formalized from; empty for facts/goal.
    pub provenance_text: String,
    /// Index of the originating clause in the ground problem, for
    /// re-verification.
    pub clause_index: usize,
}

/// Why a verdict holds: a proof core or a counterexample model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Explanation {
    /// Covered and Inconsistent verdicts carry the minimized core.
    Core { entries: Vec<CoreEntry> },
    /// NotCovered carries the total counterexample: every ground atom with
    /// its truth value, in atom-table order.
    Model { assignments: Vec<(String, bool)> },
}

/// When a review trigger fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FireOn {
    /// The watched predicate occurs in the proof core.
    ProofRelevant,
    /// The claim asserts a fact over the watched predicate.
    PresentInFacts,
    /// Some atom of the watched predicate is true in the counterexample.
    TrueInModel,
}

impl FireOn {
    fn as_str(&self) -> &'static str {
        match self {
            FireOn::ProofRelevant => "proof_relevant",
            FireOn::PresentInFacts => "present_in_facts",
            FireOn::TrueInModel => "true_in_model",
        }
    }
}

/// A configured human-oversight rule: flag the decision when the watched
/// predicate becomes relevant in the given way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerRule {
    pub name: String,
    pub watch: String,
    pub fire_on: FireOn,
}

/// Evidence a trigger hit points at; always re-verifiable within the
/// decision's explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Index into the explanation's core trace.
    CoreEntry(usize),
    /// A ground atom true in the counterexample model.
    ModelAtom(String),
    /// A claim fact literal over the watched predicate.
    Fact(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerHit {
    pub rule: String,
    pub evidence: Evidence,
}

/// One adjudication result with its full audit trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub claim_id: String,
    pub goal: GoalInstance,
    pub verdict: Verdict,
    pub explanation: Explanation,
    pub triggers: Vec<TriggerHit>,
    pub engine_version: String,
    /// Content digest of the knowledge base's canonical serialization.
    pub kb_digest: String,
    /// Content digest of the claim's canonical serialization, excluding
    /// the raw text (decisions are text-independent; the digest pins only
    /// what the decision depends on).
    pub claim_digest: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Ground(#[from] ground::GroundError),
    #[error("{count} goal instances exceed the cap of {cap}; raise --max-goal-instances")]
    TooManyGoalInstances { cap: usize, count: usize },
}

/// Outcome of the standalone consistency check on T ∧ φ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    /// Minimized core over theory and fact clauses.
    Inconsistent { core: Vec<usize> },
}

fn digest(bytes: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes.as_bytes());
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for b in hasher.finalize() {
        let _ = write!(out, "{:02x}", b);
    }
    out
}

/// Digest of the knowledge base's canonical form.
pub fn kb_digest(kb: &KnowledgeBase) -> String {
    digest(&serialize::serialize_kb(kb))
}

/// Digest of the claim's canonical form without its raw text. Two claims
/// that differ only in wording digest identically — the digest pins the
/// decision-relevant content.
pub fn claim_digest(claim: &ClaimDocument) -> String {
    let mut stripped = claim.clone();
    stripped.raw_text = None;
    digest(&serialize::serialize_claim(&stripped))
}

fn render_fact(fact: &Literal) -> String {
    fact.to_string()
}

/// Checks that T ∧ φ has a model at all. Runs before any coverage check
/// so that an inconsistent input can never masquerade as Covered.
pub fn check_consistency(kb: &KnowledgeBase, claim: &ClaimDocument) -> Consistency {
    let base = ground::ground_base(kb, claim);
    match solver::solve(&base, &SolverConfig::default()) {
        SolveResult::Sat { .. } => Consistency::Consistent,
        SolveResult::Unsat { core } => Consistency::Inconsistent { core },
    }
}

/// Resolves core clause indices to a provenance-bearing trace.
fn core_trace(
    problem: &GroundProblem,
    core: &[usize],
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    goal: &GoalInstance,
) -> Vec<CoreEntry> {
    core.iter()
        .map(|&idx| match &problem.clauses[idx].provenance {
            ClauseProvenance::SentenceInstance {
                sentence_id,
                binding,
            } => CoreEntry {
                kind: CoreEntryKind::Rule,
                id: sentence_id.clone(),
                binding: binding.clone(),
                provenance_text: kb
                    .sentence(sentence_id)
                    .map(|s| s.provenance.text.clone())
                    .unwrap_or_default(),
                clause_index: idx,
            },
            ClauseProvenance::Fact { index } => CoreEntry {
                kind: CoreEntryKind::Fact,
                id: render_fact(&claim.facts[*index]),
                binding: Vec::new(),
                provenance_text: String::new(),
                clause_index: idx,
            },
            ClauseProvenance::NegatedGoal => CoreEntry {
                kind: CoreEntryKind::NegatedGoal,
                id: goal.to_string(),
                binding: Vec::new(),
                provenance_text: String::new(),
                clause_index: idx,
            },
        })
        .collect()
}

/// Evaluates the trigger rules against the finished explanation. One hit
/// per rule, carrying the first piece of matching evidence.
fn evaluate_triggers(
    triggers: &[TriggerRule],
    explanation: &Explanation,
    problem: &GroundProblem,
    core: Option<&[usize]>,
    model: Option<&[bool]>,
    claim: &ClaimDocument,
) -> Vec<TriggerHit> {
    let mut hits = Vec::new();
    for rule in triggers {
        let evidence = match rule.fire_on {
            FireOn::ProofRelevant => core.and_then(|core| {
                core.iter().enumerate().find_map(|(entry_idx, &clause_idx)| {
                    let mentions = problem.clauses[clause_idx]
                        .literals
                        .iter()
                        .any(|l| problem.table.atom(l.atom()).predicate == rule.watch);
                    mentions.then_some(Evidence::CoreEntry(entry_idx))
                })
            }),
            FireOn::PresentInFacts => claim
                .facts
                .iter()
                .find(|f| f.atom.predicate == rule.watch)
                .map(|f| Evidence::Fact(render_fact(f))),
            FireOn::TrueInModel => model.and_then(|model| {
                problem
                    .table
                    .atoms()
                    .find(|(id, atom)| {
                        atom.predicate == rule.watch && model[*id as usize]
                    })
                    .map(|(_, atom)| Evidence::ModelAtom(atom.to_string()))
            }),
        };
        if let Some(evidence) = evidence {
            hits.push(TriggerHit {
                rule: rule.name.clone(),
                evidence,
            });
        }
    }
    let _ = explanation; // evidence indices refer into it; kept for callers
    hits
}

/// Adjudicates one goal instance. Consistency first; then the coverage
/// check; then explanation assembly and trigger evaluation. Deterministic
/// for fixed inputs.
pub fn decide(
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    goal: &GoalInstance,
    triggers: &[TriggerRule],
) -> Result<Decision, EngineError> {
    let cfg = SolverConfig::default();
    let problem = ground::ground_problem(kb, claim, goal)?;
    let base = problem.without_goal();

    let (verdict, explanation, core, model) = match solver::solve(&base, &cfg) {
        SolveResult::Unsat { core } => {
            let entries = core_trace(&base, &core, kb, claim, goal);
            (
                Verdict::Inconsistent,
                Explanation::Core { entries },
                Some(core),
                None,
            )
        }
        SolveResult::Sat { .. } => match solver::check_validity(&problem, &cfg) {
            Validity::Covered { core } => {
                let entries = core_trace(&problem, &core, kb, claim, goal);
                (
                    Verdict::Covered,
                    Explanation::Core { entries },
                    Some(core),
                    None,
                )
            }
            Validity::NotCovered { model } => {
                let assignments = problem
                    .table
                    .atoms()
                    .map(|(id, atom)| (atom.to_string(), model[id as usize]))
                    .collect();
                (
                    Verdict::NotCovered,
                    Explanation::Model { assignments },
                    None,
                    Some(model),
                )
            }
        },
    };

    let triggers = evaluate_triggers(
        triggers,
        &explanation,
        &problem,
        core.as_deref(),
        model.as_deref(),
        claim,
    );

    Ok(Decision {
        claim_id: claim.id.clone(),
        goal: goal.clone(),
        verdict,
        explanation,
        triggers,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        kb_digest: kb_digest(kb),
        claim_digest: claim_digest(claim),
    })
}

/// All goal instances a claim supports: every goal predicate applied to
/// every sort-compatible constant tuple, predicates in declaration order,
/// constants in declaration order, rightmost argument varying fastest.
pub fn goal_instances(kb: &KnowledgeBase, claim: &ClaimDocument) -> Vec<GoalInstance> {
    let mut out = Vec::new();
    for pred in kb.signature.predicates.iter() {
        if pred.kind != PredicateKind::Goal {
            continue;
        }
        let slots: Vec<Vec<&str>> = pred
            .arity
            .iter()
            .map(|sort| {
                claim
                    .constants
                    .iter()
                    .filter(|c| c.sort == *sort)
                    .map(|c| c.name.as_str())
                    .collect()
            })
            .collect();
        if slots.iter().any(|s| s.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; slots.len()];
        'tuples: loop {
            out.push(GoalInstance {
                predicate: pred.name.clone(),
                args: idx
                    .iter()
                    .zip(&slots)
                    .map(|(&i, slot)| slot[i].to_string())
                    .collect(),
            });
            let mut k = slots.len();
            loop {
                if k == 0 {
                    break 'tuples;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < slots[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    out
}

/// Adjudicates every goal instance of the claim, capped to guard against
/// combinatorial blowup.
pub fn decide_all_goals(
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    triggers: &[TriggerRule],
    cap: usize,
) -> Result<Vec<Decision>, EngineError> {
    let instances = goal_instances(kb, claim);
    if instances.len() > cap {
        return Err(EngineError::TooManyGoalInstances {
            cap,
            count: instances.len(),
        });
    }
    instances
        .iter()
        .map(|goal| decide(kb, claim, goal, triggers))
        .collect()
}

/// Adjudicates a batch of (claim, goal) pairs against one knowledge base,
/// in parallel when the `parallel` feature is enabled. Output order always
/// matches input order regardless of thread count.
#[cfg(feature = "parallel")]
pub fn decide_batch(
    kb: &KnowledgeBase,
    items: &[(ClaimDocument, GoalInstance)],
    triggers: &[TriggerRule],
) -> Vec<Result<Decision, EngineError>> {
    use rayon::prelude::*;
    items
        .par_iter()
        .map(|(claim, goal)| decide(kb, claim, goal, triggers))
        .collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn decide_batch(
    kb: &KnowledgeBase,
    items: &[(ClaimDocument, GoalInstance)],
    triggers: &[TriggerRule],
) -> Vec<Result<Decision, EngineError>> {
    decide_batch_sequential(kb, items, triggers)
}

/// Always-sequential batch adjudication; the baseline the parallel path is
/// benchmarked against and required to match output-for-output.
pub fn decide_batch_sequential(
    kb: &KnowledgeBase,
    items: &[(ClaimDocument, GoalInstance)],
    triggers: &[TriggerRule],
) -> Vec<Result<Decision, EngineError>> {
    items
        .iter()
        .map(|(claim, goal)| decide(kb, claim, goal, triggers))
        .collect()
}

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CoreEntryJson<'a> {
    kind: &'static str,
    id: &'a str,
    binding: &'a [(String, String)],
    provenance: &'a str,
}

#[derive(Serialize)]
#[serde(tag = "kind", content = "value")]
enum EvidenceJson<'a> {
    #[serde(rename = "core_entry")]
    CoreEntry(usize),
    #[serde(rename = "model_atom")]
    ModelAtom(&'a str),
    #[serde(rename = "fact")]
    Fact(&'a str),
}

#[derive(Serialize)]
struct TriggerHitJson<'a> {
    rule: &'a str,
    evidence: EvidenceJson<'a>,
}

#[derive(Serialize)]
struct DecisionJson<'a> {
    claim: &'a str,
    goal: String,
    verdict: &'static str,
    core: Option<Vec<CoreEntryJson<'a>>>,
    model: Option<&'a [(String, bool)]>,
    triggers: Vec<TriggerHitJson<'a>>,
    kb_digest: &'a str,
    claim_digest: &'a str,
    engine_version: &'a str,
}

impl Decision {
    /// Fixed-field-order JSON document; the canonical, digest-stable
    /// rendering of a decision. Field order: claim, goal, verdict, core,
    /// model, triggers, kb_digest, claim_digest, engine_version.
    pub fn to_canonical_json(&self) -> String {
        let (core, model) = match &self.explanation {
            Explanation::Core { entries } => (
                Some(
                    entries
                        .iter()
                        .map(|e| CoreEntryJson {
                            kind: e.kind.as_str(),
                            id: &e.id,
                            binding: &e.binding,
                            provenance: &e.provenance_text,
                        })
                        .collect(),
                ),
                None,
            ),
            Explanation::Model { assignments } => (None, Some(assignments.as_slice())),
        };
        let doc = DecisionJson {
            claim: &self.claim_id,
            goal: self.goal.to_string(),
            verdict: self.verdict.as_str(),
            core,
            model,
            triggers: self
                .triggers
                .iter()
                .map(|h| TriggerHitJson {
                    rule: &h.rule,
                    evidence: match &h.evidence {
                        Evidence::CoreEntry(i) => EvidenceJson::CoreEntry(*i),
                        Evidence::ModelAtom(a) => EvidenceJson::ModelAtom(a),
                        Evidence::Fact(f) => EvidenceJson::Fact(f),
                    },
                })
                .collect(),
            kb_digest: &self.kb_digest,
            claim_digest: &self.claim_digest,
            engine_version: &self.engine_version,
        };
        serde_json::to_string(&doc).expect("decision serializes")
    }

    /// Human-oriented rendering with provenance quotes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "claim    {}", self.claim_id);
        let _ = writeln!(out, "goal     {}", self.goal);
        let _ = writeln!(out, "verdict  {}", self.verdict.as_str());
        match &self.explanation {
            Explanation::Core { entries } => {
                let _ = writeln!(out, "proof core:");
                for e in entries {
                    let binding = if e.binding.is_empty() {
                        String::new()
                    } else {
                        let pairs: Vec<String> = e
                            .binding
                            .iter()
                            .map(|(v, c)| format!("{}={}", v, c))
                            .collect();
                        format!(" [{}]", pairs.join(", "))
                    };
                    let _ = write!(out, "  {} {}{}", e.kind.as_str(), e.id, binding);
                    if e.provenance_text.is_empty() {
                        out.push('\n');
                    } else {
                        let _ = writeln!(out, " — \"{}\"", e.provenance_text);
                    }
                }
            }
            Explanation::Model { assignments } => {
                let _ = writeln!(out, "counterexample:");
                for (atom, value) in assignments {
                    let _ = writeln!(out, "  {} = {}", atom, value);
                }
            }
        }
        for hit in &self.triggers {
            let evidence = match &hit.evidence {
                Evidence::CoreEntry(i) => format!("core entry {}", i),
                Evidence::ModelAtom(a) => format!("model atom {}", a),
                Evidence::Fact(f) => format!("fact {}", f),
            };
            let _ = writeln!(out, "trigger  {} ({})", hit.rule, evidence);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Trigger-rules file
// ---------------------------------------------------------------------------

/// Parses a trigger-rules file: one rule per line,
/// `trigger <name> <proof_relevant|present_in_facts|true_in_model> <predicate>`,
/// `#` comments. Watched predicates must exist in the KB signature.
pub fn parse_triggers(text: &str, kb: &KnowledgeBase) -> Parsed<Vec<TriggerRule>> {
    let mut diags = Vec::new();
    let mut rules: Vec<TriggerRule> = Vec::new();
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
        if words[0] != "trigger" || words.len() != 4 {
            diags.push(
                Diagnostic::error(
                    DiagCode::SyntaxError,
                    "expected `trigger <name> <fire-condition> <predicate>`",
                )
                .with_span(span),
            );
            continue;
        }
        let (name, fire_word, watch) = (words[1], words[2], words[3]);
        if !crate::fol::is_identifier(name) {
            diags.push(
                Diagnostic::error(
                    DiagCode::InvalidIdentifier,
                    format!("trigger name `{}` is not a valid identifier", name),
                )
                .with_span(span),
            );
        }
        let fire_on = match fire_word {
            "proof_relevant" => FireOn::ProofRelevant,
            "present_in_facts" => FireOn::PresentInFacts,
            "true_in_model" => FireOn::TrueInModel,
            other => {
                diags.push(
                    Diagnostic::error(
                        DiagCode::SyntaxError,
                        format!(
                            "unknown fire condition `{}`; expected proof_relevant, present_in_facts, or true_in_model",
                            other
                        ),
                    )
                    .with_span(span),
                );
                continue;
            }
        };
        if kb.signature.predicate(watch).is_none() {
            diags.push(
                Diagnostic::error(
                    DiagCode::UnknownPredicate,
                    format!("watched predicate `{}` is not declared", watch),
                )
                .with_span(span),
            );
        }
        if rules.iter().any(|r| r.name == name) {
            diags.push(
                Diagnostic::error(
                    DiagCode::DuplicateRule,
                    format!("trigger name `{}` used more than once", name),
                )
                .with_span(span),
            );
        }
        rules.push(TriggerRule {
            name: name.to_string(),
            watch: watch.to_string(),
            fire_on,
        });
    }
    let value = if crate::diag::has_errors(&diags) {
        None
    } else {
        Some(rules)
    };
    Parsed {
        value,
        diagnostics: diags,
    }
}

/// Renders trigger rules in the file grammar (round-trips through
/// [`parse_triggers`]).
pub fn serialize_triggers(rules: &[TriggerRule]) -> String {
    let mut out = String::new();
    for r in rules {
        let _ = writeln!(out, "trigger {} {} {}", r.name, r.fire_on.as_str(), r.watch);
    }
    out
}
