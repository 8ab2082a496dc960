//! Grounding: compiling the quantified theory plus claim facts into
//! propositional clauses over ground atoms.
//!
//! Because every function symbol is a constant, the Herbrand universe is
//! finite: instantiating each sentence with all sort-respecting constant
//! bindings yields a finite, equisatisfiable propositional problem. Each
//! clause records where it came from (sentence instance, fact, or the
//! negated goal) so proofs can be mapped back to source text 1:1 — no
//! auxiliary-variable encodings anywhere.
//!
//! Everything here is pure and deterministic: atom ids, clause order, and
//! literal order are fixed functions of the input.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fol::{Constant, GoalInstance, Literal, Sentence, Signature, Term};
use crate::kb::{ClaimDocument, KnowledgeBase};

/// A predicate applied to constant names; the unit of truth assignment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(a)?;
        }
        f.write_str(")")
    }
}

/// Bijection between ground atoms and dense ids, ordered lexicographically
/// by (predicate name, argument names). Rebuilding from the same signature
/// yields the same table id-for-id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    ids: BTreeMap<GroundAtom, u32>,
}

impl AtomTable {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, id: u32) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn id(&self, predicate: &str, args: &[String]) -> Option<u32> {
        // The lookup key is assembled once; profiles showed this is not a
        // hot path at the target problem sizes.
        let key = GroundAtom {
            predicate: predicate.to_string(),
            args: args.to_vec(),
        };
        self.ids.get(&key).copied()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (u32, &GroundAtom)> {
        self.atoms.iter().enumerate().map(|(i, a)| (i as u32, a))
    }
}

/// All index tuples over the given slot lengths, in lexicographic order
/// with the rightmost position varying fastest. The empty product (no
/// slots) yields one empty tuple; any zero-length slot yields nothing.
fn index_tuples(lens: &[usize]) -> Vec<Vec<usize>> {
    if lens.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; lens.len()];
    loop {
        out.push(idx.clone());
        // Odometer increment; a full wrap means enumeration is done.
        let mut k = lens.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lens[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Enumerates the full atom table for a signature extended with the given
/// constants. Table size is Σ over predicates of Π over argument slots of
/// |constants of that sort|.
pub fn build_atom_table(sig: &Signature, constants: &[Constant]) -> AtomTable {
    let mut names: Vec<&str> = sig.predicates.iter().map(|p| p.name.as_str()).collect();
    names.sort_unstable();

    let mut atoms = Vec::new();
    for name in names {
        let pred = sig.predicate(name).expect("predicate from signature");
        // Constants per slot, sorted by name so tuple enumeration is
        // lexicographic.
        let mut slots: Vec<Vec<&str>> = Vec::with_capacity(pred.arity.len());
        for sort in &pred.arity {
            let mut of_sort: Vec<&str> = constants
                .iter()
                .filter(|c| c.sort == *sort)
                .map(|c| c.name.as_str())
                .collect();
            of_sort.sort_unstable();
            slots.push(of_sort);
        }
        let lens: Vec<usize> = slots.iter().map(|s| s.len()).collect();
        for idx in index_tuples(&lens) {
            atoms.push(GroundAtom {
                predicate: pred.name.clone(),
                args: idx
                    .iter()
                    .zip(&slots)
                    .map(|(&i, slot)| slot[i].to_string())
                    .collect(),
            });
        }
    }

    let ids = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i as u32))
        .collect();
    AtomTable { atoms, ids }
}

/// A signed atom id, packed as `atom << 1 | sign` (sign bit set = negated).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn positive(atom: u32) -> Lit {
        Lit(atom << 1)
    }

    pub fn negative(atom: u32) -> Lit {
        Lit(atom << 1 | 1)
    }

    pub fn new(atom: u32, positive: bool) -> Lit {
        if positive {
            Lit::positive(atom)
        } else {
            Lit::negative(atom)
        }
    }

    pub fn atom(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    /// The packed code; also the canonical sort key for literals.
    pub fn code(self) -> u32 {
        self.0
    }
}

/// Where a ground clause came from; exactly one record per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseProvenance {
    /// Instantiation of a theory sentence under a variable binding
    /// (variable name → constant name, in declaration order).
    SentenceInstance {
        sentence_id: String,
        binding: Vec<(String, String)>,
    },
    /// The i-th fact literal of the claim document.
    Fact { index: usize },
    /// The negated goal ¬ψ.
    NegatedGoal,
}

/// A disjunction of ground literals, sorted by literal code, duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundClause {
    pub literals: Vec<Lit>,
    pub provenance: ClauseProvenance,
}

impl GroundClause {
    /// Sorts, deduplicates, and detects tautologies. Returns `None` when
    /// the clause contains a literal and its negation (always true, no
    /// constraint).
    pub fn new(mut literals: Vec<Lit>, provenance: ClauseProvenance) -> Option<GroundClause> {
        literals.sort_unstable();
        literals.dedup();
        for w in literals.windows(2) {
            if w[0].atom() == w[1].atom() {
                return None; // p and ¬p sort adjacently
            }
        }
        Some(GroundClause {
            literals,
            provenance,
        })
    }
}

/// The propositional decision problem: T ∧ φ ∧ ¬ψ in clausal form.
/// Clause order: theory instances (sentence declaration order), then fact
/// units (claim order), then the single negated-goal unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProblem {
    pub table: AtomTable,
    pub clauses: Vec<GroundClause>,
}

impl GroundProblem {
    /// Index of the negated-goal clause, if present.
    pub fn goal_clause(&self) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| c.provenance == ClauseProvenance::NegatedGoal)
    }

    /// The problem without its negated-goal clause: T ∧ φ, used for the
    /// consistency check.
    pub fn without_goal(&self) -> GroundProblem {
        GroundProblem {
            table: self.table.clone(),
            clauses: self
                .clauses
                .iter()
                .filter(|c| c.provenance != ClauseProvenance::NegatedGoal)
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("goal predicate `{0}` is not declared in the knowledge base")]
    GoalNotDeclared(String),
    #[error("goal instance `{0}` does not ground over the claim's constants")]
    GoalOutsideUniverse(String),
}

/// Enumerates all total sort-respecting bindings of `variables`, variables
/// in declaration order, constants in declaration order, rightmost variable
/// varying fastest.
fn bindings<'a>(
    variables: &'a [(String, String)],
    constants: &'a [Constant],
) -> Vec<Vec<(&'a str, &'a str)>> {
    let slots: Vec<Vec<&str>> = variables
        .iter()
        .map(|(_, sort)| {
            constants
                .iter()
                .filter(|c| c.sort == *sort)
                .map(|c| c.name.as_str())
                .collect()
        })
        .collect();
    let lens: Vec<usize> = slots.iter().map(|s| s.len()).collect();
    index_tuples(&lens)
        .into_iter()
        .map(|idx| {
            idx.iter()
                .zip(&slots)
                .zip(variables)
                .map(|((&i, slot), (v, _))| (v.as_str(), slot[i]))
                .collect()
        })
        .collect()
}

/// Applies a binding to one literal and looks its atom up in the table.
/// `flip` negates the literal (used for antecedent literals, which enter
/// the clause negated).
fn instantiate(
    lit: &Literal,
    binding: &[(&str, &str)],
    table: &AtomTable,
    flip: bool,
) -> Lit {
    let args: Vec<String> = lit
        .atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => binding
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, c)| c.to_string())
                .expect("binding is total over sentence variables"),
            Term::Constant(c) => c.clone(),
        })
        .collect();
    let atom = table
        .id(&lit.atom.predicate, &args)
        .expect("sort-checked literal grounds to a table atom");
    Lit::new(atom, lit.negated == flip)
}

/// Grounds one sentence: for every binding and every antecedent disjunct
/// 𝒞ⱼ, emits the clause ¬𝒞ⱼ ∨ goal. Tautologies are dropped and exact
/// duplicate clauses (which arise when a disjunct ignores some variable)
/// are removed, keeping the first occurrence.
pub fn ground_sentence(
    sentence: &Sentence,
    table: &AtomTable,
    constants: &[Constant],
) -> Vec<GroundClause> {
    let mut out: Vec<GroundClause> = Vec::new();
    for binding in bindings(&sentence.variables, constants) {
        let provenance = ClauseProvenance::SentenceInstance {
            sentence_id: sentence.id.clone(),
            binding: binding
                .iter()
                .map(|(v, c)| (v.to_string(), c.to_string()))
                .collect(),
        };
        let goal_lit = instantiate(&sentence.goal, &binding, table, false);
        if sentence.antecedent.is_empty() {
            // k = 0: the antecedent is vacuously true; assert the goal.
            if let Some(c) = GroundClause::new(vec![goal_lit], provenance) {
                if !out.iter().any(|prev| prev.literals == c.literals) {
                    out.push(c);
                }
            }
            continue;
        }
        for conjunct in &sentence.antecedent {
            let mut lits: Vec<Lit> = conjunct
                .0
                .iter()
                .map(|l| instantiate(l, &binding, table, true))
                .collect();
            lits.push(goal_lit);
            if let Some(c) = GroundClause::new(lits, provenance.clone()) {
                if !out.iter().any(|prev| prev.literals == c.literals) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Upper bound on the clause count ground_problem will produce, computed
/// without grounding: Σ over sentences of max(k,1)·Π|constants per variable
/// sort| plus one unit per fact plus the goal unit.
pub fn projected_clause_count(kb: &KnowledgeBase, claim: &ClaimDocument) -> u64 {
    let mut total: u64 = 1 + claim.facts.len() as u64;
    for s in &kb.theory {
        let mut per_binding = s.antecedent.len().max(1) as u64;
        for (_, sort) in &s.variables {
            let n = claim.constants.iter().filter(|c| c.sort == *sort).count() as u64;
            per_binding = per_binding.saturating_mul(n);
        }
        total = total.saturating_add(per_binding);
    }
    total
}

/// Grounds T ∧ φ only (theory instances, then fact units) — the problem
/// the consistency check runs on. The atom table covers the full signature
/// including goal atoms, so indices agree with the full problem's.
pub fn ground_base(kb: &KnowledgeBase, claim: &ClaimDocument) -> GroundProblem {
    let table = build_atom_table(&kb.signature, &claim.constants);
    let mut clauses = Vec::new();
    for sentence in &kb.theory {
        clauses.extend(ground_sentence(sentence, &table, &claim.constants));
    }
    for (index, fact) in claim.facts.iter().enumerate() {
        let args: Vec<String> = fact.atom.args.iter().map(|t| t.name().to_string()).collect();
        let atom = table
            .id(&fact.atom.predicate, &args)
            .expect("sort-checked fact grounds to a table atom");
        clauses.push(GroundClause {
            literals: vec![Lit::new(atom, !fact.negated)],
            provenance: ClauseProvenance::Fact { index },
        });
    }
    GroundProblem { table, clauses }
}

/// Grounds the full decision problem T ∧ φ ∧ ¬ψ.
pub fn ground_problem(
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    goal: &GoalInstance,
) -> Result<GroundProblem, GroundError> {
    let declared = kb
        .goals()
        .any(|p| p.name == goal.predicate);
    if !declared {
        return Err(GroundError::GoalNotDeclared(goal.predicate.clone()));
    }

    let mut problem = ground_base(kb, claim);
    // The table holds every instance over the claim's constants, so a miss
    // means an argument names a foreign constant or one of the wrong sort.
    let goal_atom = problem
        .table
        .id(&goal.predicate, &goal.args)
        .ok_or_else(|| GroundError::GoalOutsideUniverse(goal.to_string()))?;
    problem.clauses.push(GroundClause {
        literals: vec![Lit::negative(goal_atom)],
        provenance: ClauseProvenance::NegatedGoal,
    });

    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_kb;

    fn constants(names: &[(&str, &str)]) -> Vec<Constant> {
        names
            .iter()
            .map(|(n, s)| Constant::new(*n, *s))
            .collect()
    }

    fn relative_sig() -> Signature {
        parse_kb(
            "sort Person\n\
             cond is_sick(Person) \"d\"\n\
             cond is_relative(Person, Person) \"d\"\n\
             goal is_covered(Person)\n",
        )
        .into_result()
        .unwrap()
        .signature
    }

    #[test]
    fn atom_table_counts_products() {
        let sig = relative_sig();
        let cs = constants(&[("ALICE", "Person"), ("BOB", "Person")]);
        let sig = sig.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        // is_covered: 2, is_relative: 4, is_sick: 2
        assert_eq!(table.len(), 8);
        // Lexicographic: is_covered < is_relative < is_sick; ALICE < BOB.
        assert_eq!(table.atom(0).to_string(), "is_covered(ALICE)");
        assert_eq!(table.atom(2).to_string(), "is_relative(ALICE, ALICE)");
        assert_eq!(table.atom(3).to_string(), "is_relative(ALICE, BOB)");
        assert_eq!(table.atom(7).to_string(), "is_sick(BOB)");
        assert_eq!(
            table.id("is_relative", &["BOB".into(), "ALICE".into()]),
            Some(4)
        );
    }

    #[test]
    fn empty_sort_contributes_no_atoms() {
        let sig = parse_kb(
            "sort Person\nsort Car\ncond has_damage(Car) \"d\"\ncond is_sick(Person) \"d\"\n",
        )
        .into_result()
        .unwrap()
        .signature;
        let cs = constants(&[("ALICE", "Person")]);
        let sig = sig.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        assert_eq!(table.len(), 1);
        assert_eq!(table.atom(0).to_string(), "is_sick(ALICE)");
    }

    #[test]
    fn table_rebuild_is_identical() {
        let sig = relative_sig();
        let cs = constants(&[("ALICE", "Person"), ("BOB", "Person")]);
        let sig = sig.with_constants(&cs);
        assert_eq!(build_atom_table(&sig, &cs), build_atom_table(&sig, &cs));
    }

    fn mini_kb(rules: &str) -> KnowledgeBase {
        parse_kb(&format!(
            "sort Person\n\
             cond is_sick(Person) \"d\"\n\
             cond is_relative(Person, Person) \"d\"\n\
             goal is_covered(Person)\n\
             {rules}"
        ))
        .into_result()
        .unwrap()
    }

    fn claim(consts: &[(&str, &str)], facts: &str) -> ClaimDocument {
        ClaimDocument {
            id: "C1".into(),
            constants: constants(consts),
            facts: if facts.is_empty() {
                vec![]
            } else {
                facts
                    .split(';')
                    .map(|f| {
                        let (neg, body) = match f.strip_prefix('!') {
                            Some(rest) => (true, rest),
                            None => (false, f),
                        };
                        let (pred, args) = body.split_once('(').unwrap();
                        let args = args.trim_end_matches(')');
                        crate::fol::Literal {
                            atom: crate::fol::Atom::new(
                                pred,
                                args.split(',')
                                    .filter(|a| !a.is_empty())
                                    .map(|a| Term::Constant(a.trim().to_string()))
                                    .collect(),
                            ),
                            negated: neg,
                        }
                    })
                    .collect()
            },
            raw_text: None,
        }
    }

    #[test]
    fn simple_rule_grounds_per_constant() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cs = constants(&[("ALICE", "Person"), ("BOB", "Person")]);
        let sig = kb.signature.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        let clauses = ground_sentence(&kb.theory[0], &table, &cs);
        assert_eq!(clauses.len(), 2);
        // ¬is_sick(ALICE) ∨ is_covered(ALICE)
        let sick_alice = table.id("is_sick", &["ALICE".into()]).unwrap();
        let cov_alice = table.id("is_covered", &["ALICE".into()]).unwrap();
        assert_eq!(
            clauses[0].literals,
            vec![Lit::positive(cov_alice), Lit::negative(sick_alice)]
        );
        assert_eq!(
            clauses[0].provenance,
            ClauseProvenance::SentenceInstance {
                sentence_id: "r1".into(),
                binding: vec![("p".into(), "ALICE".into())],
            }
        );
    }

    #[test]
    fn two_disjuncts_two_vars_dedup_to_six() {
        let kb = mini_kb(
            "rule r1: forall p:Person, q:Person. is_relative(p, q) & is_sick(q) | is_sick(p) -> is_covered(p)",
        );
        let cs = constants(&[("ALICE", "Person"), ("BOB", "Person")]);
        let sig = kb.signature.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        let clauses = ground_sentence(&kb.theory[0], &table, &cs);
        // 2 disjuncts × 4 bindings = 8 before dedup; the is_sick(p) disjunct
        // ignores q, so its clauses collapse pairwise: 4 + 2 = 6.
        assert_eq!(clauses.len(), 6);
    }

    #[test]
    fn empty_antecedent_emits_unit_clauses() {
        let kb = mini_kb("rule r1: forall p:Person. is_covered(p)");
        let cs = constants(&[("ALICE", "Person"), ("BOB", "Person")]);
        let sig = kb.signature.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        let clauses = ground_sentence(&kb.theory[0], &table, &cs);
        assert_eq!(clauses.len(), 2);
        assert!(clauses.iter().all(|c| c.literals.len() == 1));
    }

    #[test]
    fn tautological_instances_are_dropped() {
        let kb = mini_kb("structural rule t: forall p:Person. is_sick(p) -> is_sick(p)");
        let cs = constants(&[("ALICE", "Person")]);
        let sig = kb.signature.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        assert!(ground_sentence(&kb.theory[0], &table, &cs).is_empty());
    }

    #[test]
    fn variable_over_empty_sort_grounds_to_nothing() {
        let kb = parse_kb(
            "sort Person\nsort Car\n\
             cond has_damage(Car) \"d\"\n\
             goal is_paid(Car)\n\
             rule r1: forall c:Car. has_damage(c) -> is_paid(c)\n",
        )
        .into_result()
        .unwrap();
        let cs = constants(&[("ALICE", "Person")]);
        let sig = kb.signature.with_constants(&cs);
        let table = build_atom_table(&sig, &cs);
        assert!(ground_sentence(&kb.theory[0], &table, &cs).is_empty());
    }

    #[test]
    fn alice_problem_has_three_clauses() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cl = claim(&[("ALICE", "Person")], "is_sick(ALICE)");
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        let problem = ground_problem(&kb, &cl, &goal).unwrap();
        assert_eq!(problem.clauses.len(), 3);
        let sick = problem.table.id("is_sick", &["ALICE".into()]).unwrap();
        let cov = problem.table.id("is_covered", &["ALICE".into()]).unwrap();
        assert_eq!(
            problem.clauses[0].literals,
            vec![Lit::positive(cov), Lit::negative(sick)]
        );
        assert_eq!(problem.clauses[1].literals, vec![Lit::positive(sick)]);
        assert_eq!(
            problem.clauses[1].provenance,
            ClauseProvenance::Fact { index: 0 }
        );
        assert_eq!(problem.clauses[2].literals, vec![Lit::negative(cov)]);
        assert_eq!(problem.clauses[2].provenance, ClauseProvenance::NegatedGoal);
        assert_eq!(problem.goal_clause(), Some(2));
    }

    #[test]
    fn no_facts_drops_to_two_clauses() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cl = claim(&[("ALICE", "Person")], "");
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        let problem = ground_problem(&kb, &cl, &goal).unwrap();
        assert_eq!(problem.clauses.len(), 2);
    }

    #[test]
    fn negated_fact_passes_through() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cl = claim(&[("ALICE", "Person")], "!is_sick(ALICE)");
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        let problem = ground_problem(&kb, &cl, &goal).unwrap();
        let sick = problem.table.id("is_sick", &["ALICE".into()]).unwrap();
        assert_eq!(problem.clauses[1].literals, vec![Lit::negative(sick)]);
    }

    #[test]
    fn undeclared_goal_is_an_error() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cl = claim(&[("ALICE", "Person")], "");
        let goal = GoalInstance {
            predicate: "is_sick".into(),
            args: vec!["ALICE".into()],
        };
        assert_eq!(
            ground_problem(&kb, &cl, &goal),
            Err(GroundError::GoalNotDeclared("is_sick".into()))
        );
    }

    #[test]
    fn goal_over_a_foreign_constant_is_an_error() {
        let kb = mini_kb("rule r1: forall p:Person. is_sick(p) -> is_covered(p)");
        let cl = claim(&[("ALICE", "Person")], "is_sick(ALICE)");
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["CAROL".into()],
        };
        assert_eq!(
            ground_problem(&kb, &cl, &goal),
            Err(GroundError::GoalOutsideUniverse("is_covered(CAROL)".into()))
        );
    }

    #[test]
    fn grounding_is_deterministic() {
        let kb = mini_kb(
            "rule r1: forall p:Person, q:Person. is_relative(p, q) & is_sick(q) | is_sick(p) -> is_covered(p)",
        );
        let cl = claim(
            &[("ALICE", "Person"), ("BOB", "Person")],
            "is_sick(ALICE);is_relative(ALICE, BOB)",
        );
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["BOB".into()],
        };
        assert_eq!(
            ground_problem(&kb, &cl, &goal).unwrap(),
            ground_problem(&kb, &cl, &goal).unwrap()
        );
    }

    #[test]
    fn projected_count_matches_simple_case() {
        let kb = mini_kb(
            "rule r1: forall p:Person, q:Person. is_relative(p, q) & is_sick(q) | is_sick(p) -> is_covered(p)",
        );
        let cl = claim(&[("ALICE", "Person"), ("BOB", "Person")], "is_sick(ALICE)");
        // 2 disjuncts × 4 bindings + 1 fact + 1 goal = 10.
        assert_eq!(projected_clause_count(&kb, &cl), 10);
    }
}
