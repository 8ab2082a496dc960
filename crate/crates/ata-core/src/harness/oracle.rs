//! Independent ground-truth oracles.
//!
//! [`brute_force_sat`] decides satisfiability of a ground problem by
//! exhaustive truth-table enumeration — no propagation, no search, no code
//! shared with the solver. [`fo_decide`] goes one step further and
//! adjudicates a claim directly from first-order semantics, enumerating
//! interpretations and variable bindings without ever touching the
//! grounder or solver. The engine is correct exactly when it agrees with
//! these oracles; they are deliberately slow and deliberately simple.

use std::collections::BTreeMap;

use crate::engine::Verdict;
use crate::fol::{GoalInstance, Literal, Sentence, Term};
use crate::ground::GroundProblem;
use crate::kb::{ClaimDocument, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat,
    Unsat,
}

/// Exhaustive satisfiability check. Authoritative for any ground problem
/// small enough to enumerate; refuses anything over 24 atoms.
pub fn brute_force_sat(problem: &GroundProblem) -> OracleVerdict {
    let n = problem.table.len();
    assert!(n <= 24, "brute-force oracle capped at 24 atoms, got {}", n);
    for assignment in 0u64..(1u64 << n) {
        let ok = problem.clauses.iter().all(|clause| {
            clause.literals.iter().any(|lit| {
                let value = assignment >> lit.atom() & 1 == 1;
                value == lit.is_positive()
            })
        });
        if ok {
            return OracleVerdict::Sat;
        }
    }
    OracleVerdict::Unsat
}

/// A direct model-theoretic interpretation: one truth value per ground
/// atom, keyed by (predicate, argument names).
type Interpretation = BTreeMap<(String, Vec<String>), bool>;

fn eval_literal(
    lit: &Literal,
    binding: &BTreeMap<&str, &str>,
    interp: &Interpretation,
) -> bool {
    let args: Vec<String> = lit
        .atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => binding
                .get(v.as_str())
                .unwrap_or_else(|| panic!("unbound variable `{}`", v))
                .to_string(),
            Term::Constant(c) => c.clone(),
        })
        .collect();
    let value = *interp
        .get(&(lit.atom.predicate.clone(), args))
        .expect("literal over an atom outside the universe");
    value != lit.negated
}

/// All variable bindings of a sentence over the claim's constants, one
/// map per element of the cartesian product of the variable domains.
fn bindings<'a>(
    sentence: &'a Sentence,
    claim: &'a ClaimDocument,
) -> Vec<BTreeMap<&'a str, &'a str>> {
    let domains: Vec<Vec<&str>> = sentence
        .variables
        .iter()
        .map(|(_, sort)| {
            claim
                .constants
                .iter()
                .filter(|c| c.sort == *sort)
                .map(|c| c.name.as_str())
                .collect()
        })
        .collect();
    if domains.iter().any(|d| d.is_empty()) && !sentence.variables.is_empty() {
        return Vec::new(); // quantification over an empty domain: vacuous
    }
    let mut out = vec![BTreeMap::new()];
    for ((var, _), domain) in sentence.variables.iter().zip(&domains) {
        let mut next = Vec::with_capacity(out.len() * domain.len());
        for partial in &out {
            for value in domain {
                let mut b = partial.clone();
                b.insert(var.as_str(), *value);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn sentence_holds(sentence: &Sentence, claim: &ClaimDocument, interp: &Interpretation) -> bool {
    bindings(sentence, claim).iter().all(|binding| {
        // An empty antecedent asserts the consequent unconditionally.
        let antecedent_true = sentence.antecedent.is_empty()
            || sentence
                .antecedent
                .iter()
                .any(|conj| conj.0.iter().all(|lit| eval_literal(lit, binding, interp)));
        !antecedent_true || eval_literal(&sentence.goal, binding, interp)
    })
}

fn theory_and_facts_hold(
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    interp: &Interpretation,
) -> bool {
    kb.theory
        .iter()
        .all(|s| sentence_holds(s, claim, interp))
        && claim
            .facts
            .iter()
            .all(|f| eval_literal(f, &BTreeMap::new(), interp))
}

/// Adjudicates a goal instance straight from first-order semantics over
/// the finite universe of the claim's constants: enumerate every
/// interpretation of every ground atom; the claim is Inconsistent if none
/// satisfies T ∧ φ, Covered if every satisfying interpretation makes the
/// goal true, NotCovered otherwise.
pub fn fo_decide(kb: &KnowledgeBase, claim: &ClaimDocument, goal: &GoalInstance) -> Verdict {
    // Enumerate the ground atoms with our own loop — nothing shared with
    // the grounder.
    let mut atoms: Vec<(String, Vec<String>)> = Vec::new();
    for pred in &kb.signature.predicates {
        let domains: Vec<Vec<&str>> = pred
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
        if domains.iter().any(|d| d.is_empty()) {
            continue;
        }
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for domain in &domains {
            let mut next = Vec::with_capacity(tuples.len() * domain.len());
            for t in &tuples {
                for value in domain {
                    let mut t2 = t.clone();
                    t2.push(value.to_string());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        for t in tuples {
            atoms.push((pred.name.clone(), t));
        }
    }
    let n = atoms.len();
    assert!(n <= 24, "first-order oracle capped at 24 atoms, got {}", n);

    let goal_key = (goal.predicate.clone(), goal.args.clone());
    assert!(
        atoms.contains(&goal_key),
        "goal instance {} outside the universe",
        goal
    );

    let mut consistent = false;
    let mut counterexample = false;
    for mask in 0u64..(1u64 << n) {
        let interp: Interpretation = atoms
            .iter()
            .enumerate()
            .map(|(i, atom)| (atom.clone(), mask >> i & 1 == 1))
            .collect();
        if !theory_and_facts_hold(kb, claim, &interp) {
            continue;
        }
        consistent = true;
        if !interp[&goal_key] {
            counterexample = true;
        }
        if counterexample {
            break;
        }
    }
    if !consistent {
        Verdict::Inconsistent
    } else if counterexample {
        Verdict::NotCovered
    } else {
        Verdict::Covered
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::decide;
    use crate::ground::ground_problem;
    use crate::parse::{parse_claim, parse_kb};

    fn kb() -> KnowledgeBase {
        parse_kb(
            "sort Person\n\
             cond is_sick(Person) \"d\"\n\
             goal is_covered(Person)\n\
             rule r1: forall p:Person. is_sick(p) -> is_covered(p)\n",
        )
        .into_result()
        .unwrap()
    }

    fn goal() -> GoalInstance {
        GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        }
    }

    #[test]
    fn alice_three_clause_problem_is_unsat() {
        let claim = parse_claim("claim C1\nconst ALICE: Person\nfact is_sick(ALICE)", &kb())
            .into_result()
            .unwrap();
        let problem = ground_problem(&kb(), &claim, &goal()).unwrap();
        assert_eq!(brute_force_sat(&problem), OracleVerdict::Unsat);
    }

    #[test]
    fn variant_without_the_fact_is_sat() {
        let claim = parse_claim("claim C1\nconst ALICE: Person", &kb())
            .into_result()
            .unwrap();
        let problem = ground_problem(&kb(), &claim, &goal()).unwrap();
        assert_eq!(brute_force_sat(&problem), OracleVerdict::Sat);
    }

    #[test]
    fn empty_problem_is_vacuously_sat() {
        let kb = parse_kb("sort Person\ngoal is_covered(Person)\n")
            .into_result()
            .unwrap();
        let claim = parse_claim("claim C1", &kb).into_result().unwrap();
        let problem = crate::ground::ground_base(&kb, &claim);
        assert_eq!(problem.table.len(), 0);
        assert_eq!(problem.clauses.len(), 0);
        assert_eq!(brute_force_sat(&problem), OracleVerdict::Sat);
    }

    #[test]
    fn fo_oracle_matches_engine_on_worked_examples() {
        let cases = [
            ("claim C1\nconst ALICE: Person\nfact is_sick(ALICE)", Verdict::Covered),
            ("claim C1\nconst ALICE: Person", Verdict::NotCovered),
            (
                "claim C1\nconst ALICE: Person\nfact is_sick(ALICE)\nfact !is_sick(ALICE)",
                Verdict::Inconsistent,
            ),
        ];
        for (text, expected) in cases {
            let claim = parse_claim(text, &kb()).into_result().unwrap();
            assert_eq!(fo_decide(&kb(), &claim, &goal()), expected, "{}", text);
            let decision = decide(&kb(), &claim, &goal(), &[]).unwrap();
            assert_eq!(decision.verdict, expected, "{}", text);
        }
    }

    #[test]
    fn fo_oracle_handles_structural_symmetry() {
        let kb = parse_kb(
            "sort Person\n\
             cond is_relative(Person, Person) \"d\"\n\
             cond is_sick(Person) \"d\"\n\
             goal is_covered(Person)\n\
             structural rule sym: forall p:Person, q:Person. is_relative(p, q) -> is_relative(q, p)\n\
             rule r1: forall p:Person, q:Person. is_relative(p, q) & is_sick(q) -> is_covered(p)\n",
        )
        .into_result()
        .unwrap();
        // The fact points the "wrong way"; symmetry must close the gap.
        let claim = parse_claim(
            "claim C1\nconst ALICE: Person\nconst BOB: Person\nfact is_relative(BOB, ALICE)\nfact is_sick(BOB)",
            &kb,
        )
        .into_result()
        .unwrap();
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        assert_eq!(fo_decide(&kb, &claim, &goal), Verdict::Covered);
        assert_eq!(decide(&kb, &claim, &goal, &[]).unwrap().verdict, Verdict::Covered);
    }

    #[test]
    fn fo_oracle_treats_exclusion_rules_correctly() {
        let kb = parse_kb(
            "sort Person\n\
             cond is_sick(Person) \"d\"\n\
             cond is_excluded(Person) \"d\"\n\
             goal is_covered(Person)\n\
             rule r1: forall p:Person. is_sick(p) -> is_covered(p)\n\
             rule r2: forall p:Person. is_excluded(p) -> !is_covered(p)\n",
        )
        .into_result()
        .unwrap();
        let claim = parse_claim(
            "claim C1\nconst ALICE: Person\nfact is_excluded(ALICE)",
            &kb,
        )
        .into_result()
        .unwrap();
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        // Excluded but not sick: a model exists where coverage is false,
        // so the claim is simply NotCovered (and provably never Covered).
        assert_eq!(fo_decide(&kb, &claim, &goal), Verdict::NotCovered);
        assert_eq!(
            decide(&kb, &claim, &goal, &[]).unwrap().verdict,
            Verdict::NotCovered
        );
    }

    #[test]
    fn quantification_over_empty_sort_is_vacuous() {
        let kb = parse_kb(
            "sort Person\n\
             sort Pet\n\
             cond is_stray(Pet) \"d\"\n\
             goal is_covered(Person)\n\
             rule r1: forall p:Person. is_covered(p) @ \"1\" \"everyone\"\n\
             structural rule r2: forall x:Pet. is_stray(x) -> is_stray(x) @ \"2\" \"noop\"\n",
        )
        .into_result()
        .unwrap();
        let claim = parse_claim("claim C1\nconst ALICE: Person", &kb)
            .into_result()
            .unwrap();
        let goal = GoalInstance {
            predicate: "is_covered".into(),
            args: vec!["ALICE".into()],
        };
        assert_eq!(fo_decide(&kb, &claim, &goal), Verdict::Covered);
    }
}
