//! End-to-end engine properties checked against the independent
//! first-order oracle on seeded random instances.
//!
//! The oracle (`fo_decide`) shares no code with the grounder or solver —
//! it enumerates interpretations directly — so agreement here exercises
//! the whole pipeline: grounding, clausification, search, and the
//! consistency-first verdict order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ata_core::engine::{check_consistency, decide, Consistency, CoreEntryKind, Explanation};
use ata_core::fol::{Atom, Literal, PredicateKind, Term};
use ata_core::ground::ground_problem;
use ata_core::harness::generate::{random_problem, GeneratedProblem, GeneratorConfig};
use ata_core::harness::oracle::{brute_force_sat, fo_decide, OracleVerdict};
use ata_core::{GroundProblem, Verdict};

fn instances(seed: u64, count: usize) -> impl Iterator<Item = GeneratedProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GeneratorConfig::default();
    std::iter::repeat_with(move || random_problem(&mut rng, &cfg)).take(count)
}

#[test]
fn engine_agrees_with_the_first_order_oracle() {
    for p in instances(0xA11CE, 400) {
        let decision = decide(&p.kb, &p.claim, &p.goal, &[]).unwrap();
        let expected = fo_decide(&p.kb, &p.claim, &p.goal);
        assert_eq!(
            decision.verdict, expected,
            "kb:\n{}\nclaim:\n{}\ngoal: {}",
            ata_core::serialize::serialize_kb(&p.kb),
            ata_core::serialize::serialize_claim(&p.claim),
            p.goal
        );
    }
}

#[test]
fn decisions_do_not_depend_on_claim_wording() {
    for (i, p) in instances(0xBEEF, 100).enumerate() {
        let mut verbose = p.claim.clone();
        verbose.raw_text = Some(format!("Narrative variant number {} of this claim.", i));
        let mut terse = p.claim.clone();
        terse.raw_text = Some("Different words, same circumstances.".into());

        let a = decide(&p.kb, &verbose, &p.goal, &[]).unwrap();
        let b = decide(&p.kb, &terse, &p.goal, &[]).unwrap();
        let c = decide(&p.kb, &p.claim, &p.goal, &[]).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_eq!(a.to_canonical_json(), c.to_canonical_json());
    }
}

/// A random well-typed ground condition fact, if the signature admits one.
fn random_fact(rng: &mut impl Rng, p: &GeneratedProblem) -> Option<Literal> {
    let groundable: Vec<_> = p
        .kb
        .signature
        .predicates
        .iter()
        .filter(|pred| pred.kind == PredicateKind::Condition)
        .filter(|pred| {
            pred.arity
                .iter()
                .all(|sort| p.claim.constants.iter().any(|c| &c.sort == sort))
        })
        .collect();
    if groundable.is_empty() {
        return None;
    }
    let pred = groundable[rng.random_range(0..groundable.len())];
    let args = pred
        .arity
        .iter()
        .map(|sort| {
            let choices: Vec<&str> = p
                .claim
                .constants
                .iter()
                .filter(|c| &c.sort == sort)
                .map(|c| c.name.as_str())
                .collect();
            Term::Constant(choices[rng.random_range(0..choices.len())].to_string())
        })
        .collect();
    Some(Literal {
        atom: Atom {
            predicate: pred.name.clone(),
            args,
        },
        negated: rng.random_bool(0.25),
    })
}

#[test]
fn covered_verdicts_are_monotone_under_consistent_fact_growth() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut covered_seen = 0;
    for p in instances(0xC0FFEE, 600) {
        if decide(&p.kb, &p.claim, &p.goal, &[]).unwrap().verdict != Verdict::Covered {
            continue;
        }
        covered_seen += 1;
        let mut grown = p.claim.clone();
        for _ in 0..3 {
            if let Some(fact) = random_fact(&mut rng, &p) {
                if !grown.facts.contains(&fact) {
                    grown.facts.push(fact);
                }
            }
        }
        let verdict = decide(&p.kb, &grown, &p.goal, &[]).unwrap().verdict;
        // More facts can only contradict (Inconsistent) — never un-prove.
        assert_ne!(verdict, Verdict::NotCovered);
        if matches!(check_consistency(&p.kb, &grown), Consistency::Consistent) {
            assert_eq!(verdict, Verdict::Covered);
        }
        if covered_seen >= 150 {
            break;
        }
    }
    assert!(covered_seen >= 50, "only {} covered instances", covered_seen);
}

fn subproblem(problem: &GroundProblem, keep: &[usize]) -> GroundProblem {
    GroundProblem {
        table: problem.table.clone(),
        clauses: keep.iter().map(|&i| problem.clauses[i].clone()).collect(),
    }
}

#[test]
fn covered_cores_pin_the_goal_and_are_minimal() {
    let mut checked = 0;
    for p in instances(0xD00D, 500) {
        let decision = decide(&p.kb, &p.claim, &p.goal, &[]).unwrap();
        if decision.verdict != Verdict::Covered {
            continue;
        }
        checked += 1;
        let Explanation::Core { entries } = &decision.explanation else {
            panic!("covered decision without a core");
        };
        assert_eq!(
            entries
                .iter()
                .filter(|e| e.kind == CoreEntryKind::NegatedGoal)
                .count(),
            1
        );

        let problem = ground_problem(&p.kb, &p.claim, &p.goal).unwrap();
        let indices: Vec<usize> = entries.iter().map(|e| e.clause_index).collect();
        assert_eq!(
            brute_force_sat(&subproblem(&problem, &indices)),
            OracleVerdict::Unsat
        );
        for drop in 0..indices.len() {
            let reduced: Vec<usize> = indices
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != drop)
                .map(|(_, &i)| i)
                .collect();
            assert_eq!(
                brute_force_sat(&subproblem(&problem, &reduced)),
                OracleVerdict::Sat
            );
        }
        if checked >= 120 {
            break;
        }
    }
    assert!(checked >= 40, "only {} covered instances", checked);
}

#[test]
fn not_covered_models_satisfy_the_theory_and_falsify_the_goal() {
    let mut checked = 0;
    for p in instances(0xFACADE, 500) {
        let decision = decide(&p.kb, &p.claim, &p.goal, &[]).unwrap();
        if decision.verdict != Verdict::NotCovered {
            continue;
        }
        checked += 1;
        let Explanation::Model { assignments } = &decision.explanation else {
            panic!("not-covered decision without a model");
        };

        let problem = ground_problem(&p.kb, &p.claim, &p.goal).unwrap();
        assert_eq!(assignments.len(), problem.table.len());
        let model: Vec<bool> = assignments.iter().map(|(_, v)| *v).collect();
        for (id, atom) in problem.table.atoms() {
            assert_eq!(assignments[id as usize].0, atom.to_string());
        }
        // A counterexample is a total model of T ∧ φ ∧ ¬ψ: every clause
        // holds, including the negated goal, so ψ itself is false in it.
        for clause in &problem.clauses {
            assert!(clause
                .literals
                .iter()
                .any(|l| model[l.atom() as usize] == l.is_positive()));
        }
        if checked >= 120 {
            break;
        }
    }
    assert!(checked >= 40, "only {} not-covered instances", checked);
}
