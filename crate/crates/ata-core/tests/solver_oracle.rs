//! Solver correctness against the truth-table oracle.
//!
//! Clause soups are built directly from proptest strategies (so failures
//! shrink to small witnesses) and checked three ways: verdict agreement
//! with exhaustive enumeration, model soundness on sat instances, and
//! core guarantees (unsat alone, subset-minimal) on unsat instances.

use proptest::prelude::*;

use ata_core::fol::{PredicateSymbol, Signature};
use ata_core::ground::{build_atom_table, ClauseProvenance, GroundClause, GroundProblem, Lit};
use ata_core::harness::oracle::{brute_force_sat, OracleVerdict};
use ata_core::solver::{minimize_core, solve, SolveResult, SolverConfig};

/// `(n_atoms, clauses)` where each clause is 1–4 `(atom, positive)` pairs.
fn clause_soup() -> impl Strategy<Value = (usize, Vec<Vec<(usize, bool)>>)> {
    (1usize..=10).prop_flat_map(|n_atoms| {
        let lit = (0..n_atoms, any::<bool>());
        let clause = prop::collection::vec(lit, 1..=4);
        let clauses = prop::collection::vec(clause, 0..=24);
        (Just(n_atoms), clauses)
    })
}

fn build_problem(n_atoms: usize, raw: &[Vec<(usize, bool)>]) -> GroundProblem {
    let mut sig = Signature::default();
    for i in 0..n_atoms {
        sig.predicates
            .push(PredicateSymbol::condition(format!("a{:02}", i), Vec::new(), "t"));
    }
    let table = build_atom_table(&sig, &[]);
    let clauses = raw
        .iter()
        .enumerate()
        .filter_map(|(i, lits)| {
            let lits: Vec<Lit> = lits
                .iter()
                .map(|&(atom, pos)| Lit::new(atom as u32, pos))
                .collect();
            GroundClause::new(lits, ClauseProvenance::Fact { index: i })
        })
        .collect();
    GroundProblem { table, clauses }
}

fn clause_satisfied(clause: &GroundClause, model: &[bool]) -> bool {
    clause
        .literals
        .iter()
        .any(|lit| model[lit.atom() as usize] == lit.is_positive())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn solver_matches_the_truth_table((n_atoms, raw) in clause_soup()) {
        let problem = build_problem(n_atoms, &raw);
        let expected = brute_force_sat(&problem);
        match solve(&problem, &SolverConfig::default()) {
            SolveResult::Sat { .. } => prop_assert_eq!(expected, OracleVerdict::Sat),
            SolveResult::Unsat { .. } => prop_assert_eq!(expected, OracleVerdict::Unsat),
        }
    }

    #[test]
    fn sat_models_satisfy_every_clause((n_atoms, raw) in clause_soup()) {
        let problem = build_problem(n_atoms, &raw);
        if let SolveResult::Sat { model } = solve(&problem, &SolverConfig::default()) {
            prop_assert_eq!(model.len(), problem.table.len());
            for clause in &problem.clauses {
                prop_assert!(clause_satisfied(clause, &model));
            }
        }
    }

    #[test]
    fn unsat_cores_are_unsat_alone_and_subset_minimal((n_atoms, raw) in clause_soup()) {
        let problem = build_problem(n_atoms, &raw);
        if let SolveResult::Unsat { core } = solve(&problem, &SolverConfig::default()) {
            // Unsat alone: re-solving just the core clauses stays unsat.
            let core_only = GroundProblem {
                table: problem.table.clone(),
                clauses: core.iter().map(|&i| problem.clauses[i].clone()).collect(),
            };
            prop_assert_eq!(brute_force_sat(&core_only), OracleVerdict::Unsat);

            // Subset-minimal: dropping any single member flips it to sat.
            for drop in 0..core.len() {
                let reduced = GroundProblem {
                    table: problem.table.clone(),
                    clauses: core
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != drop)
                        .map(|(_, &i)| problem.clauses[i].clone())
                        .collect(),
                };
                prop_assert_eq!(brute_force_sat(&reduced), OracleVerdict::Sat);
            }
        }
    }

    #[test]
    fn minimize_core_is_idempotent((n_atoms, raw) in clause_soup()) {
        let problem = build_problem(n_atoms, &raw);
        if let SolveResult::Unsat { core } = solve(&problem, &SolverConfig::default()) {
            let again = minimize_core(&problem, &core).unwrap();
            prop_assert_eq!(again, core);
        }
    }
}
