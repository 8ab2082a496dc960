//! Deterministic propositional satisfiability with unsat-core extraction
//! and total-model construction.
//!
//! The algorithm is plain DPLL: unit propagation to fixpoint, then a
//! decision on the lowest-numbered unassigned atom, false branch first,
//! chronological backtracking. No activity heuristics, no restarts, no
//! randomness — two runs on the same input produce bit-identical results,
//! which the whole engine's reproducibility guarantee rests on.
//!
//! Unsat cores are subset-minimal (removing any single clause restores
//! satisfiability), obtained by deletion: walk the clause indices in
//! ascending order and drop every clause whose removal keeps the set
//! unsatisfiable. One pass suffices — the working set only shrinks, and a
//! subset of a satisfiable set stays satisfiable, so every kept clause
//! remains necessary at the end. Minimal means subset-minimal, not minimum
//! cardinality.

use thiserror::Error;

use crate::ground::{GroundProblem, Lit};

/// Solver knobs. The decision order is fixed (lexicographic by atom id)
/// and there is no seed: no configuration can introduce nondeterminism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Minimize unsat cores by deletion. Off returns the full clause set
    /// as the core (sound but not minimal); useful only for debugging.
    pub minimize_core: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            minimize_core: true,
        }
    }
}

/// Outcome of a satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// A total assignment, indexed by atom id, satisfying every clause.
    Sat { model: Vec<bool> },
    /// Ascending clause indices whose conjunction is unsatisfiable.
    Unsat { core: Vec<usize> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("clause set is satisfiable; there is no unsat core to minimize")]
    CoreNotUnsat,
}

/// Verdict of the coverage check on T ∧ φ ∧ ¬ψ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    /// ¬ψ is unsatisfiable under T ∧ φ: the goal is entailed. The core is
    /// the proof-relevant clause subset and always contains the
    /// negated-goal clause.
    Covered { core: Vec<usize> },
    /// T ∧ φ ∧ ¬ψ is satisfiable; the model is a total counterexample
    /// interpretation in which the goal fails.
    NotCovered { model: Vec<bool> },
}

enum Propagation {
    Done,
    Conflict,
}

/// Unit-propagates to fixpoint. Scans clauses in index order and restarts
/// after each forced assignment; unit propagation is confluent, so the
/// fixpoint (and thus every model we ever return) does not depend on scan
/// order — the fixed order just makes intermediate states reproducible too.
fn propagate(
    clauses: &[&[Lit]],
    assignment: &mut [Option<bool>],
    trail: &mut Vec<(u32, bool)>,
) -> Propagation {
    'restart: loop {
        for clause in clauses {
            let mut unassigned: Option<Lit> = None;
            let mut satisfied = false;
            let mut unassigned_count = 0;
            for &lit in *clause {
                match assignment[lit.atom() as usize] {
                    Some(v) if v == lit.is_positive() => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        unassigned_count += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (unassigned_count, unassigned) {
                (0, _) => return Propagation::Conflict,
                (1, Some(lit)) => {
                    assignment[lit.atom() as usize] = Some(lit.is_positive());
                    trail.push((lit.atom(), false));
                    continue 'restart;
                }
                _ => {}
            }
        }
        return Propagation::Done;
    }
}

/// Plain DPLL over a clause subset. Returns a total model or `None`.
fn dpll(num_atoms: usize, clauses: &[&[Lit]]) -> Option<Vec<bool>> {
    let mut assignment: Vec<Option<bool>> = vec![None; num_atoms];
    // Trail entries: (atom, is_open_decision). An open decision still has
    // its true branch untried; implied and flipped assignments have none.
    let mut trail: Vec<(u32, bool)> = Vec::new();

    loop {
        match propagate(clauses, &mut assignment, &mut trail) {
            Propagation::Conflict => {
                // Chronological backtracking to the most recent open
                // decision; flip it to true and close it.
                loop {
                    match trail.pop() {
                        None => return None,
                        Some((atom, true)) => {
                            assignment[atom as usize] = Some(true);
                            trail.push((atom, false));
                            break;
                        }
                        Some((atom, false)) => {
                            assignment[atom as usize] = None;
                        }
                    }
                }
            }
            Propagation::Done => {
                // Decide the lowest unassigned atom, false first — this is
                // also what gives unconstrained atoms their default-false
                // polarity in returned models.
                match assignment.iter().position(Option::is_none) {
                    None => {
                        return Some(assignment.iter().map(|v| v.unwrap()).collect());
                    }
                    Some(atom) => {
                        assignment[atom] = Some(false);
                        trail.push((atom as u32, true));
                    }
                }
            }
        }
    }
}

/// Satisfiability of the clause subset selected by `indices`.
fn solve_subset(problem: &GroundProblem, indices: &[usize]) -> Option<Vec<bool>> {
    let clauses: Vec<&[Lit]> = indices
        .iter()
        .map(|&i| problem.clauses[i].literals.as_slice())
        .collect();
    dpll(problem.table.len(), &clauses)
}

/// Deletion-based core minimization with an optional protected clause that
/// is never considered for deletion (used to pin the negated-goal clause).
fn minimize_with_protected(
    problem: &GroundProblem,
    core: &[usize],
    protected: Option<usize>,
) -> Result<Vec<usize>, SolverError> {
    let mut working: Vec<usize> = core.to_vec();
    working.sort_unstable();
    working.dedup();
    if solve_subset(problem, &working).is_some() {
        return Err(SolverError::CoreNotUnsat);
    }

    let mut i = 0;
    while i < working.len() {
        if Some(working[i]) == protected {
            i += 1;
            continue;
        }
        let mut candidate = working.clone();
        candidate.remove(i);
        if solve_subset(problem, &candidate).is_none() {
            working = candidate; // still unsat without it: not needed
        } else {
            i += 1; // needed: keep and move on
        }
    }
    Ok(working)
}

/// Shrinks an unsatisfiable clause selection to a subset-minimal core.
/// Deletion order is ascending clause index, which fixes the result
/// deterministically when several minimal cores exist.
pub fn minimize_core(
    problem: &GroundProblem,
    core: &[usize],
) -> Result<Vec<usize>, SolverError> {
    minimize_with_protected(problem, core, None)
}

/// Decides satisfiability of the whole problem. Unsat cores are minimized
/// when the configuration says so, otherwise the full index set is
/// returned (which is still an unsatisfiable set).
pub fn solve(problem: &GroundProblem, cfg: &SolverConfig) -> SolveResult {
    let all: Vec<usize> = (0..problem.clauses.len()).collect();
    match solve_subset(problem, &all) {
        Some(model) => SolveResult::Sat { model },
        None => {
            let core = if cfg.minimize_core {
                minimize_with_protected(problem, &all, None)
                    .expect("whole set just solved unsat")
            } else {
                all
            };
            SolveResult::Unsat { core }
        }
    }
}

/// The coverage check: Covered iff T ∧ φ ∧ ¬ψ is unsatisfiable. The
/// problem must contain exactly one negated-goal clause; it is protected
/// during minimization so the returned core always names it. (When T ∧ φ
/// is consistent — the only state the decision engine calls this in — the
/// negated-goal clause is necessary anyway and protection changes
/// nothing.)
pub fn check_validity(problem: &GroundProblem, cfg: &SolverConfig) -> Validity {
    let goal_idx = problem
        .goal_clause()
        .expect("problem carries a negated-goal clause");
    let all: Vec<usize> = (0..problem.clauses.len()).collect();
    match solve_subset(problem, &all) {
        Some(model) => Validity::NotCovered { model },
        None => {
            let core = if cfg.minimize_core {
                minimize_with_protected(problem, &all, Some(goal_idx))
                    .expect("whole set just solved unsat")
            } else {
                all
            };
            Validity::Covered { core }
        }
    }
}
