//! Seeded random-instance generation for solver and engine testing.
//!
//! Two generators: [`random_cnf`] produces bare ground problems (clause
//! soup over zero-ary atoms) for solver-vs-oracle equivalence, and
//! [`random_problem`] produces full knowledge bases with claims and goals
//! for end-to-end engine properties. Both are pure functions of the RNG
//! stream, so a fixed seed reproduces an instance exactly. Size caps keep
//! every instance within the brute-force oracle's reach.

use rand::Rng;

use crate::fol::{
    Atom, Conjunct, Constant, GoalInstance, Literal, PredicateKind, PredicateSymbol, Provenance,
    Sentence, Signature, Sort, Term,
};
use crate::ground::{build_atom_table, ClauseProvenance, GroundClause, GroundProblem, Lit};
use crate::kb::{ClaimDocument, KbMeta, KnowledgeBase};

/// Size caps for generated instances. The defaults keep the ground atom
/// count at or below 16, well inside the oracle's 24-atom ceiling.
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_sorts: usize,
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_sentences: usize,
    pub max_disjuncts: usize,
    pub max_facts: usize,
    pub max_atoms: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_sorts: 2,
            max_constants: 3,
            max_predicates: 4,
            max_sentences: 6,
            max_disjuncts: 2,
            max_facts: 4,
            max_atoms: 16,
        }
    }
}

/// A generated end-to-end instance.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub kb: KnowledgeBase,
    pub claim: ClaimDocument,
    pub goal: GoalInstance,
}

/// A random ground problem: up to `max_atoms` zero-ary atoms and up to
/// `max_clauses` clauses of 1–4 literals. Tautologies and duplicate
/// literals are normalized away, as the grounder would.
pub fn random_cnf(rng: &mut impl Rng, max_atoms: usize, max_clauses: usize) -> GroundProblem {
    let n_atoms = rng.random_range(1..=max_atoms);
    let mut sig = Signature::default();
    for i in 0..n_atoms {
        sig.predicates
            .push(PredicateSymbol::condition(format!("a{:02}", i), Vec::new(), "generated"));
    }
    let table = build_atom_table(&sig, &[]);
    let n_clauses = rng.random_range(0..=max_clauses);
    let mut clauses = Vec::new();
    for i in 0..n_clauses {
        let len = rng.random_range(1..=4usize.min(n_atoms));
        let literals: Vec<Lit> = (0..len)
            .map(|_| {
                Lit::new(
                    rng.random_range(0..n_atoms) as u32,
                    rng.random_bool(0.5),
                )
            })
            .collect();
        if let Some(clause) = GroundClause::new(literals, ClauseProvenance::Fact { index: i }) {
            clauses.push(clause);
        }
    }
    GroundProblem { table, clauses }
}

fn constants_of<'a>(constants: &'a [Constant], sort: &str) -> Vec<&'a str> {
    constants
        .iter()
        .filter(|c| c.sort == sort)
        .map(|c| c.name.as_str())
        .collect()
}

/// Every ground instance of the goal predicates over the claim constants.
fn goal_candidates(sig: &Signature, constants: &[Constant]) -> Vec<GoalInstance> {
    let mut out = Vec::new();
    for pred in &sig.predicates {
        if pred.kind != PredicateKind::Goal {
            continue;
        }
        let domains: Vec<Vec<&str>> = pred
            .arity
            .iter()
            .map(|s| constants_of(constants, s))
            .collect();
        if domains.iter().any(|d| d.is_empty()) {
            continue;
        }
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for domain in &domains {
            let mut next = Vec::new();
            for t in &tuples {
                for v in domain {
                    let mut t2 = t.clone();
                    t2.push(v.to_string());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        out.extend(tuples.into_iter().map(|args| GoalInstance {
            predicate: pred.name.clone(),
            args,
        }));
    }
    out
}

fn atom_count(sig: &Signature, constants: &[Constant]) -> usize {
    sig.predicates
        .iter()
        .map(|p| {
            p.arity
                .iter()
                .map(|s| constants_of(constants, s).len())
                .product::<usize>()
        })
        .sum()
}

/// A random knowledge base, claim, and goal instance within the caps.
/// Instances span the full space the engine handles: empty and two-wide
/// antecedents, negated (exclusion) consequents, structural rules,
/// negative facts, contradictory facts, and uninhabited sorts.
pub fn random_problem(rng: &mut impl Rng, cfg: &GeneratorConfig) -> GeneratedProblem {
    for _attempt in 0..10_000 {
        let n_sorts = rng.random_range(1..=cfg.max_sorts);
        let sorts: Vec<Sort> = (1..=n_sorts)
            .map(|i| Sort {
                name: format!("S{}", i),
            })
            .collect();

        let n_constants = rng.random_range(1..=cfg.max_constants);
        let constants: Vec<Constant> = (1..=n_constants)
            .map(|i| Constant {
                name: format!("K{}", i),
                sort: sorts[rng.random_range(0..n_sorts)].name.clone(),
            })
            .collect();

        let n_preds = rng.random_range(1..=cfg.max_predicates);
        let mut predicates: Vec<PredicateSymbol> = Vec::new();
        for i in 1..=n_preds {
            let arity_len = match rng.random_range(0..10) {
                0 => 0,
                1..=6 => 1,
                _ => 2,
            };
            let arity: Vec<String> = (0..arity_len)
                .map(|_| sorts[rng.random_range(0..n_sorts)].name.clone())
                .collect();
            let name = format!("p{}", i);
            predicates.push(if rng.random_bool(0.35) {
                PredicateSymbol::goal(name, arity)
            } else {
                PredicateSymbol::condition(name, arity, "generated predicate")
            });
        }
        if !predicates.iter().any(|p| p.kind == PredicateKind::Goal) {
            let last = predicates.last().unwrap().clone();
            *predicates.last_mut().unwrap() = PredicateSymbol::goal(&last.name, last.arity.clone());
        }

        let signature = Signature {
            sorts: sorts.clone(),
            predicates,
            constants: Vec::new(),
        };

        if atom_count(&signature, &constants) > cfg.max_atoms {
            continue;
        }
        let candidates = goal_candidates(&signature, &constants);
        if candidates.is_empty() {
            continue;
        }
        let goal = candidates[rng.random_range(0..candidates.len())].clone();

        let condition_preds: Vec<PredicateSymbol> = signature
            .predicates
            .iter()
            .filter(|p| p.kind == PredicateKind::Condition)
            .cloned()
            .collect();
        let goal_preds: Vec<PredicateSymbol> = signature
            .predicates
            .iter()
            .filter(|p| p.kind == PredicateKind::Goal)
            .cloned()
            .collect();

        let n_sentences = rng.random_range(0..=cfg.max_sentences);
        let mut theory = Vec::new();
        for i in 1..=n_sentences {
            let structural = !condition_preds.is_empty() && rng.random_bool(0.15);
            let consequent_pred = if structural {
                &condition_preds[rng.random_range(0..condition_preds.len())]
            } else {
                &goal_preds[rng.random_range(0..goal_preds.len())]
            };

            // One fresh variable per consequent argument, plus sometimes a
            // spare for the antecedent to range over.
            let mut variables: Vec<(String, String)> = consequent_pred
                .arity
                .iter()
                .enumerate()
                .map(|(j, sort)| (format!("x{}", j + 1), sort.clone()))
                .collect();
            if rng.random_bool(0.2) {
                variables.push((
                    format!("x{}", variables.len() + 1),
                    sorts[rng.random_range(0..n_sorts)].name.clone(),
                ));
            }

            let consequent = Literal {
                atom: Atom {
                    predicate: consequent_pred.name.clone(),
                    args: (0..consequent_pred.arity.len())
                        .map(|j| Term::Variable(format!("x{}", j + 1)))
                        .collect(),
                },
                negated: rng.random_bool(0.25),
            };

            let var_sorts: Vec<&str> = variables.iter().map(|(_, s)| s.as_str()).collect();
            let usable: Vec<&PredicateSymbol> = condition_preds
                .iter()
                .filter(|p| p.arity.iter().all(|s| var_sorts.contains(&s.as_str())))
                .collect();

            let n_disjuncts = if usable.is_empty() || rng.random_bool(0.15) {
                0
            } else {
                rng.random_range(1..=cfg.max_disjuncts)
            };
            let mut antecedent = Vec::new();
            for _ in 0..n_disjuncts {
                let n_lits = rng.random_range(1..=2);
                let mut lits = Vec::new();
                for _ in 0..n_lits {
                    let pred = usable[rng.random_range(0..usable.len())];
                    let args: Vec<Term> = pred
                        .arity
                        .iter()
                        .map(|sort| {
                            let choices: Vec<&str> = variables
                                .iter()
                                .filter(|(_, s)| s == sort)
                                .map(|(v, _)| v.as_str())
                                .collect();
                            Term::Variable(choices[rng.random_range(0..choices.len())].to_string())
                        })
                        .collect();
                    lits.push(Literal {
                        atom: Atom {
                            predicate: pred.name.clone(),
                            args,
                        },
                        negated: rng.random_bool(0.3),
                    });
                }
                antecedent.push(Conjunct(lits));
            }

            theory.push(Sentence {
                id: format!("r{}", i),
                variables,
                antecedent,
                goal: consequent,
                structural,
                provenance: Provenance {
                    text: format!("generated rule {}", i),
                    location: format!("gen.{}", i),
                },
            });
        }

        let groundable: Vec<&PredicateSymbol> = condition_preds
            .iter()
            .filter(|p| {
                p.arity
                    .iter()
                    .all(|s| !constants_of(&constants, s).is_empty())
            })
            .collect();
        let mut facts: Vec<Literal> = Vec::new();
        if !groundable.is_empty() {
            for _ in 0..rng.random_range(0..=cfg.max_facts) {
                let pred = groundable[rng.random_range(0..groundable.len())];
                let args: Vec<Term> = pred
                    .arity
                    .iter()
                    .map(|sort| {
                        let choices = constants_of(&constants, sort);
                        Term::Constant(choices[rng.random_range(0..choices.len())].to_string())
                    })
                    .collect();
                let lit = Literal {
                    atom: Atom {
                        predicate: pred.name.clone(),
                        args,
                    },
                    negated: rng.random_bool(0.25),
                };
                if !facts.contains(&lit) {
                    facts.push(lit);
                }
            }
        }

        let kb = KnowledgeBase {
            meta: KbMeta {
                name: "generated".into(),
                version: "0".into(),
                source: String::new(),
            },
            signature,
            theory,
        };
        let claim = ClaimDocument {
            id: "GEN1".into(),
            constants,
            facts,
            raw_text: None,
        };

        debug_assert!(
            !crate::diag::has_errors(&kb.validate()),
            "generator produced an invalid KB: {:?}",
            kb.validate()
        );
        debug_assert!(
            !crate::diag::has_errors(&claim.validate(&kb)),
            "generator produced an invalid claim: {:?}",
            claim.validate(&kb)
        );

        return GeneratedProblem { kb, claim, goal };
    }
    unreachable!("generator failed to satisfy size caps in 10000 attempts");
}
