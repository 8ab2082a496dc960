//! `ata` — command-line front end for the claim adjudication engine.
//!
//! Subcommand exit codes:
//!
//! * `decide` — 0 Covered, 1 NotCovered, 2 Inconsistent (worst verdict
//!   across decisions when several goals or claims are decided);
//! * `validate` — 0 valid, 1 validation errors;
//! * everything else — 0 on success;
//! * operational failures on any subcommand: 64 usage, 65 unparseable or
//!   invalid data, 69 external extractor unavailable, 70 internal error.
//!
//! Canonical JSON or the documented text format goes to stdout (or to
//! `--out`, atomically); diagnostics and warnings go to stderr only.

mod support;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ata_core::diag::{DiagCode, Diagnostic};
use ata_core::engine::{goal_instances, Decision, TriggerRule};
use ata_core::fol::GoalInstance;
use ata_core::ground::projected_clause_count;
use ata_core::harness::{load_dataset, parse_goal_spec, run_dataset, stability_test};
use ata_core::ingest::{axiomize, rules::normalize_stem};
use ata_core::kb::{ClaimDocument, KnowledgeBase};
use ata_core::smtlib::export_smtlib;
use ata_core::Verdict;

use support::{
    configure_jobs, emit, load_claim, load_kb, load_triggers, print_diagnostics, resolve_binding,
    verdict_exit_code, write_atomic, Failure, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "ata",
    version,
    about = "Deterministic adjudication of policy-governed claims",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a knowledge base; exit 0 iff it has no errors.
    Validate(ValidateArgs),
    /// Adjudicate claims; prints one canonical Decision per line.
    Decide(DecideArgs),
    /// Encode a natural-language claim text as a structured claim file.
    Axiomize(AxiomizeArgs),
    /// Export one decision problem as SMT-LIB v2 text.
    ExportSmt(ExportSmtArgs),
    /// Score a labeled dataset and print an accuracy report.
    Bench(BenchArgs),
    /// Measure verdict stability over repeated dataset runs.
    Stability(StabilityArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtractorKind {
    /// Deterministic pattern-table extractor (requires --rules).
    Rules,
    /// External extraction service (requires ATA_EXTRACTOR_URL).
    External,
}

#[derive(Args)]
struct ValidateArgs {
    /// Knowledge base: a file, or a directory of .atakb fragments
    /// concatenated in filename order.
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
    /// Claim file; repeat to adjudicate several claims in one run.
    #[arg(long, required = true, value_name = "FILE")]
    claim: Vec<PathBuf>,
    /// Goal instance such as `is_covered(ALICE)`. Omitted: every goal
    /// instance the claim supports, in declaration order.
    #[arg(long, value_name = "SPEC")]
    goal: Option<String>,
    /// Review-trigger rules file.
    #[arg(long, value_name = "FILE")]
    triggers: Option<PathBuf>,
    /// Output format (`--explain text` renders proof cores with
    /// provenance quotes).
    #[arg(long, alias = "explain", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for multi-decision runs; output order is unaffected.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Refuse to enumerate more goal instances than this per claim.
    #[arg(long, value_name = "N", default_value_t = 1024)]
    max_goal_instances: usize,
    /// Warn when the projected ground clause count exceeds this.
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    clause_budget: u64,
    /// Write output here (atomically) instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AxiomizeArgs {
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
    /// Natural-language claim text file.
    #[arg(long, value_name = "FILE")]
    text: PathBuf,
    #[arg(long, value_enum, default_value_t = ExtractorKind::Rules)]
    extractor: ExtractorKind,
    /// Extraction pattern table (.atarules) for the rules extractor.
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
    /// Output claim file; default is the text file with extension
    /// `.ataclaim`.
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Claim id; default is derived from the output filename.
    #[arg(long, value_name = "ID")]
    claim_id: Option<String>,
}

#[derive(Args)]
struct ExportSmtArgs {
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
    #[arg(long, value_name = "FILE")]
    claim: PathBuf,
    #[arg(long, value_name = "SPEC")]
    goal: String,
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_name = "PATH")]
    kb: PathBuf,
    /// Dataset manifest: `<claim-file> <goal> <expected> [<group>]` lines,
    /// resolved relative to the manifest's directory.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    #[arg(long, value_enum)]
    extractor: Option<ExtractorKind>,
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Number of repeated runs to compare.
    #[arg(long, value_name = "N", default_value_t = 5)]
    repetitions: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits; everything
            // else is a usage error under the documented convention.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let code = match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Decide(args) => cmd_decide(args),
        Command::Axiomize(args) => cmd_axiomize(args),
        Command::ExportSmt(args) => cmd_export_smt(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Stability(args) => cmd_stability(args),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, Failure> {
    let text = support::read_kb_text(&args.kb)?;
    let parsed = ata_core::parse::parse_kb(&text);
    print_diagnostics(&args.kb.display().to_string(), &parsed.diagnostics);
    Ok(if parsed.has_errors() { 1 } else { 0 })
}

fn warn_clause_budget(kb: &KnowledgeBase, claim: &ClaimDocument, budget: u64) {
    let projected = projected_clause_count(kb, claim);
    if projected > budget {
        let d = Diagnostic::warning(
            DiagCode::ClauseBudgetExceeded,
            format!(
                "claim `{}` grounds to about {} clauses (budget {}); expect a slow run",
                claim.id, projected, budget
            ),
        );
        eprintln!("{}: {}", claim.id, d);
    }
}

/// Goal instances to decide for one claim: the `--goal` instance, or every
/// instance the claim supports (capped).
fn goals_for(
    kb: &KnowledgeBase,
    claim: &ClaimDocument,
    goal: Option<&GoalInstance>,
    cap: usize,
) -> Result<Vec<GoalInstance>, Failure> {
    match goal {
        Some(g) => Ok(vec![g.clone()]),
        None => {
            let instances = goal_instances(kb, claim);
            if instances.len() > cap {
                return Err(Failure::Data(format!(
                    "claim `{}` has {} goal instances (cap {}); raise --max-goal-instances or pass --goal",
                    claim.id,
                    instances.len(),
                    cap
                )));
            }
            if instances.is_empty() {
                return Err(Failure::Data(format!(
                    "claim `{}` supports no goal instance",
                    claim.id
                )));
            }
            Ok(instances)
        }
    }
}

fn decide_items(
    kb: &KnowledgeBase,
    items: &[(ClaimDocument, GoalInstance)],
    triggers: &[TriggerRule],
) -> Result<Vec<Decision>, Failure> {
    ata_core::engine::decide_batch(kb, items, triggers)
        .into_iter()
        .map(|r| r.map_err(|e| Failure::Data(e.to_string())))
        .collect()
}

fn cmd_decide(args: DecideArgs) -> Result<i32, Failure> {
    configure_jobs(args.jobs)?;
    let kb = load_kb(&args.kb)?;
    let triggers = load_triggers(args.triggers.as_deref(), &kb)?;
    let goal = args
        .goal
        .as_deref()
        .map(|spec| parse_goal_spec(spec).map_err(Failure::Data))
        .transpose()?;

    let mut items: Vec<(ClaimDocument, GoalInstance)> = Vec::new();
    for path in &args.claim {
        let claim = load_claim(path, &kb)?;
        warn_clause_budget(&kb, &claim, args.clause_budget);
        for goal in goals_for(&kb, &claim, goal.as_ref(), args.max_goal_instances)? {
            items.push((claim.clone(), goal));
        }
    }

    let decisions = decide_items(&kb, &items, &triggers)?;
    let mut output = String::new();
    for decision in &decisions {
        match args.format {
            Format::Json => {
                output.push_str(&decision.to_canonical_json());
                output.push('\n');
            }
            Format::Text => output.push_str(&decision.to_text()),
        }
    }
    emit(args.out.as_deref(), &output)?;

    let worst = decisions
        .iter()
        .map(|d| verdict_exit_code(d.verdict))
        .max()
        .unwrap_or(verdict_exit_code(Verdict::Covered));
    Ok(worst)
}

fn cmd_axiomize(args: AxiomizeArgs) -> Result<i32, Failure> {
    let kb = load_kb(&args.kb)?;
    let binding = resolve_binding(Some(args.extractor), args.rules.as_deref(), &kb)?
        .expect("axiomize always selects a binding");

    let text = std::fs::read_to_string(&args.text)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {}", args.text.display(), e)))?;

    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.text.with_extension("ataclaim"));
    let claim_id = args.claim_id.clone().unwrap_or_else(|| {
        normalize_stem(
            &out_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "claim".into()),
        )
    });

    let claim = axiomize(&text, &kb, &binding, &claim_id).map_err(|e| {
        if e.any_unavailable() {
            Failure::Unavailable(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    })?;

    write_atomic(
        &out_path,
        ata_core::serialize::serialize_claim(&claim).as_bytes(),
    )?;
    eprintln!(
        "wrote {} ({} constants, {} facts)",
        out_path.display(),
        claim.constants.len(),
        claim.facts.len()
    );
    Ok(0)
}

fn cmd_export_smt(args: ExportSmtArgs) -> Result<i32, Failure> {
    let kb = load_kb(&args.kb)?;
    let claim = load_claim(&args.claim, &kb)?;
    let goal = parse_goal_spec(&args.goal).map_err(Failure::Data)?;
    // The exporter assumes sort-checked inputs; grounding performs exactly
    // that check (and rejects goals outside the claim's universe).
    ata_core::ground::ground_problem(&kb, &claim, &goal)
        .map_err(|e| Failure::Data(e.to_string()))?;
    let script = export_smtlib(&kb, &claim, &goal);
    emit(args.out.as_deref(), &script)?;
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<i32, Failure> {
    configure_jobs(args.jobs)?;
    let kb = load_kb(&args.kb)?;
    let binding = resolve_binding(args.extractor, args.rules.as_deref(), &kb)?;
    let dataset = load_dataset(&args.manifest)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {}", args.manifest.display(), e)))?;
    let report = run_dataset(&kb, &dataset, binding.as_ref());
    let rendered = match args.format {
        Format::Json => {
            let mut s = report.to_canonical_json();
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    };
    emit(args.out.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_stability(args: StabilityArgs) -> Result<i32, Failure> {
    if args.repetitions < 2 {
        return Err(Failure::Usage("--repetitions must be at least 2".into()));
    }
    configure_jobs(args.bench.jobs)?;
    let kb = load_kb(&args.bench.kb)?;
    let binding = resolve_binding(args.bench.extractor, args.bench.rules.as_deref(), &kb)?;
    let dataset = load_dataset(&args.bench.manifest).map_err(|e| {
        Failure::Usage(format!(
            "cannot read `{}`: {}",
            args.bench.manifest.display(),
            e
        ))
    })?;
    let report = stability_test(&kb, &dataset, binding.as_ref(), args.repetitions);
    let rendered = match args.bench.format {
        Format::Json => {
            let mut s = report.to_canonical_json();
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    };
    emit(args.bench.out.as_deref(), &rendered)?;
    Ok(0)
}
