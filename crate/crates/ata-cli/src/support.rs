//! Shared plumbing for the subcommands: input loading, atomic output,
//! and the exit-code contract.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use ata_core::diag::Diagnostic;
use ata_core::engine::{parse_triggers, TriggerRule, Verdict};
use ata_core::ingest::{ExternalEndpoint, ExtractorBinding};
use ata_core::kb::{ClaimDocument, KnowledgeBase};
use ata_core::parse::{parse_claim, parse_kb, Parsed};

/// Exit codes. Verdicts map to 0/1/2; operational failures use the
/// sysexits-style codes above that range.
pub const EXIT_COVERED: i32 = 0;
pub const EXIT_NOT_COVERED: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_UNAVAILABLE: i32 = 69;
pub const EXIT_INTERNAL: i32 = 70;

/// An operational failure, already classified into its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: unknown flags, missing or unreadable input files.
    Usage(String),
    /// Inputs that read fine but do not parse or validate.
    Data(String),
    /// The external extractor could not be reached.
    Unavailable(String),
    /// A bug: states the contract says cannot happen.
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Unavailable(_) => EXIT_UNAVAILABLE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Unavailable(m) | Failure::Internal(m) => m,
        }
    }
}

pub fn verdict_exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Covered => EXIT_COVERED,
        Verdict::NotCovered => EXIT_NOT_COVERED,
        Verdict::Inconsistent => EXIT_INCONSISTENT,
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {}", path.display(), e)))
}

/// The knowledge-base text behind `--kb`: a single file, or a directory of
/// `.atakb` fragments concatenated in filename order (large documents are
/// easier to review as per-section files).
pub fn read_kb_text(path: &Path) -> Result<String, Failure> {
    if !path.is_dir() {
        return read_input(path);
    }
    let mut fragments: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {}", path.display(), e)))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "atakb"))
        .collect();
    fragments.sort();
    if fragments.is_empty() {
        return Err(Failure::Usage(format!(
            "no .atakb files in `{}`",
            path.display()
        )));
    }
    let mut text = String::new();
    for fragment in fragments {
        text.push_str(&read_input(&fragment)?);
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    Ok(text)
}

pub fn print_diagnostics(label: &str, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}: {}", label, d);
    }
}

/// Unwraps a parse: diagnostics (including lints on success) go to stderr,
/// errors become a data failure.
fn finish_parse<T>(label: &str, parsed: Parsed<T>) -> Result<T, Failure> {
    print_diagnostics(label, &parsed.diagnostics);
    if parsed.has_errors() {
        let n = parsed.diagnostics.iter().filter(|d| d.is_error()).count();
        return Err(Failure::Data(format!("{}: {} error(s)", label, n)));
    }
    parsed
        .into_result()
        .map_err(|_| Failure::Internal(format!("{}: parse yielded no value", label)))
}

pub fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = read_kb_text(path)?;
    finish_parse(&path.display().to_string(), parse_kb(&text))
}

pub fn load_claim(path: &Path, kb: &KnowledgeBase) -> Result<ClaimDocument, Failure> {
    let text = read_input(path)?;
    finish_parse(&path.display().to_string(), parse_claim(&text, kb))
}

pub fn load_triggers(
    path: Option<&Path>,
    kb: &KnowledgeBase,
) -> Result<Vec<TriggerRule>, Failure> {
    match path {
        None => Ok(Vec::new()),
        Some(path) => {
            let text = read_input(path)?;
            finish_parse(&path.display().to_string(), parse_triggers(&text, kb))
        }
    }
}

/// Extractor binding selection shared by axiomize, bench, and stability.
pub fn resolve_binding(
    extractor: Option<crate::ExtractorKind>,
    rules: Option<&Path>,
    kb: &KnowledgeBase,
) -> Result<Option<ExtractorBinding>, Failure> {
    match (extractor, rules) {
        (None, None) => Ok(None),
        (None, Some(path)) | (Some(crate::ExtractorKind::Rules), Some(path)) => {
            let text = read_input(path)?;
            let table = finish_parse(
                &path.display().to_string(),
                ata_core::ingest::rules::parse_rules(&text, kb),
            )?;
            Ok(Some(ExtractorBinding::Deterministic(table)))
        }
        (Some(crate::ExtractorKind::Rules), None) => Err(Failure::Usage(
            "--extractor rules requires --rules <FILE>".into(),
        )),
        (Some(crate::ExtractorKind::External), _) => match ExternalEndpoint::from_env() {
            Some(endpoint) => Ok(Some(ExtractorBinding::External(endpoint))),
            None => Err(Failure::Usage(
                "--extractor external requires ATA_EXTRACTOR_URL to be set".into(),
            )),
        },
    }
}

/// Writes via a temp file in the target directory plus rename, so readers
/// never observe a partial file and failures leave any existing file
/// untouched.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e: &dyn std::fmt::Display| {
        Failure::Usage(format!("cannot write `{}`: {}", path.display(), e))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(&e))?;
    tmp.write_all(bytes).map_err(|e| err(&e))?;
    tmp.persist(path).map_err(|e| err(&e))?;
    Ok(())
}

/// Sends output to `--out` (atomically) or stdout.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, content.as_bytes()),
        None => {
            print!("{}", content);
            std::io::stdout()
                .flush()
                .map_err(|e| Failure::Internal(format!("stdout: {}", e)))?;
            Ok(())
        }
    }
}

/// Caps the rayon pool when `--jobs` is given. A no-op on sequential
/// builds, where everything runs on one thread anyway.
#[cfg(feature = "parallel")]
pub fn configure_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(format!("thread pool: {}", e)))
}

#[cfg(not(feature = "parallel"))]
pub fn configure_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    Ok(())
}
