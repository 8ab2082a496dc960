//! Evaluation harness: labeled datasets, accuracy and stability reports,
//! and the independent oracles the acceptance suite is built on.
//!
//! A dataset is a directory of claim files plus one manifest. Each
//! manifest line names a claim file, a goal instance, an expected verdict,
//! and optionally a paraphrase group:
//!
//! ```text
//! c01.ataclaim is_covered(ALICE) covered
//! c02.txt      is_covered(BOB)   not_covered  group-7
//! ```
//!
//! `.ataclaim` files carry structured facts and bypass extraction; `.txt`
//! files are axiomized through the configured extractor binding first.
//! Malformed lines and per-claim failures are recorded as entry-level
//! errors and never abort a run. All reports are canonical: byte-identical
//! across runs for deterministic bindings.

pub mod generate;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::engine::{decide, Verdict};
use crate::fol::GoalInstance;
use crate::ingest::{axiomize, rules::normalize_stem, ExtractorBinding};
use crate::kb::KnowledgeBase;
use crate::parse::parse_claim;

/// One labeled dataset entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledClaim {
    /// Claim file path, relative to the dataset root.
    pub file: String,
    pub goal: GoalInstance,
    pub expected: Verdict,
    /// Paraphrase group: entries sharing a group id are semantically
    /// equivalent rewordings and must decide identically.
    pub group: Option<String>,
}

/// One manifest line: either a labeled claim or a recorded parse error.
#[derive(Debug, Clone)]
pub struct ManifestItem {
    pub line: u32,
    pub entry: Result<LabeledClaim, String>,
}

/// A loaded dataset: manifest entries plus the directory they resolve in.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub items: Vec<ManifestItem>,
}

/// Parses a goal spec like `is_covered(ALICE)`, `is_sister(ALICE,BOB)`, or
/// a bare zero-ary predicate name.
pub fn parse_goal_spec(spec: &str) -> Result<GoalInstance, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty goal spec".into());
    }
    let Some((name, rest)) = spec.split_once('(') else {
        return Ok(GoalInstance {
            predicate: spec.to_string(),
            args: Vec::new(),
        });
    };
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| format!("missing `)` in goal `{}`", spec))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    if args.iter().any(|a| a.is_empty()) {
        return Err(format!("empty argument in goal `{}`", spec));
    }
    Ok(GoalInstance {
        predicate: name.trim().to_string(),
        args,
    })
}

fn parse_expected(word: &str) -> Result<Verdict, String> {
    match word {
        "covered" => Ok(Verdict::Covered),
        "not_covered" => Ok(Verdict::NotCovered),
        "inconsistent" => Ok(Verdict::Inconsistent),
        other => Err(format!(
            "unknown expected verdict `{}`; use covered, not_covered, or inconsistent",
            other
        )),
    }
}

/// Parses manifest text. Lines are `<claim-file> <goal> <expected>
/// [<group>]`; `#` comments and blank lines are skipped; malformed lines
/// become error entries rather than failures.
pub fn parse_manifest(text: &str) -> Vec<ManifestItem> {
    let mut items = Vec::new();
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
        let entry = if words.len() < 3 || words.len() > 4 {
            Err(format!(
                "expected `<claim-file> <goal> <expected> [<group>]`, found {} fields",
                words.len()
            ))
        } else {
            parse_goal_spec(words[1]).and_then(|goal| {
                parse_expected(words[2]).map(|expected| LabeledClaim {
                    file: words[0].to_string(),
                    goal,
                    expected,
                    group: words.get(3).map(|g| g.to_string()),
                })
            })
        };
        items.push(ManifestItem {
            line: line_no,
            entry,
        });
    }
    items
}

/// Reads a manifest file; the dataset root is the manifest's directory.
pub fn load_dataset(manifest_path: &Path) -> io::Result<Dataset> {
    let text = std::fs::read_to_string(manifest_path)?;
    let root = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Dataset {
        root,
        items: parse_manifest(&text),
    })
}

/// The outcome of one dataset entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryOutcome {
    pub file: String,
    pub goal: String,
    pub expected: String,
    pub actual: Option<String>,
    pub error: Option<String>,
    pub group: Option<String>,
    pub matched: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionRow {
    pub covered: usize,
    pub not_covered: usize,
    pub inconsistent: usize,
}

impl ConfusionRow {
    fn bump(&mut self, actual: Verdict) {
        match actual {
            Verdict::Covered => self.covered += 1,
            Verdict::NotCovered => self.not_covered += 1,
            Verdict::Inconsistent => self.inconsistent += 1,
        }
    }
}

/// Verdict confusion counts: rows are expected, columns actual.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub covered: ConfusionRow,
    pub not_covered: ConfusionRow,
    pub inconsistent: ConfusionRow,
}

impl Confusion {
    fn bump(&mut self, expected: Verdict, actual: Verdict) {
        match expected {
            Verdict::Covered => self.covered.bump(actual),
            Verdict::NotCovered => self.not_covered.bump(actual),
            Verdict::Inconsistent => self.inconsistent.bump(actual),
        }
    }
}

/// Accuracy report over one dataset run. Accuracy counts every manifest
/// entry: an error entry can never match.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub total: usize,
    pub matches: usize,
    pub errors: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    pub entries: Vec<EntryOutcome>,
}

impl AccuracyReport {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut width_file = "file".len();
        let mut width_goal = "goal".len();
        for e in &self.entries {
            width_file = width_file.max(e.file.chars().count());
            width_goal = width_goal.max(e.goal.chars().count());
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<wf$}  {:<wg$}  {:<14}  {:<14}  ok",
            "file",
            "goal",
            "expected",
            "actual",
            wf = width_file,
            wg = width_goal
        );
        for e in &self.entries {
            let actual = e
                .actual
                .clone()
                .or_else(|| e.error.as_ref().map(|err| format!("error: {}", err)))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:<wf$}  {:<wg$}  {:<14}  {:<14}  {}",
                e.file,
                e.goal,
                e.expected,
                actual,
                if e.matched { "yes" } else { "NO" },
                wf = width_file,
                wg = width_goal
            );
        }
        let _ = writeln!(
            out,
            "accuracy {:.4} ({}/{}), {} error(s)",
            self.accuracy, self.matches, self.total, self.errors
        );
        out
    }
}

/// Evaluates one labeled claim: load (axiomizing `.txt` files through the
/// binding), decide, compare.
fn evaluate_entry(
    kb: &KnowledgeBase,
    root: &Path,
    entry: &LabeledClaim,
    binding: Option<&ExtractorBinding>,
) -> Result<Verdict, String> {
    let path = root.join(&entry.file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    let claim = if path.extension().is_some_and(|e| e == "txt") {
        let binding =
            binding.ok_or_else(|| "text claim requires an extractor binding".to_string())?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "claim".into());
        axiomize(&text, kb, binding, &normalize_stem(&stem)).map_err(|e| e.to_string())?
    } else {
        let parsed = parse_claim(&text, kb);
        parsed.into_result().map_err(|diags| {
            diags
                .iter()
                .filter(|d| d.is_error())
                .map(|d| d.message.clone())
                .collect::<Vec<_>>()
                .join("; ")
        })?
    };
    let decision = decide(kb, &claim, &entry.goal, &[]).map_err(|e| e.to_string())?;
    Ok(decision.verdict)
}

fn outcome_for(
    kb: &KnowledgeBase,
    root: &Path,
    item: &ManifestItem,
    binding: Option<&ExtractorBinding>,
) -> EntryOutcome {
    match &item.entry {
        Err(msg) => EntryOutcome {
            file: format!("(line {})", item.line),
            goal: String::new(),
            expected: String::new(),
            actual: None,
            error: Some(msg.clone()),
            group: None,
            matched: false,
        },
        Ok(entry) => match evaluate_entry(kb, root, entry, binding) {
            Ok(verdict) => EntryOutcome {
                file: entry.file.clone(),
                goal: entry.goal.to_string(),
                expected: entry.expected.as_str().to_string(),
                actual: Some(verdict.as_str().to_string()),
                error: None,
                group: entry.group.clone(),
                matched: verdict == entry.expected,
            },
            Err(msg) => EntryOutcome {
                file: entry.file.clone(),
                goal: entry.goal.to_string(),
                expected: entry.expected.as_str().to_string(),
                actual: None,
                error: Some(msg),
                group: entry.group.clone(),
                matched: false,
            },
        },
    }
}

/// Runs a dataset and scores it. Entries evaluate independently (in
/// parallel when the `parallel` feature is on); report order always
/// follows manifest order.
pub fn run_dataset(
    kb: &KnowledgeBase,
    dataset: &Dataset,
    binding: Option<&ExtractorBinding>,
) -> AccuracyReport {
    #[cfg(feature = "parallel")]
    let outcomes: Vec<EntryOutcome> = {
        use rayon::prelude::*;
        dataset
            .items
            .par_iter()
            .map(|item| outcome_for(kb, &dataset.root, item, binding))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<EntryOutcome> = dataset
        .items
        .iter()
        .map(|item| outcome_for(kb, &dataset.root, item, binding))
        .collect();

    let mut confusion = Confusion::default();
    let mut matches = 0;
    let mut errors = 0;
    for (outcome, item) in outcomes.iter().zip(&dataset.items) {
        if outcome.matched {
            matches += 1;
        }
        if outcome.error.is_some() {
            errors += 1;
        }
        if let (Ok(entry), Some(actual)) = (&item.entry, &outcome.actual) {
            let actual = parse_expected(actual).expect("verdicts round-trip");
            confusion.bump(entry.expected, actual);
        }
    }
    let total = outcomes.len();
    AccuracyReport {
        total,
        matches,
        errors,
        accuracy: if total == 0 {
            1.0
        } else {
            matches as f64 / total as f64
        },
        confusion,
        entries: outcomes,
    }
}

/// Per-claim verdicts across repetitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimVerdicts {
    pub file: String,
    pub results: Vec<String>,
}

/// Repeated-run stability report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub repetitions: usize,
    pub accuracy_mean: f64,
    pub accuracy_stddev: f64,
    /// Fraction of entries whose verdict changed between repetitions;
    /// exactly 0.0 for a deterministic binding.
    pub intrinsic_variance: f64,
    /// Fraction of paraphrase groups whose members disagree.
    pub extrinsic_variance: f64,
    pub flagged_groups: Vec<String>,
    pub per_claim: Vec<ClaimVerdicts>,
}

impl StabilityReport {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "repetitions         {}", self.repetitions);
        let _ = writeln!(
            out,
            "accuracy            {:.4} ± {:.4}",
            self.accuracy_mean, self.accuracy_stddev
        );
        let _ = writeln!(out, "intrinsic variance  {:.4}", self.intrinsic_variance);
        let _ = writeln!(out, "extrinsic variance  {:.4}", self.extrinsic_variance);
        if self.flagged_groups.is_empty() {
            let _ = writeln!(out, "flagged groups      (none)");
        } else {
            let _ = writeln!(out, "flagged groups      {}", self.flagged_groups.join(", "));
        }
        out
    }
}

fn population_stddev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Runs the dataset `repetitions` times and measures stability: intrinsic
/// (same input, repeated runs) and extrinsic (across paraphrase groups).
pub fn stability_test(
    kb: &KnowledgeBase,
    dataset: &Dataset,
    binding: Option<&ExtractorBinding>,
    repetitions: usize,
) -> StabilityReport {
    assert!(repetitions >= 2, "stability needs at least 2 repetitions");
    let runs: Vec<AccuracyReport> = (0..repetitions)
        .map(|_| run_dataset(kb, dataset, binding))
        .collect();

    let per_claim: Vec<ClaimVerdicts> = (0..runs[0].entries.len())
        .map(|i| ClaimVerdicts {
            file: runs[0].entries[i].file.clone(),
            results: runs
                .iter()
                .map(|r| {
                    r.entries[i]
                        .actual
                        .clone()
                        .unwrap_or_else(|| "error".to_string())
                })
                .collect(),
        })
        .collect();

    let unstable = per_claim
        .iter()
        .filter(|c| c.results.iter().any(|r| r != &c.results[0]))
        .count();
    let intrinsic_variance = if per_claim.is_empty() {
        0.0
    } else {
        unstable as f64 / per_claim.len() as f64
    };

    let accuracies: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();

    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for run in &runs {
        for e in &run.entries {
            if let Some(g) = &e.group {
                groups
                    .entry(g.clone())
                    .or_default()
                    .push(e.actual.clone().unwrap_or_else(|| "error".into()));
            }
        }
    }
    let flagged_groups: Vec<String> = groups
        .iter()
        .filter(|(_, results)| results.iter().any(|r| r != &results[0]))
        .map(|(g, _)| g.clone())
        .collect();
    let extrinsic_variance = if groups.is_empty() {
        0.0
    } else {
        flagged_groups.len() as f64 / groups.len() as f64
    };

    StabilityReport {
        repetitions,
        accuracy_mean: accuracies.iter().sum::<f64>() / repetitions as f64,
        accuracy_stddev: population_stddev(&accuracies),
        intrinsic_variance,
        extrinsic_variance,
        flagged_groups,
        per_claim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::rules::parse_rules;
    use crate::parse::parse_kb;

    fn kb() -> KnowledgeBase {
        parse_kb(
            "sort Person\n\
             cond is_sick(Person) \"acute illness\"\n\
             goal is_covered(Person)\n\
             rule r1: forall p:Person. is_sick(p) -> is_covered(p)\n",
        )
        .into_result()
        .unwrap()
    }

    fn write(dir: &Path, name: &str, content: &str) {
        std::fs::write(dir.join(name), content).unwrap();
    }

    #[test]
    fn goal_specs_parse() {
        assert_eq!(
            parse_goal_spec("is_covered(ALICE)").unwrap().to_string(),
            "is_covered(ALICE)"
        );
        assert_eq!(
            parse_goal_spec("is_sister(ALICE,BOB)").unwrap().args.len(),
            2
        );
        assert_eq!(parse_goal_spec("approved").unwrap().args.len(), 0);
        assert_eq!(parse_goal_spec("approved()").unwrap().args.len(), 0);
        assert!(parse_goal_spec("broken(ALICE").is_err());
        assert!(parse_goal_spec("").is_err());
    }

    #[test]
    fn manifest_isolates_malformed_lines() {
        let items = parse_manifest(
            "# comment\n\
             c01.ataclaim is_covered(ALICE) covered\n\
             just-two-fields oops\n\
             c02.ataclaim is_covered(ALICE) maybe\n\
             c03.ataclaim is_covered(ALICE) not_covered group-1\n",
        );
        assert_eq!(items.len(), 4);
        assert!(items[0].entry.is_ok());
        assert!(items[1].entry.is_err());
        assert!(items[2].entry.is_err());
        let last = items[3].entry.as_ref().unwrap();
        assert_eq!(last.group.as_deref(), Some("group-1"));
        assert_eq!(last.expected, Verdict::NotCovered);
    }

    #[test]
    fn dataset_scores_and_reports_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "c01.ataclaim",
            "claim C01\nconst ALICE: Person\nfact is_sick(ALICE)\n",
        );
        write(dir.path(), "c02.ataclaim", "claim C02\nconst ALICE: Person\n");
        write(
            dir.path(),
            "c03.ataclaim",
            "claim C03\nconst ALICE: Person\nfact is_sick(ALICE)\nfact !is_sick(ALICE)\n",
        );
        write(
            dir.path(),
            "manifest.txt",
            "c01.ataclaim is_covered(ALICE) covered\n\
             c02.ataclaim is_covered(ALICE) not_covered\n\
             c03.ataclaim is_covered(ALICE) inconsistent\n",
        );
        let dataset = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let report = run_dataset(&kb(), &dataset, None);
        assert_eq!(report.total, 3);
        assert_eq!(report.matches, 3);
        assert_eq!(report.errors, 0);
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.confusion.covered.covered, 1);
        assert_eq!(report.confusion.not_covered.not_covered, 1);
        assert_eq!(report.confusion.inconsistent.inconsistent, 1);
        assert_eq!(report.confusion.covered.not_covered, 0);

        let again = run_dataset(&kb(), &dataset, None);
        assert_eq!(report.to_canonical_json(), again.to_canonical_json());
        assert_eq!(report.to_text(), again.to_text());
        assert!(report.to_text().contains("accuracy 1.0000 (3/3)"));
    }

    #[test]
    fn per_entry_failures_never_abort_the_run() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "good.ataclaim",
            "claim C01\nconst ALICE: Person\nfact is_sick(ALICE)\n",
        );
        write(dir.path(), "bad.ataclaim", "this is not a claim file\n");
        write(
            dir.path(),
            "manifest.txt",
            "good.ataclaim is_covered(ALICE) covered\n\
             missing.ataclaim is_covered(ALICE) covered\n\
             good.ataclaim is_undeclared(ALICE) covered\n\
             bad.ataclaim is_covered(ALICE) covered\n\
             malformed line\n",
        );
        let dataset = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let report = run_dataset(&kb(), &dataset, None);
        assert_eq!(report.total, 5);
        assert_eq!(report.matches, 1);
        assert_eq!(report.errors, 4);
        assert!((report.accuracy - 0.2).abs() < 1e-12);
        assert!(report.entries[1].error.as_ref().unwrap().contains("missing.ataclaim"));
        assert!(report.entries[2].error.is_some());
        assert!(report.entries[4].file.contains("line 5"));
    }

    #[test]
    fn stability_is_exactly_zero_for_deterministic_runs() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "c01.ataclaim",
            "claim C01\nconst ALICE: Person\nfact is_sick(ALICE)\n",
        );
        write(dir.path(), "c02.ataclaim", "claim C02\nconst ALICE: Person\n");
        write(
            dir.path(),
            "manifest.txt",
            "c01.ataclaim is_covered(ALICE) covered\n\
             c02.ataclaim is_covered(ALICE) not_covered\n",
        );
        let dataset = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let report = stability_test(&kb(), &dataset, None, 5);
        assert_eq!(report.repetitions, 5);
        assert_eq!(report.accuracy_mean, 1.0);
        assert_eq!(report.accuracy_stddev, 0.0);
        assert_eq!(report.intrinsic_variance, 0.0);
        assert_eq!(report.extrinsic_variance, 0.0);
        assert!(report.flagged_groups.is_empty());
        assert!(report.per_claim.iter().all(|c| c.results.len() == 5));
        let again = stability_test(&kb(), &dataset, None, 5);
        assert_eq!(report.to_canonical_json(), again.to_canonical_json());
    }

    #[test]
    fn defeated_paraphrase_flags_its_group() {
        let dir = tempfile::tempdir().unwrap();
        let table = parse_rules(
            "entity Person <x> filed\nrelation is_sick <1> fell ill\n",
            &kb(),
        )
        .into_result()
        .unwrap();
        let binding = ExtractorBinding::Deterministic(table);
        // g1: both paraphrases extract the same facts.
        write(dir.path(), "a1.txt", "Alice filed a claim. Alice fell ill.\n");
        write(dir.path(), "a2.txt", "Alice filed papers; Alice fell ill yesterday.\n");
        // g2: the second wording defeats the `fell ill` pattern.
        write(dir.path(), "b1.txt", "Bob filed a claim. Bob fell ill.\n");
        write(dir.path(), "b2.txt", "Bob filed a claim. Bob became unwell.\n");
        write(
            dir.path(),
            "manifest.txt",
            "a1.txt is_covered(ALICE) covered g1\n\
             a2.txt is_covered(ALICE) covered g1\n\
             b1.txt is_covered(BOB) covered g2\n\
             b2.txt is_covered(BOB) covered g2\n",
        );
        let dataset = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let report = stability_test(&kb(), &dataset, Some(&binding), 3);
        assert_eq!(report.intrinsic_variance, 0.0);
        assert_eq!(report.flagged_groups, vec!["g2".to_string()]);
        assert_eq!(report.extrinsic_variance, 0.5);
    }

    #[test]
    fn text_claims_without_binding_are_entry_errors() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.txt", "Alice fell ill.\n");
        write(dir.path(), "manifest.txt", "c.txt is_covered(ALICE) covered\n");
        let dataset = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let report = run_dataset(&kb(), &dataset, None);
        assert_eq!(report.errors, 1);
        assert!(report.entries[0]
            .error
            .as_ref()
            .unwrap()
            .contains("extractor binding"));
    }
}
