//! Aggregation and table rendering.
//!
//! Turns run records into per-platform statistics (tested / failed / rate),
//! cross-campaign comparisons, and cause-category tables. All renderings are
//! deterministic: stable column order, utility rows ascending by name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::outcome::OutcomeKind;
use crate::runner::RunRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("failure rate undefined for zero tested utilities")]
    ZeroTested,
    #[error("failed count {failed} exceeds tested count {tested}")]
    FailedExceedsTested { failed: u64, tested: u64 },
}

/// Integer failure percentage, rounded half-up.
///
/// This crate pins round-half-up because plain truncation and half-up
/// disagree on some counter pairs (12 failed of 76 tested is 15.78..%,
/// rendered 16 here); see the README note on rate rounding.
pub fn failure_rate(failed: u64, tested: u64) -> Result<u32, ReportError> {
    if tested == 0 {
        return Err(ReportError::ZeroTested);
    }
    if failed > tested {
        return Err(ReportError::FailedExceedsTested { failed, tested });
    }
    Ok(((200 * failed + tested) / (2 * tested)) as u32)
}

/// Per-utility aggregate within one campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilitySummary {
    /// Worst outcome seen: crash dominates hang dominates pass.
    pub worst: OutcomeKind,
    pub runs: usize,
    pub failing_runs: usize,
}

/// Campaign statistics for one platform.
#[derive(Debug, Clone)]
pub struct SummaryStats {
    pub platform: String,
    /// Utilities that produced at least one real (non-setup-error) run.
    pub utilities: BTreeMap<String, UtilitySummary>,
    /// Utilities excluded because every run was a setup error.
    pub setup_only: BTreeSet<String>,
    pub tested: usize,
    pub failed: usize,
    pub rate_percent: u32,
}

impl SummaryStats {
    pub fn failed_utilities(&self) -> BTreeSet<&str> {
        self.utilities
            .iter()
            .filter(|(_, s)| matches!(s.worst, OutcomeKind::Crash | OutcomeKind::Hang))
            .map(|(name, _)| name.as_str())
            .collect()
    }
}

/// Aggregate records into per-utility and campaign-level statistics.
///
/// A utility counts as failed when any of its runs crashed or hung; an
/// error exit never fails it. Utilities whose every run was a setup error
/// are excluded from the tested denominator. Order of the input records
/// does not matter.
pub fn summarize(records: &[RunRecord], platform: impl Into<String>) -> SummaryStats {
    let mut utilities: BTreeMap<String, UtilitySummary> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for record in records {
        let name = record.utility().to_string();
        seen.insert(name.clone());
        let kind = record.outcome.kind();
        if kind == OutcomeKind::SetupError {
            continue;
        }
        let entry = utilities.entry(name).or_insert(UtilitySummary {
            worst: OutcomeKind::Pass,
            runs: 0,
            failing_runs: 0,
        });
        entry.runs += 1;
        if matches!(kind, OutcomeKind::Crash | OutcomeKind::Hang) {
            entry.failing_runs += 1;
        }
        entry.worst = entry.worst.max(kind);
    }

    let setup_only: BTreeSet<String> = seen
        .into_iter()
        .filter(|name| !utilities.contains_key(name))
        .collect();
    let tested = utilities.len();
    let failed = utilities
        .values()
        .filter(|s| matches!(s.worst, OutcomeKind::Crash | OutcomeKind::Hang))
        .count();
    let rate_percent = failure_rate(failed as u64, tested as u64).unwrap_or(0);

    SummaryStats {
        platform: platform.into(),
        utilities,
        setup_only,
        tested,
        failed,
        rate_percent,
    }
}

/// Partition of the utility-name union of two campaigns.
///
/// `old` is the earlier study, `new` the current one. Every utility in
/// either campaign lands in exactly one bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignComparison {
    /// Failed before, passes now.
    pub fixed: Vec<String>,
    /// Passed before (or was absent), fails now.
    pub regressed: Vec<String>,
    /// Failed in both.
    pub still_failing: Vec<String>,
    /// Present and passing in both (or new and passing).
    pub never_failed: Vec<String>,
    /// Present before, absent now.
    pub unavailable: Vec<String>,
}

pub fn compare_campaigns(old: &SummaryStats, new: &SummaryStats) -> CampaignComparison {
    let old_failed = old.failed_utilities();
    let new_failed = new.failed_utilities();
    let mut cmp = CampaignComparison {
        fixed: Vec::new(),
        regressed: Vec::new(),
        still_failing: Vec::new(),
        never_failed: Vec::new(),
        unavailable: Vec::new(),
    };

    let mut names: BTreeSet<&str> = old.utilities.keys().map(String::as_str).collect();
    names.extend(new.utilities.keys().map(String::as_str));

    for name in names {
        let in_old = old.utilities.contains_key(name);
        let in_new = new.utilities.contains_key(name);
        let bucket = match (in_old, in_new) {
            (true, false) => &mut cmp.unavailable,
            (_, true) => match (old_failed.contains(name), new_failed.contains(name)) {
                (true, true) => &mut cmp.still_failing,
                (true, false) => &mut cmp.fixed,
                (false, true) => &mut cmp.regressed,
                (false, false) => &mut cmp.never_failed,
            },
            (false, false) => unreachable!("name came from one of the two maps"),
        };
        bucket.push(name.to_string());
    }
    cmp
}

/// Failure cause taxonomy for the annotation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureCategory {
    ReturnValues,
    PointersAndArrays,
    ErrorHandling,
    SubProcess,
    ComplexState,
    Other,
}

impl FailureCategory {
    pub const ALL: [FailureCategory; 6] = [
        FailureCategory::ReturnValues,
        FailureCategory::PointersAndArrays,
        FailureCategory::ErrorHandling,
        FailureCategory::SubProcess,
        FailureCategory::ComplexState,
        FailureCategory::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FailureCategory::ReturnValues => "ReturnValues",
            FailureCategory::PointersAndArrays => "PointersAndArrays",
            FailureCategory::ErrorHandling => "ErrorHandling",
            FailureCategory::SubProcess => "SubProcess",
            FailureCategory::ComplexState => "ComplexState",
            FailureCategory::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "returnvalues" | "return_values" => Some(FailureCategory::ReturnValues),
            "pointersandarrays" | "pointers_and_arrays" => {
                Some(FailureCategory::PointersAndArrays)
            }
            "errorhandling" | "error_handling" => Some(FailureCategory::ErrorHandling),
            "subprocess" | "sub_process" => Some(FailureCategory::SubProcess),
            "complexstate" | "complex_state" => Some(FailureCategory::ComplexState),
            "other" => Some(FailureCategory::Other),
            _ => None,
        }
    }
}

/// Human-supplied root-cause note for one (utility, platform) failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryAnnotation {
    pub utility: String,
    pub platform: String,
    pub categories: BTreeSet<FailureCategory>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotationError {
    #[error("annotation line {line}: expected utility<TAB>platform<TAB>categories[<TAB>note]")]
    Syntax { line: usize },
    #[error("annotation line {line}: unknown category `{category}`")]
    UnknownCategory { line: usize, category: String },
    #[error("annotation line {line}: empty category list")]
    EmptyCategories { line: usize },
}

/// Parse the sidecar annotation TSV: `utility \t platform \t categories
/// (comma separated) \t note`, with `#` comments.
pub fn parse_annotations(text: &str) -> Result<Vec<CategoryAnnotation>, AnnotationError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (utility, platform, cats) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(p), Some(c)) if !u.is_empty() && !p.is_empty() => (u, p, c),
            _ => return Err(AnnotationError::Syntax { line: line_no }),
        };
        let note = fields.next().unwrap_or("").to_string();
        let mut categories = BTreeSet::new();
        for cat in cats.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            let parsed = FailureCategory::parse(cat).ok_or(AnnotationError::UnknownCategory {
                line: line_no,
                category: cat.to_string(),
            })?;
            categories.insert(parsed);
        }
        if categories.is_empty() {
            return Err(AnnotationError::EmptyCategories { line: line_no });
        }
        out.push(CategoryAnnotation {
            utility: utility.to_string(),
            platform: platform.to_string(),
            categories,
            note,
        });
    }
    Ok(out)
}

/// Output syntax for the table renderers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Tsv,
}

impl TableFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "markdown" | "md" => Some(TableFormat::Markdown),
            "tsv" => Some(TableFormat::Tsv),
            _ => None,
        }
    }
}

fn render_rows(header: &[String], rows: &[Vec<String>], format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            out.push_str(&format!(
                "|{}\n",
                " --- |".repeat(header.len())
            ));
            for row in rows {
                out.push_str(&format!("| {} |\n", row.join(" | ")));
            }
        }
        TableFormat::Tsv => {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
    }
    out
}

/// Test-statistics table: one column per platform (label ascending), rows
/// for tested count, failed count, and percent failed.
pub fn render_stats_table(stats: &[SummaryStats], format: TableFormat) -> String {
    let mut sorted: Vec<&SummaryStats> = stats.iter().collect();
    sorted.sort_by(|a, b| a.platform.cmp(&b.platform));

    let mut header = vec!["Platform".to_string()];
    header.extend(sorted.iter().map(|s| s.platform.clone()));
    let mut rows = vec![
        vec!["# tested".to_string()],
        vec!["# failed".to_string()],
        vec!["% failed".to_string()],
    ];
    for s in &sorted {
        rows[0].push(s.tested.to_string());
        rows[1].push(s.failed.to_string());
        rows[2].push(format!("{}%", s.rate_percent));
    }
    render_rows(&header, &rows, format)
}

fn outcome_cell(kind: OutcomeKind) -> &'static str {
    match kind {
        OutcomeKind::Crash => "crash",
        OutcomeKind::Hang => "hang",
        _ => "",
    }
}

/// Per-utility results table: utility rows ascending, one column per
/// platform, cells crash/hang/blank, `-` for unavailable.
pub fn render_utilities_table(stats: &[SummaryStats], format: TableFormat) -> String {
    let mut sorted: Vec<&SummaryStats> = stats.iter().collect();
    sorted.sort_by(|a, b| a.platform.cmp(&b.platform));

    let mut names: BTreeSet<&str> = BTreeSet::new();
    for s in &sorted {
        names.extend(s.utilities.keys().map(String::as_str));
    }

    let mut header = vec!["Utility".to_string()];
    header.extend(sorted.iter().map(|s| s.platform.clone()));
    let rows: Vec<Vec<String>> = names
        .into_iter()
        .map(|name| {
            let mut row = vec![name.to_string()];
            for s in &sorted {
                row.push(match s.utilities.get(name) {
                    Some(summary) => outcome_cell(summary.worst).to_string(),
                    None => "-".to_string(),
                });
            }
            row
        })
        .collect();
    render_rows(&header, &rows, format)
}

/// Comparison table between an earlier and the current campaign.
pub fn render_comparison_table(
    cmp: &CampaignComparison,
    old_label: &str,
    new_label: &str,
    format: TableFormat,
) -> String {
    let header = vec![
        "Utility".to_string(),
        old_label.to_string(),
        new_label.to_string(),
        "Change".to_string(),
    ];
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let mut add = |names: &[String], old_cell: &str, new_cell: &str, change: &str| {
        for name in names {
            rows.push((
                name.clone(),
                vec![
                    name.clone(),
                    old_cell.to_string(),
                    new_cell.to_string(),
                    change.to_string(),
                ],
            ));
        }
    };
    add(&cmp.fixed, "failed", "", "fixed");
    add(&cmp.regressed, "", "failed", "regressed");
    add(&cmp.still_failing, "failed", "failed", "still-failing");
    add(&cmp.unavailable, "", "-", "unavailable");
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let rows: Vec<Vec<String>> = rows.into_iter().map(|(_, row)| row).collect();
    render_rows(&header, &rows, format)
}

/// Cause-category table: utility rows ascending, one column per category,
/// cells holding the concatenated platform letters (first letter of each
/// platform label, uppercased, label-ascending).
pub fn render_annotations_table(
    annotations: &[CategoryAnnotation],
    format: TableFormat,
) -> String {
    let mut header = vec!["Utility".to_string()];
    header.extend(FailureCategory::ALL.iter().map(|c| c.name().to_string()));

    // (utility, category) -> set of platform labels
    let mut cells: BTreeMap<(&str, FailureCategory), BTreeSet<&str>> = BTreeMap::new();
    let mut notes: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for a in annotations {
        for &cat in &a.categories {
            cells
                .entry((a.utility.as_str(), cat))
                .or_default()
                .insert(a.platform.as_str());
        }
        if !a.note.is_empty() {
            notes.entry(a.utility.as_str()).or_default().push(&a.note);
        }
    }

    let names: BTreeSet<&str> = annotations.iter().map(|a| a.utility.as_str()).collect();
    let rows: Vec<Vec<String>> = names
        .into_iter()
        .map(|name| {
            let mut row = vec![name.to_string()];
            for cat in FailureCategory::ALL {
                let cell = cells
                    .get(&(name, cat))
                    .map(|platforms| {
                        platforms
                            .iter()
                            .filter_map(|p| p.chars().next())
                            .map(|c| c.to_ascii_uppercase())
                            .collect::<String>()
                    })
                    .unwrap_or_default();
                row.push(cell);
            }
            row
        })
        .collect();
    render_rows(&header, &rows, format)
}

impl fmt::Display for SummaryStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} failed of {} tested ({}%)",
            self.platform, self.failed, self.tested, self.rate_percent
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::outcome::TestOutcome;
    use std::path::PathBuf;
    use std::time::Duration;

    fn record(utility: &str, outcome: TestOutcome) -> RunRecord {
        let entry = parse_config(&format!("stdin {utility}")).unwrap().remove(0);
        RunRecord {
            entry,
            entry_index: 0,
            argv: vec![utility.to_string()],
            inputs: vec![PathBuf::from("/in/a")],
            options: vec![],
            start_unix_ms: 0,
            wall: Duration::ZERO,
            outcome,
            stdout_tail: vec![],
            stderr_tail: vec![],
            scratch_dir: PathBuf::new(),
            campaign_seed: 0,
            group_clean: true,
            recheck_timeout: None,
        }
    }

    fn pass() -> TestOutcome {
        TestOutcome::Pass { exit_code: 0 }
    }

    fn crash() -> TestOutcome {
        TestOutcome::Crash {
            signal: 11,
            core_dumped: false,
        }
    }

    fn hang() -> TestOutcome {
        TestOutcome::hang(Duration::from_secs(2))
    }

    #[test]
    fn paper_counter_rates() {
        assert_eq!(failure_rate(9, 74).unwrap(), 12);
        assert_eq!(failure_rate(15, 78).unwrap(), 19);
        // The ambiguous cell: truncation says 15, half-up says 16. This
        // crate documents and applies half-up.
        assert_eq!(failure_rate(12, 76).unwrap(), 16);
    }

    #[test]
    fn rate_bounds_and_errors() {
        assert_eq!(failure_rate(0, 50).unwrap(), 0);
        assert_eq!(failure_rate(50, 50).unwrap(), 100);
        assert_eq!(failure_rate(1, 8).unwrap(), 13); // 12.5 rounds up
        assert_eq!(failure_rate(0, 0), Err(ReportError::ZeroTested));
        assert_eq!(
            failure_rate(2, 1),
            Err(ReportError::FailedExceedsTested {
                failed: 2,
                tested: 1
            })
        );
    }

    #[test]
    fn rate_monotone_in_failed() {
        let mut last = 0;
        for f in 0..=74 {
            let r = failure_rate(f, 74).unwrap();
            assert!(r >= last);
            last = r;
        }
        assert_eq!(last, 100);
    }

    #[test]
    fn summarize_counts_and_rate() {
        let records = vec![
            record("a", pass()),
            record("b", crash()),
            record("c", pass()),
            record("d", hang()),
            record("e", pass()),
        ];
        let stats = summarize(&records, "linux");
        assert_eq!(stats.tested, 5);
        assert_eq!(stats.failed, 2);
        assert_eq!(stats.rate_percent, 40);
    }

    #[test]
    fn nonzero_exits_never_fail_a_utility() {
        let records = vec![
            record("x", TestOutcome::Pass { exit_code: 1 }),
            record("x", TestOutcome::Pass { exit_code: 2 }),
        ];
        let stats = summarize(&records, "linux");
        assert_eq!(stats.failed, 0);
        assert_eq!(stats.utilities["x"].worst, OutcomeKind::Pass);
    }

    #[test]
    fn one_hang_among_passes_fails_the_utility() {
        let records = vec![
            record("y", pass()),
            record("y", hang()),
            record("y", pass()),
        ];
        let stats = summarize(&records, "linux");
        assert_eq!(stats.failed, 1);
        assert_eq!(stats.utilities["y"].worst, OutcomeKind::Hang);
    }

    #[test]
    fn crash_dominates_hang() {
        let records = vec![record("z", hang()), record("z", crash())];
        let stats = summarize(&records, "linux");
        assert_eq!(stats.utilities["z"].worst, OutcomeKind::Crash);
    }

    #[test]
    fn summarize_order_independent() {
        let mut records = vec![
            record("a", pass()),
            record("b", crash()),
            record("b", pass()),
            record("c", hang()),
        ];
        let forward = summarize(&records, "p");
        records.reverse();
        let backward = summarize(&records, "p");
        assert_eq!(forward.tested, backward.tested);
        assert_eq!(forward.failed, backward.failed);
        assert_eq!(forward.utilities, backward.utilities);
    }

    #[test]
    fn setup_only_utilities_excluded() {
        let records = vec![
            record("real", pass()),
            record("ghost", TestOutcome::setup_error("missing binary")),
        ];
        let stats = summarize(&records, "linux");
        assert_eq!(stats.tested, 1);
        assert!(stats.setup_only.contains("ghost"));
        assert!(!stats.utilities.contains_key("ghost"));
    }

    #[test]
    fn compare_basic_partition() {
        // old fails {x, y}; new fails {y, z}; q and x pass in new.
        let old = summarize(
            &[record("x", crash()), record("y", hang()), record("q", pass())],
            "old",
        );
        let new = summarize(
            &[
                record("x", pass()),
                record("y", crash()),
                record("z", hang()),
                record("q", pass()),
            ],
            "new",
        );
        let cmp = compare_campaigns(&old, &new);
        assert_eq!(cmp.fixed, vec!["x".to_string()]);
        assert_eq!(cmp.regressed, vec!["z".to_string()]);
        assert_eq!(cmp.still_failing, vec!["y".to_string()]);
        assert_eq!(cmp.never_failed, vec!["q".to_string()]);
        assert!(cmp.unavailable.is_empty());
    }

    #[test]
    fn compare_identical_campaigns() {
        let records = vec![record("x", crash()), record("q", pass())];
        let old = summarize(&records, "old");
        let new = summarize(&records, "new");
        let cmp = compare_campaigns(&old, &new);
        assert!(cmp.fixed.is_empty());
        assert!(cmp.regressed.is_empty());
        assert_eq!(cmp.still_failing, vec!["x".to_string()]);
    }

    #[test]
    fn compare_marks_unavailable() {
        let old = summarize(&[record("w", crash()), record("q", pass())], "old");
        let new = summarize(&[record("q", pass())], "new");
        let cmp = compare_campaigns(&old, &new);
        assert_eq!(cmp.unavailable, vec!["w".to_string()]);
    }

    #[test]
    fn compare_partitions_union() {
        let old = summarize(
            &[record("a", crash()), record("b", pass()), record("c", hang())],
            "old",
        );
        let new = summarize(
            &[record("b", crash()), record("c", pass()), record("d", pass())],
            "new",
        );
        let cmp = compare_campaigns(&old, &new);
        let mut all: Vec<String> = Vec::new();
        for bucket in [
            &cmp.fixed,
            &cmp.regressed,
            &cmp.still_failing,
            &cmp.never_failed,
            &cmp.unavailable,
        ] {
            all.extend(bucket.iter().cloned());
        }
        all.sort();
        let union: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        assert_eq!(all, union, "buckets must partition the union exactly");
    }

    #[test]
    fn empty_records_render_header_only() {
        let stats = summarize(&[], "linux");
        let table = render_utilities_table(
            std::slice::from_ref(&stats),
            TableFormat::Markdown,
        );
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 2, "header and separator only: {table}");
    }

    #[test]
    fn stats_table_columns_sorted_by_platform() {
        let a = summarize(&[record("x", crash())], "freebsd");
        let b = summarize(&[record("x", pass())], "linux");
        let c = summarize(&[record("x", pass())], "macos");
        let table = render_stats_table(&[b, c, a], TableFormat::Tsv);
        let header = table.lines().next().unwrap();
        assert_eq!(header, "Platform\tfreebsd\tlinux\tmacos");
        assert!(table.lines().nth(3).unwrap().starts_with("% failed"));
    }

    #[test]
    fn utilities_table_marks_unavailable() {
        let a = summarize(&[record("x", crash())], "a");
        let b = summarize(&[record("y", pass())], "b");
        let table = render_utilities_table(&[a, b], TableFormat::Tsv);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[1], "x\tcrash\t-");
        assert_eq!(lines[2], "y\t-\t");
    }

    #[test]
    fn annotations_parse_and_render() {
        let text = "# cause notes\n\
                    make\tFreeBSD\tPointersAndArrays\tparen scan overruns\n\
                    make\tLinux\tPointersAndArrays\t\n\
                    ftp\tFreeBSD\tReturnValues\ttok_line unchecked\n\
                    dc\tMacOS\tPointersAndArrays,Other\tslow sqrt\n";
        let annotations = parse_annotations(text).unwrap();
        assert_eq!(annotations.len(), 4);
        let table = render_annotations_table(&annotations, TableFormat::Tsv);
        let lines: Vec<&str> = table.lines().collect();
        // utility rows ascending: dc, ftp, make
        assert!(lines[1].starts_with("dc\t"));
        assert!(lines[2].starts_with("ftp\t"));
        assert!(lines[3].starts_with("make\t"));
        // make: PointersAndArrays cell holds both platform letters
        let make_cells: Vec<&str> = lines[3].split('\t').collect();
        assert_eq!(make_cells[2], "FL");
        // dc: two categories ticked on MacOS
        let dc_cells: Vec<&str> = lines[1].split('\t').collect();
        assert_eq!(dc_cells[2], "M");
        assert_eq!(dc_cells[6], "M");
    }

    #[test]
    fn annotations_errors() {
        assert_eq!(
            parse_annotations("make\tLinux\tNotACategory"),
            Err(AnnotationError::UnknownCategory {
                line: 1,
                category: "NotACategory".into()
            })
        );
        assert_eq!(
            parse_annotations("make\tLinux\t ,"),
            Err(AnnotationError::EmptyCategories { line: 1 })
        );
        assert_eq!(
            parse_annotations("make only"),
            Err(AnnotationError::Syntax { line: 1 })
        );
    }

    #[test]
    fn markdown_rendering_shape() {
        let stats = summarize(&[record("x", crash())], "linux");
        let table = render_stats_table(std::slice::from_ref(&stats), TableFormat::Markdown);
        assert!(table.starts_with("| Platform | linux |\n| --- | --- |\n"));
        assert!(table.contains("| % failed | 100% |"));
    }
}
