//! Campaign orchestration.
//!
//! Pairs config entries with input files, executes every test in an
//! isolated scratch directory with resource limits and its own process
//! group, classifies the outcome, and persists one record file per run.
//!
//! Everything random (option selection, two-file pairings) derives from the
//! campaign seed and stable per-test labels, so a campaign replayed with the
//! same seed resolves to exactly the same argv for every test regardless of
//! worker count or execution order.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime};

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;

use crate::config::{ConfigEntry, InputMode};
use crate::corpus::MANIFEST_NAME;
use crate::limits::ResourceLimits;
use crate::outcome::TestOutcome;
use crate::process_util::{audit_group, wait_with_deadline, WaitVerdict};
use crate::pty::{PtySession, QuitSequence};
use crate::rng::{derive_seed, SplitMix64};
use crate::tail::TailBuffer;

const TAIL_CAPACITY: usize = 16 * 1024;

/// Campaign-wide knobs.
#[derive(Debug, Clone)]
pub struct CampaignSettings {
    /// Per-test wall-clock budget; a target still alive afterwards is a
    /// hang.
    pub timeout: Duration,
    /// Concurrent tests.
    pub workers: usize,
    pub limits: ResourceLimits,
    /// Parent for the per-test scratch directories.
    pub scratch_root: PathBuf,
    pub campaign_seed: u64,
    /// When set, hangs are re-run once with the timeout scaled by this
    /// factor; survivors are marked verified.
    pub recheck_hangs: Option<u32>,
}

impl CampaignSettings {
    pub fn new(scratch_root: impl Into<PathBuf>) -> Self {
        let timeout = Duration::from_secs(300);
        Self {
            timeout,
            workers: 1,
            limits: ResourceLimits::defaults_for(timeout),
            scratch_root: scratch_root.into(),
            campaign_seed: 0,
            recheck_hangs: None,
        }
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self.limits = ResourceLimits::defaults_for(timeout);
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn campaign_seed(mut self, seed: u64) -> Self {
        self.campaign_seed = seed;
        self
    }

    pub fn recheck_hangs(mut self, factor: Option<u32>) -> Self {
        self.recheck_hangs = factor;
        self
    }
}

/// Independently include each pool token with probability one half: one
/// draw per token, included when the top bit is set. Pool order is kept.
pub fn select_options(pool: &[String], rng: &mut SplitMix64) -> Vec<String> {
    pool.iter()
        .filter(|_| rng.coin())
        .cloned()
        .collect()
}

/// One fully resolved test: everything but the execution itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedTest {
    pub entry_index: usize,
    pub entry: ConfigEntry,
    /// One input path, or two in `two_files` mode.
    pub inputs: Vec<PathBuf>,
    /// Options drawn from the entry's pool for this test.
    pub options: Vec<String>,
}

impl PlannedTest {
    /// Full command line (input paths included for the file modes).
    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec![self.entry.command.clone()];
        argv.extend(self.entry.fixed_args.iter().cloned());
        argv.extend(self.options.iter().cloned());
        match self.entry.input_mode {
            InputMode::File | InputMode::TwoFiles => {
                argv.extend(self.inputs.iter().map(|p| p.display().to_string()));
            }
            InputMode::Cp => {
                if let Some(name) = &self.entry.copy_target_name {
                    argv.push(name.clone());
                }
            }
            InputMode::Stdin | InputMode::Pty => {}
        }
        argv
    }

    fn primary_input_name(&self) -> String {
        self.inputs
            .first()
            .and_then(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "noinput".into())
    }

    /// Stable label seeding this test's private random stream.
    fn test_key(&self, campaign_seed: u64) -> u64 {
        let label = format!(
            "{}:{}:{}",
            self.entry_index,
            self.entry.utility_name(),
            self.primary_input_name()
        );
        derive_seed(campaign_seed, &label)
    }
}

/// Resolve the full test matrix: the cartesian product of entries and input
/// files, with per-test option selections and two-file pairings drawn from
/// seeds derived per test.
pub fn plan_campaign(
    entries: &[ConfigEntry],
    input_files: &[PathBuf],
    campaign_seed: u64,
) -> Vec<PlannedTest> {
    let mut plan = Vec::with_capacity(entries.len() * input_files.len());
    for (entry_index, entry) in entries.iter().enumerate() {
        for (file_index, input) in input_files.iter().enumerate() {
            let mut test = PlannedTest {
                entry_index,
                entry: entry.clone(),
                inputs: vec![input.clone()],
                options: Vec::new(),
            };
            let mut rng = SplitMix64::new(test.test_key(campaign_seed));
            if entry.input_mode == InputMode::TwoFiles && input_files.len() >= 2 {
                // Partner: uniform over the other files, drawn before the
                // option selection.
                let other = rng.next_below(input_files.len() as u64 - 1) as usize;
                let partner = if other < file_index { other } else { other + 1 };
                test.inputs.push(input_files[partner].clone());
            }
            test.options = select_options(&entry.option_pool, &mut rng);
            plan.push(test);
        }
    }
    plan
}

/// Complete provenance of one executed test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub entry: ConfigEntry,
    pub entry_index: usize,
    pub argv: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub options: Vec<String>,
    pub start_unix_ms: u64,
    pub wall: Duration,
    pub outcome: TestOutcome,
    pub stdout_tail: Vec<u8>,
    pub stderr_tail: Vec<u8>,
    pub scratch_dir: PathBuf,
    pub campaign_seed: u64,
    /// Result of the post-test process-group audit.
    pub group_clean: bool,
    /// Set when a hang was re-run with an enlarged timeout.
    pub recheck_timeout: Option<Duration>,
}

impl RunRecord {
    pub fn utility(&self) -> &str {
        self.entry.utility_name()
    }

    /// `<utility>_<inputfile>_<entry-index>.result`
    pub fn file_name(&self) -> String {
        let input = self
            .inputs
            .first()
            .and_then(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "noinput".into());
        format!(
            "{}_{}_{}.result",
            sanitize_component(self.utility()),
            sanitize_component(&input),
            self.entry_index
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &str| {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        };
        kv("entry", &self.entry.to_string());
        kv("entry_index", &self.entry_index.to_string());
        kv("utility", self.utility());
        for (i, a) in self.argv.iter().enumerate() {
            kv(&format!("argv.{i}"), a);
        }
        for (i, p) in self.inputs.iter().enumerate() {
            kv(&format!("input.{i}"), &p.display().to_string());
        }
        kv("options", &self.options.join(" "));
        kv("start_unix_ms", &self.start_unix_ms.to_string());
        kv("wall_ms", &self.wall.as_millis().to_string());
        match &self.outcome {
            TestOutcome::Pass { exit_code } => {
                kv("outcome", "pass");
                kv("exit_code", &exit_code.to_string());
            }
            TestOutcome::Crash {
                signal,
                core_dumped,
            } => {
                kv("outcome", "crash");
                kv("signal", &signal.to_string());
                kv("core_dumped", &core_dumped.to_string());
            }
            TestOutcome::Hang { timeout, verified } => {
                kv("outcome", "hang");
                kv("timeout_ms", &timeout.as_millis().to_string());
                kv("verified", &verified.to_string());
            }
            TestOutcome::SetupError { message } => {
                kv("outcome", "setup_error");
                kv("message", &message.replace('\n', " "));
            }
        }
        kv("stdout_tail_b64", &BASE64.encode(&self.stdout_tail));
        kv("stderr_tail_b64", &BASE64.encode(&self.stderr_tail));
        kv("scratch_dir", &self.scratch_dir.display().to_string());
        kv("campaign_seed", &self.campaign_seed.to_string());
        kv("group_clean", &self.group_clean.to_string());
        if let Some(t) = self.recheck_timeout {
            kv("recheck_timeout_ms", &t.as_millis().to_string());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, RecordError> {
        let mut map = std::collections::BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(RecordError::Syntax {
                line: idx + 1,
                reason: "expected key=value".into(),
            })?;
            map.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| {
            map.get(k).cloned().ok_or_else(|| RecordError::MissingKey {
                key: k.to_string(),
            })
        };
        let parse_u64 = |k: &str| -> Result<u64, RecordError> {
            get(k)?.parse().map_err(|_| RecordError::BadValue {
                key: k.to_string(),
            })
        };

        let entry_line = get("entry")?;
        let entry = crate::config::parse_config(&entry_line)
            .ok()
            .and_then(|mut v| v.pop())
            .ok_or(RecordError::BadValue {
                key: "entry".into(),
            })?;

        let collect_indexed = |prefix: &str| {
            let mut items = Vec::new();
            while let Some(v) = map.get(&format!("{prefix}.{}", items.len())) {
                items.push(v.clone());
            }
            items
        };

        let outcome = match get("outcome")?.as_str() {
            "pass" => TestOutcome::Pass {
                exit_code: parse_u64("exit_code").map(|v| v as i32).or_else(|_| {
                    get("exit_code")?
                        .parse::<i32>()
                        .map_err(|_| RecordError::BadValue {
                            key: "exit_code".into(),
                        })
                })?,
            },
            "crash" => TestOutcome::Crash {
                signal: get("signal")?
                    .parse()
                    .map_err(|_| RecordError::BadValue {
                        key: "signal".into(),
                    })?,
                core_dumped: get("core_dumped")? == "true",
            },
            "hang" => TestOutcome::Hang {
                timeout: Duration::from_millis(parse_u64("timeout_ms")?),
                verified: get("verified")? == "true",
            },
            "setup_error" => TestOutcome::SetupError {
                message: get("message")?,
            },
            other => {
                return Err(RecordError::BadValue {
                    key: format!("outcome ({other})"),
                })
            }
        };

        let decode_tail = |k: &str| -> Result<Vec<u8>, RecordError> {
            BASE64
                .decode(get(k)?)
                .map_err(|_| RecordError::BadValue { key: k.to_string() })
        };

        let options_line = get("options")?;
        Ok(RunRecord {
            entry,
            entry_index: parse_u64("entry_index")? as usize,
            argv: collect_indexed("argv"),
            inputs: collect_indexed("input").into_iter().map(PathBuf::from).collect(),
            options: if options_line.is_empty() {
                Vec::new()
            } else {
                options_line.split(' ').map(str::to_string).collect()
            },
            start_unix_ms: parse_u64("start_unix_ms")?,
            wall: Duration::from_millis(parse_u64("wall_ms")?),
            outcome,
            stdout_tail: decode_tail("stdout_tail_b64")?,
            stderr_tail: decode_tail("stderr_tail_b64")?,
            scratch_dir: PathBuf::from(get("scratch_dir")?),
            campaign_seed: parse_u64("campaign_seed")?,
            group_clean: get("group_clean")? == "true",
            recheck_timeout: map
                .get("recheck_timeout_ms")
                .and_then(|v| v.parse().ok())
                .map(Duration::from_millis),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("record line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("record missing key `{key}`")]
    MissingKey { key: String },
    #[error("record has bad value for `{key}`")]
    BadValue { key: String },
}

/// Records store wall time at millisecond precision; keep the in-memory
/// value identical to what a reloaded record will say.
fn truncate_ms(d: Duration) -> Duration {
    Duration::from_millis(d.as_millis() as u64)
}

fn sanitize_component(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Execute one planned test under the campaign settings.
///
/// The child runs in a fresh scratch directory, in its own process group,
/// with resource limits applied. Classification: signal death is a crash,
/// any exit is a pass, alive-at-timeout is an unverified hang after the
/// whole group is killed. A target that cannot be started at all yields a
/// setup-error record, never a failure.
pub fn execute_test(test: &PlannedTest, settings: &CampaignSettings) -> RunRecord {
    execute_with_timeout(test, settings, settings.timeout, None)
}

fn execute_with_timeout(
    test: &PlannedTest,
    settings: &CampaignSettings,
    timeout: Duration,
    recheck_timeout: Option<Duration>,
) -> RunRecord {
    let start_unix_ms = SystemTime::now()
        .duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let scratch_dir = settings.scratch_root.join(format!(
        "{}_{}_{}",
        sanitize_component(test.entry.utility_name()),
        sanitize_component(&test.primary_input_name()),
        test.entry_index
    ));

    let mut record = RunRecord {
        entry: test.entry.clone(),
        entry_index: test.entry_index,
        argv: test.argv(),
        inputs: test.inputs.clone(),
        options: test.options.clone(),
        start_unix_ms,
        wall: Duration::ZERO,
        outcome: TestOutcome::setup_error("not executed"),
        stdout_tail: Vec::new(),
        stderr_tail: Vec::new(),
        scratch_dir: scratch_dir.clone(),
        campaign_seed: settings.campaign_seed,
        group_clean: true,
        recheck_timeout,
    };

    crate::process_util::ensure_subreaper();
    let started = Instant::now();
    let fail_setup = |record: &mut RunRecord, message: String| {
        record.outcome = TestOutcome::setup_error(message);
        record.wall = truncate_ms(started.elapsed());
    };

    if let Err(e) = fs::create_dir_all(&scratch_dir) {
        fail_setup(&mut record, format!("scratch dir: {e}"));
        return record;
    }
    if test.entry.input_mode == InputMode::TwoFiles && test.inputs.len() != 2 {
        fail_setup(
            &mut record,
            "two_files mode needs at least two distinct input files".into(),
        );
        return record;
    }

    if test.entry.input_mode == InputMode::Pty {
        let input = match fs::read(&test.inputs[0]) {
            Ok(data) => data,
            Err(e) => {
                fail_setup(&mut record, format!("read input: {e}"));
                return record;
            }
        };
        let quit = test.entry.quit.clone().unwrap_or_else(QuitSequence::empty);
        let run = PtySession::new(test.argv())
            .timeout(timeout)
            .resource_limits(settings.limits)
            .current_dir(&scratch_dir)
            .run(&input, &quit);
        record.outcome = run.outcome;
        record.stdout_tail = run.output_tail;
        record.wall = truncate_ms(run.wall);
        record.group_clean = run.group_clean;
        return record;
    }

    let argv = test.argv();
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .current_dir(&scratch_dir)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    match test.entry.input_mode {
        InputMode::Stdin => match fs::File::open(&test.inputs[0]) {
            Ok(file) => {
                cmd.stdin(Stdio::from(file));
            }
            Err(e) => {
                fail_setup(&mut record, format!("open input: {e}"));
                return record;
            }
        },
        InputMode::Cp => {
            let name = test
                .entry
                .copy_target_name
                .as_deref()
                .unwrap_or("input.dat");
            if let Err(e) = fs::copy(&test.inputs[0], scratch_dir.join(name)) {
                fail_setup(&mut record, format!("copy input: {e}"));
                return record;
            }
            cmd.stdin(Stdio::null());
        }
        _ => {
            cmd.stdin(Stdio::null());
        }
    }
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    settings.limits.apply_to(&mut cmd);

    let mut child = match cmd.spawn() {
        Ok(child) => child,
        Err(e) => {
            fail_setup(&mut record, format!("spawn failed: {e}"));
            return record;
        }
    };
    drop(cmd);
    let pgid = child.id() as libc::pid_t;

    let stdout_pipe = child.stdout.take();
    let stderr_pipe = child.stderr.take();
    let stdout_thread = std::thread::spawn(move || drain_pipe(stdout_pipe));
    let stderr_thread = std::thread::spawn(move || drain_pipe(stderr_pipe));

    let outcome = match wait_with_deadline(&mut child, started + timeout) {
        Ok(WaitVerdict::Exited(status)) => TestOutcome::from_exit_status(status),
        Ok(WaitVerdict::DeadlineHit) => {
            crate::process_util::kill_and_reap(&mut child, pgid);
            TestOutcome::hang(timeout)
        }
        Err(e) => {
            crate::process_util::kill_and_reap(&mut child, pgid);
            TestOutcome::setup_error(format!("wait failed: {e}"))
        }
    };
    record.wall = truncate_ms(started.elapsed());
    record.outcome = outcome;
    record.group_clean = audit_group(pgid);
    record.stdout_tail = stdout_thread.join().unwrap_or_default();
    record.stderr_tail = stderr_thread.join().unwrap_or_default();
    record
}

fn drain_pipe<R: Read>(pipe: Option<R>) -> Vec<u8> {
    let Some(mut pipe) = pipe else {
        return Vec::new();
    };
    let mut tail = TailBuffer::new(TAIL_CAPACITY);
    let mut buf = [0u8; 4096];
    while let Ok(n) = pipe.read(&mut buf) {
        if n == 0 {
            break;
        }
        tail.push(&buf[..n]);
    }
    tail.into_bytes()
}

/// Write a record file atomically: temp file in the same directory, then
/// rename over the final name.
pub fn write_record(record: &RunRecord, result_dir: &Path) -> std::io::Result<PathBuf> {
    let final_path = result_dir.join(record.file_name());
    let tmp_path = result_dir.join(format!(".{}.tmp", record.file_name()));
    fs::write(&tmp_path, record.render())?;
    fs::rename(&tmp_path, &final_path)?;
    Ok(final_path)
}

/// Load every `*.result` file in a directory, sorted by file name.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>, CampaignError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| CampaignError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "result"))
        .collect();
    paths.sort();
    let mut records = Vec::with_capacity(paths.len());
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|source| CampaignError::Io {
            path: path.clone(),
            source,
        })?;
        records.push(RunRecord::parse(&text).map_err(|source| CampaignError::BadRecord {
            path,
            source,
        })?);
    }
    Ok(records)
}

/// Runner-level aggregate handed back by [`run_campaign`].
#[derive(Debug)]
pub struct CampaignSummary {
    pub records: Vec<RunRecord>,
    pub tests_run: usize,
    /// Utilities with at least one crash or hang.
    pub failed_utilities: BTreeSet<String>,
    pub setup_errors: usize,
}

impl CampaignSummary {
    pub fn from_records(records: Vec<RunRecord>) -> Self {
        let failed_utilities = records
            .iter()
            .filter(|r| r.outcome.is_failure())
            .map(|r| r.utility().to_string())
            .collect();
        let setup_errors = records
            .iter()
            .filter(|r| matches!(r.outcome, TestOutcome::SetupError { .. }))
            .count();
        Self {
            tests_run: records.len(),
            failed_utilities,
            setup_errors,
            records,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("input directory {0} contains no input files")]
    EmptyInputDir(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    BadRecord {
        path: PathBuf,
        source: RecordError,
    },
}

/// List the test inputs in a directory: regular files, sorted by name,
/// skipping dotfiles and the corpus manifest.
pub fn list_input_files(input_dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    let read = fs::read_dir(input_dir).map_err(|source| CampaignError::Io {
        path: input_dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .map(|n| {
                    let name = n.to_string_lossy();
                    name != MANIFEST_NAME && !name.starts_with('.')
                })
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CampaignError::EmptyInputDir(input_dir.to_path_buf()));
    }
    Ok(files)
}

/// Run the whole campaign: every entry against every input file, up to
/// `workers` tests at a time. Records are written to `result_dir` as tests
/// finish; the summary is assembled single-threaded after all workers join.
pub fn run_campaign(
    entries: &[ConfigEntry],
    input_dir: &Path,
    result_dir: &Path,
    settings: &CampaignSettings,
) -> Result<CampaignSummary, CampaignError> {
    let input_files = list_input_files(input_dir)?;
    fs::create_dir_all(result_dir).map_err(|source| CampaignError::Io {
        path: result_dir.to_path_buf(),
        source,
    })?;
    fs::create_dir_all(&settings.scratch_root).map_err(|source| CampaignError::Io {
        path: settings.scratch_root.clone(),
        source,
    })?;

    let plan = plan_campaign(entries, &input_files, settings.campaign_seed);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<RunRecord>> = Mutex::new(Vec::with_capacity(plan.len()));
    let write_failure: Mutex<Option<CampaignError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..settings.workers.max(1).min(plan.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= plan.len() {
                    return;
                }
                let mut record = execute_test(&plan[i], settings);
                if let Some(factor) = settings.recheck_hangs {
                    if matches!(record.outcome, TestOutcome::Hang { .. }) {
                        record = recheck_hang(&plan[i], settings, factor);
                    }
                }
                if let Err(source) = write_record(&record, result_dir) {
                    write_failure
                        .lock()
                        .unwrap()
                        .get_or_insert(CampaignError::Io {
                            path: result_dir.join(record.file_name()),
                            source,
                        });
                    return;
                }
                results.lock().unwrap().push(record);
            });
        }
    });

    if let Some(err) = write_failure.into_inner().unwrap() {
        return Err(err);
    }
    let mut records = results.into_inner().unwrap();
    records.sort_by_key(RunRecord::file_name);
    Ok(CampaignSummary::from_records(records))
}

/// Re-run a hang with the timeout scaled by `factor`. A target that now
/// exits or crashes gets that verdict; one that still hangs is recorded as
/// a verified hang.
fn recheck_hang(test: &PlannedTest, settings: &CampaignSettings, factor: u32) -> RunRecord {
    let enlarged = settings.timeout * factor.max(1);
    let mut record = execute_with_timeout(test, settings, enlarged, Some(enlarged));
    if let TestOutcome::Hang { timeout, .. } = record.outcome {
        record.outcome = TestOutcome::Hang {
            timeout,
            verified: true,
        };
    }
    record
}
