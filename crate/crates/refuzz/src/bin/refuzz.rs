//! Multi-call command-line front end.
//!
//! One binary, five tools. Invoke as `refuzz <tool> ...`, or hard-link /
//! symlink it under the classic names (`refuzz-gen`, `refuzz-corpus`,
//! `refuzz-pty`, `refuzz-run`, `refuzz-report`) and the link name selects
//! the tool.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use refuzz::config;
use refuzz::corpus::{self, CharsetClass, CorpusPlan, NewlineMode, SizeClass};
use refuzz::generator::{self, parse_gen_cli};
use refuzz::pty::{PtySession, QuitSequence};
use refuzz::report::{self, TableFormat};
use refuzz::runner::{self, CampaignSettings};

const USAGE: &str = "\
usage: refuzz <tool> [args]
       refuzz-<tool> [args]   (via hard link or symlink)

tools:
  gen     LENGTH [-p] [-a] [-0] [-l MAX] [-s SEED] [-m MOD] [-d MS]
          random byte stream on stdout
  corpus  --out DIR [--sizes s,m,l,h] [--charsets LIST] [--newline lines,raw]
          [--per-category N] [--seed S]
          build the input-file matrix plus MANIFEST.tsv
  pty     [--quit SEQ] [--timeout SECS] [--no-sanitize] -- CMD [ARGS...]
          drive CMD through a pseudo-terminal, stdin as input
  run     CONFIG -i INPUT_DIR -o RESULT_DIR [--timeout S] [--workers N]
          [--seed S] [--recheck-hangs F]
          execute a test campaign, one record file per run
  report  RESULT_DIR... [--annotations FILE] [--compare OLD_DIR]
          [--format markdown|tsv]
          render statistics and category tables
";

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    let tool_from_name = Path::new(&args[0])
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_prefix("refuzz-"))
        .map(str::to_string);

    let (tool, rest) = match tool_from_name {
        Some(tool) => (tool, args.split_off(1)),
        None => {
            if args.len() < 2 {
                eprint!("{USAGE}");
                return ExitCode::from(2);
            }
            let rest = args.split_off(2);
            (args.remove(1), rest)
        }
    };

    let result = match tool.as_str() {
        "gen" => cmd_gen(&rest),
        "corpus" => cmd_corpus(&rest),
        "pty" => cmd_pty(&rest),
        "run" => cmd_run(&rest),
        "report" => cmd_report(&rest),
        "-h" | "--help" | "help" => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => Err(format!("unknown tool `{other}`\n{USAGE}")),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("refuzz-{tool}: {message}");
            ExitCode::from(2)
        }
    }
}

fn take_value<'a>(
    it: &mut impl Iterator<Item = &'a String>,
    flag: &str,
) -> Result<&'a String, String> {
    it.next().ok_or_else(|| format!("{flag} requires a value"))
}

fn parse_num<T: std::str::FromStr>(value: &str, flag: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad value `{value}` for {flag}"))
}

fn cmd_gen(args: &[String]) -> Result<u8, String> {
    let spec = parse_gen_cli(args).map_err(|e| e.to_string())?;
    if !args.iter().any(|a| a == "-s") {
        // Entropy-seeded run: report the seed so it can be replayed.
        eprintln!("seed: {}", spec.seed);
    }
    let stdout = std::io::stdout();
    let mut sink = std::io::BufWriter::new(stdout.lock());
    match generator::generate_stream(&spec, &mut sink).map(|_| sink.flush()) {
        Ok(Ok(())) => Ok(0),
        // A downstream consumer that stopped reading is not our error.
        Ok(Err(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(0),
        Err(e) if e.source.kind() == std::io::ErrorKind::BrokenPipe => Ok(0),
        Ok(Err(e)) => Err(e.to_string()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_list<T: Copy>(
    raw: &str,
    what: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).ok_or_else(|| format!("unknown {what} `{t}`")))
        .collect()
}

fn cmd_corpus(args: &[String]) -> Result<u8, String> {
    let mut out: Option<PathBuf> = None;
    let mut sizes = SizeClass::ALL.to_vec();
    let mut charsets = CharsetClass::ALL.to_vec();
    let mut newline_modes = NewlineMode::ALL.to_vec();
    let mut files_per_category = 5u32;
    let mut base_seed = 0u64;

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--out" => out = Some(PathBuf::from(take_value(&mut it, "--out")?)),
            "--sizes" => {
                sizes = parse_list(take_value(&mut it, "--sizes")?, "size", SizeClass::parse)?;
            }
            "--charsets" => {
                charsets = parse_list(
                    take_value(&mut it, "--charsets")?,
                    "charset",
                    CharsetClass::parse,
                )?;
            }
            "--newline" => {
                newline_modes = parse_list(
                    take_value(&mut it, "--newline")?,
                    "newline mode",
                    NewlineMode::parse,
                )?;
            }
            "--per-category" => {
                files_per_category =
                    parse_num(take_value(&mut it, "--per-category")?, "--per-category")?;
            }
            "--seed" => base_seed = parse_num(take_value(&mut it, "--seed")?, "--seed")?,
            other => return Err(format!("unknown argument `{other}`")),
        }
    }
    let output_dir = out.ok_or("--out DIR is required")?;

    let plan = CorpusPlan {
        sizes,
        charsets,
        newline_modes,
        files_per_category,
        base_seed,
        output_dir,
    };
    let manifest = corpus::build_corpus(&plan).map_err(|e| e.to_string())?;
    let total: u64 = manifest.entries.iter().map(|e| e.size).sum();
    println!(
        "{} files, {} bytes, manifest {}",
        manifest.entries.len(),
        total,
        plan.output_dir.join(corpus::MANIFEST_NAME).display()
    );
    Ok(0)
}

fn cmd_pty(args: &[String]) -> Result<u8, String> {
    let mut quit = QuitSequence::empty();
    let mut timeout = Duration::from_secs(300);
    let mut sanitize = true;
    let mut argv: Vec<String> = Vec::new();

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--quit" => {
                quit = QuitSequence::parse(take_value(&mut it, "--quit")?)
                    .map_err(|e| e.to_string())?;
            }
            "--timeout" => {
                timeout =
                    Duration::from_secs(parse_num(take_value(&mut it, "--timeout")?, "--timeout")?);
            }
            "--no-sanitize" => sanitize = false,
            "--" => {
                argv = it.cloned().collect();
                break;
            }
            other => return Err(format!("unknown argument `{other}` (target goes after --)")),
        }
    }
    if argv.is_empty() {
        return Err("no target command; usage: refuzz pty [flags] -- CMD [ARGS...]".into());
    }

    let mut input = Vec::new();
    std::io::stdin()
        .read_to_end(&mut input)
        .map_err(|e| format!("reading stdin: {e}"))?;

    let run = PtySession::new(argv)
        .timeout(timeout)
        .sanitize(sanitize)
        .run(&input, &quit);

    let stdout = std::io::stdout();
    let _ = stdout.lock().write_all(&run.output_tail);
    eprintln!(
        "outcome: {} after {:.3}s{}",
        run.outcome,
        run.wall.as_secs_f64(),
        if run.group_clean {
            ""
        } else {
            " (process group not clean)"
        }
    );
    Ok(run.outcome.cli_exit_code() as u8)
}

fn cmd_run(args: &[String]) -> Result<u8, String> {
    let mut config_path: Option<PathBuf> = None;
    let mut input_dir: Option<PathBuf> = None;
    let mut result_dir: Option<PathBuf> = None;
    let mut timeout = Duration::from_secs(300);
    let mut workers = 1usize;
    let mut seed = 0u64;
    let mut recheck: Option<u32> = None;

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "-i" => input_dir = Some(PathBuf::from(take_value(&mut it, "-i")?)),
            "-o" => result_dir = Some(PathBuf::from(take_value(&mut it, "-o")?)),
            "--timeout" => {
                timeout =
                    Duration::from_secs(parse_num(take_value(&mut it, "--timeout")?, "--timeout")?);
            }
            "--workers" => workers = parse_num(take_value(&mut it, "--workers")?, "--workers")?,
            "--seed" => seed = parse_num(take_value(&mut it, "--seed")?, "--seed")?,
            "--recheck-hangs" => {
                recheck = Some(parse_num(
                    take_value(&mut it, "--recheck-hangs")?,
                    "--recheck-hangs",
                )?);
            }
            other => {
                // run.py style attached values: -iDIR, -oDIR.
                if let Some(dir) = other.strip_prefix("-i") {
                    input_dir = Some(PathBuf::from(dir));
                } else if let Some(dir) = other.strip_prefix("-o") {
                    result_dir = Some(PathBuf::from(dir));
                } else if config_path.is_none() && !other.starts_with('-') {
                    config_path = Some(PathBuf::from(other));
                } else {
                    return Err(format!("unknown argument `{other}`"));
                }
            }
        }
    }
    let config_path = config_path.ok_or("config file argument is required")?;
    let input_dir = input_dir.ok_or("-i INPUT_DIR is required")?;
    let result_dir = result_dir.ok_or("-o RESULT_DIR is required")?;

    let config_text = std::fs::read_to_string(&config_path)
        .map_err(|e| format!("{}: {e}", config_path.display()))?;
    let entries = config::parse_config(&config_text).map_err(|e| e.to_string())?;
    if entries.is_empty() {
        return Err("config file has no entries".into());
    }

    let settings = CampaignSettings::new(result_dir.join("scratch"))
        .timeout(timeout)
        .workers(workers)
        .campaign_seed(seed)
        .recheck_hangs(recheck);

    let summary = runner::run_campaign(&entries, &input_dir, &result_dir, &settings)
        .map_err(|e| e.to_string())?;

    for record in &summary.records {
        println!(
            "{}: {}",
            record.file_name().trim_end_matches(".result"),
            record.outcome
        );
    }
    let stats = report::summarize(&summary.records, "campaign");
    println!(
        "{} tests, {} utilities tested, {} failed ({}%), {} setup errors",
        summary.tests_run, stats.tested, stats.failed, stats.rate_percent, summary.setup_errors
    );
    Ok(0)
}

fn cmd_report(args: &[String]) -> Result<u8, String> {
    let mut result_dirs: Vec<PathBuf> = Vec::new();
    let mut annotations_path: Option<PathBuf> = None;
    let mut compare_dir: Option<PathBuf> = None;
    let mut format = TableFormat::Markdown;

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--annotations" => {
                annotations_path = Some(PathBuf::from(take_value(&mut it, "--annotations")?));
            }
            "--compare" => compare_dir = Some(PathBuf::from(take_value(&mut it, "--compare")?)),
            "--format" => {
                let raw = take_value(&mut it, "--format")?;
                format = TableFormat::parse(raw)
                    .ok_or_else(|| format!("unknown format `{raw}` (markdown or tsv)"))?;
            }
            other if !other.starts_with('-') => result_dirs.push(PathBuf::from(other)),
            other => return Err(format!("unknown argument `{other}`")),
        }
    }
    if result_dirs.is_empty() {
        return Err("at least one RESULT_DIR is required".into());
    }

    let label_of = |dir: &Path| {
        dir.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string())
    };

    let mut all_stats = Vec::new();
    let mut all_records = Vec::new();
    for dir in &result_dirs {
        let records = runner::load_records(dir).map_err(|e| e.to_string())?;
        all_stats.push(report::summarize(&records, label_of(dir)));
        all_records.extend(records);
    }

    println!("## Test statistics\n");
    print!("{}", report::render_stats_table(&all_stats, format));
    println!("\n## Per-utility results\n");
    print!("{}", report::render_utilities_table(&all_stats, format));

    if let Some(old_dir) = compare_dir {
        let old_records = runner::load_records(&old_dir).map_err(|e| e.to_string())?;
        let old_stats = report::summarize(&old_records, label_of(&old_dir));
        let current = report::summarize(&all_records, "current");
        let cmp = report::compare_campaigns(&old_stats, &current);
        println!("\n## Comparison with {}\n", old_stats.platform);
        print!(
            "{}",
            report::render_comparison_table(&cmp, &old_stats.platform, "current", format)
        );
    }

    if let Some(path) = annotations_path {
        let text =
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let annotations = report::parse_annotations(&text).map_err(|e| e.to_string())?;
        println!("\n## Failures by cause\n");
        print!("{}", report::render_annotations_table(&annotations, format));
    }
    Ok(0)
}
