//! Defect-specimen targets for harness validation.
//!
//! Each `spec-*` binary is a tiny program with one planted defect and a
//! precisely documented input trigger, modeled on failure classes seen in
//! real utilities: unbounded line buffers, unchecked error returns,
//! non-advancing scan loops, unbalanced-delimiter loops, quadratic
//! per-line work, and an interactive editor that only exits on its quit
//! sequence.
//!
//! Every specimen's behavior is a pure function of its input bytes: no
//! randomness, environment, or time dependence. Memory-unsafety outcomes
//! are simulated with a deliberate abort so the suite stays deterministic
//! and safe while still dying by signal, which is all the harness observes.
//!
//! All specimens read standard input, or the file named by the last
//! non-flag argument; option-like arguments are accepted and ignored so
//! they can sit in a campaign's option pool.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::PathBuf;
use std::sync::Mutex;

/// Outcome class a triggering input must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedOutcome {
    Pass,
    Crash,
    Hang,
}

/// Catalog entry describing one specimen.
#[derive(Debug, Clone)]
pub struct SpecimenSpec {
    /// Binary name (`spec-*`).
    pub name: &'static str,
    /// Failure-cause category the defect models.
    pub category: &'static str,
    /// Exact input condition that triggers the defect.
    pub trigger: &'static str,
    /// Outcome on a triggering input.
    pub expected: ExpectedOutcome,
    /// Input modes the binary supports.
    pub input_modes: &'static [&'static str],
}

pub fn catalog() -> Vec<SpecimenSpec> {
    vec![
        SpecimenSpec {
            name: "spec-crash-bounds",
            category: "PointersAndArrays",
            trigger: "any line longer than 256 bytes (terminator excluded)",
            expected: ExpectedOutcome::Crash,
            input_modes: &["stdin", "file"],
        },
        SpecimenSpec {
            name: "spec-crash-retval",
            category: "ReturnValues",
            trigger: "first input byte is an unmatched single quote (0x27)",
            expected: ExpectedOutcome::Crash,
            input_modes: &["stdin", "file"],
        },
        SpecimenSpec {
            name: "spec-hang-parens",
            category: "PointersAndArrays",
            trigger: "more left than right parentheses at end of input",
            expected: ExpectedOutcome::Hang,
            input_modes: &["stdin", "file"],
        },
        SpecimenSpec {
            name: "spec-hang-noadvance",
            category: "ComplexState",
            trigger: "leading NUL byte (0x00)",
            expected: ExpectedOutcome::Hang,
            input_modes: &["stdin", "file"],
        },
        SpecimenSpec {
            name: "spec-slow-quadratic",
            category: "ComplexState",
            trigger: "a single line long enough that O(len^2) work outlasts any timeout",
            expected: ExpectedOutcome::Hang,
            input_modes: &["stdin", "file"],
        },
        SpecimenSpec {
            name: "spec-editor",
            category: "Other",
            trigger: "absence of the quit sequence ESC : q !",
            expected: ExpectedOutcome::Hang,
            input_modes: &["stdin", "file", "pty"],
        },
        SpecimenSpec {
            name: "spec-cat",
            category: "Other",
            trigger: "none; copies input and exits 0",
            expected: ExpectedOutcome::Pass,
            input_modes: &["stdin", "file"],
        },
    ]
}

/// Resolve the specimens' shared argument convention: flags (`-x`, `--x`)
/// are ignored, the last non-flag argument names the input file, and with
/// no such argument the input is standard input.
pub fn input_stream() -> std::io::Result<Box<dyn Read>> {
    let path = std::env::args().skip(1).filter(|a| !a.starts_with('-')).last();
    match path {
        Some(path) => Ok(Box::new(BufReader::new(File::open(path)?))),
        None => Ok(Box::new(BufReader::new(std::io::stdin()))),
    }
}

/// Park forever: the observable behavior of a scan loop that stopped
/// making progress.
pub fn hang_forever() -> ! {
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}

static BUILD_ONCE: Mutex<bool> = Mutex::new(false);

/// Locate a specimen executable for use by other crates' tests.
///
/// Honors `REFUZZ_SPECIMEN_DIR` when set; otherwise resolves the workspace
/// target directory and builds the specimen binaries on first use if they
/// are not there yet (they already are under `cargo test --workspace`).
pub fn bin_path(name: &str) -> PathBuf {
    if let Some(dir) = std::env::var_os("REFUZZ_SPECIMEN_DIR") {
        return PathBuf::from(dir).join(name);
    }
    let target_dir = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("target"));
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    let path = target_dir.join(profile).join(name);
    if !path.is_file() {
        build_specimen_bins();
    }
    path
}

fn workspace_root() -> PathBuf {
    // crates/specimens -> workspace root
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(std::path::Path::parent)
        .expect("specimens crate lives two levels under the workspace root")
        .to_path_buf()
}

fn build_specimen_bins() {
    let mut built = BUILD_ONCE.lock().unwrap();
    if *built {
        return;
    }
    let mut cmd = std::process::Command::new(std::env::var_os("CARGO").unwrap_or("cargo".into()));
    cmd.args(["build", "-p", "refuzz-specimens", "--bins"])
        .current_dir(workspace_root());
    if !cfg!(debug_assertions) {
        cmd.arg("--release");
    }
    let status = cmd.status().expect("failed to invoke cargo to build specimens");
    assert!(status.success(), "building specimen binaries failed");
    *built = true;
}
