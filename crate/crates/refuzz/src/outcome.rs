//! Classification of one target execution.

use std::fmt;
use std::process::ExitStatus;
use std::time::Duration;

/// How a test ended.
///
/// Crash means signal termination; any normal exit is a pass regardless of
/// code, because an error exit is a correct rejection of garbage input. A
/// target still alive at the timeout is a hang, flagged unverified since a
/// program legitimately waiting for more input looks the same from outside.
/// Setup errors are harness problems and never count against the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestOutcome {
    Pass {
        exit_code: i32,
    },
    Crash {
        signal: i32,
        core_dumped: bool,
    },
    Hang {
        timeout: Duration,
        verified: bool,
    },
    SetupError {
        message: String,
    },
}

/// Outcome class without payload, for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutcomeKind {
    Pass,
    Hang,
    Crash,
    SetupError,
}

impl TestOutcome {
    pub fn from_exit_status(status: ExitStatus) -> Self {
        use std::os::unix::process::ExitStatusExt;
        match status.code() {
            Some(code) => TestOutcome::Pass { exit_code: code },
            None => TestOutcome::Crash {
                signal: status.signal().unwrap_or(0),
                core_dumped: status.core_dumped(),
            },
        }
    }

    pub fn hang(timeout: Duration) -> Self {
        TestOutcome::Hang {
            timeout,
            verified: false,
        }
    }

    pub fn setup_error(message: impl Into<String>) -> Self {
        TestOutcome::SetupError {
            message: message.into(),
        }
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            TestOutcome::Pass { .. } => OutcomeKind::Pass,
            TestOutcome::Crash { .. } => OutcomeKind::Crash,
            TestOutcome::Hang { .. } => OutcomeKind::Hang,
            TestOutcome::SetupError { .. } => OutcomeKind::SetupError,
        }
    }

    /// The failure bar: crash or hang.
    pub fn is_failure(&self) -> bool {
        matches!(self, TestOutcome::Crash { .. } | TestOutcome::Hang { .. })
    }

    /// Process exit status for the pty CLI: 0 pass, 10 crash, 11 hang,
    /// 12 setup error.
    pub fn cli_exit_code(&self) -> i32 {
        match self {
            TestOutcome::Pass { .. } => 0,
            TestOutcome::Crash { .. } => 10,
            TestOutcome::Hang { .. } => 11,
            TestOutcome::SetupError { .. } => 12,
        }
    }
}

impl fmt::Display for TestOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestOutcome::Pass { exit_code } => write!(f, "pass(exit {exit_code})"),
            TestOutcome::Crash {
                signal,
                core_dumped,
            } => {
                write!(f, "crash({}", signal_name(*signal))?;
                if *core_dumped {
                    write!(f, ", core dumped")?;
                }
                write!(f, ")")
            }
            TestOutcome::Hang { timeout, verified } => write!(
                f,
                "hang({}s, {})",
                timeout.as_secs_f64(),
                if *verified { "verified" } else { "unverified" }
            ),
            TestOutcome::SetupError { message } => write!(f, "setup_error({message})"),
        }
    }
}

/// Human name for the common failure signals, number otherwise.
pub fn signal_name(signal: i32) -> String {
    let name = match signal {
        libc::SIGHUP => "SIGHUP",
        libc::SIGINT => "SIGINT",
        libc::SIGQUIT => "SIGQUIT",
        libc::SIGILL => "SIGILL",
        libc::SIGABRT => "SIGABRT",
        libc::SIGBUS => "SIGBUS",
        libc::SIGFPE => "SIGFPE",
        libc::SIGKILL => "SIGKILL",
        libc::SIGSEGV => "SIGSEGV",
        libc::SIGPIPE => "SIGPIPE",
        libc::SIGTERM => "SIGTERM",
        libc::SIGXCPU => "SIGXCPU",
        libc::SIGXFSZ => "SIGXFSZ",
        _ => return format!("signal {signal}"),
    };
    name.to_string()
}
