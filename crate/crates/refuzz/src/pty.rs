//! Pseudo-terminal driver for interactive targets.
//!
//! Runs a target attached to a fresh pty, feeds it bytes followed by a quit
//! sequence, and reports how it ended. The replica side becomes the child's
//! controlling terminal and the child leads its own session, so a timeout
//! kill reaps the target and all its descendants.
//!
//! Input and output are pumped concurrently: the reader never waits on the
//! writer, which is what prevents the harness and target from deadlocking on
//! a full pty buffer when the target stops reading or writes a lot.

use std::os::fd::{AsRawFd, FromRawFd, OwnedFd};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::limits::ResourceLimits;
use crate::outcome::TestOutcome;
use crate::process_util::{audit_group, wait_with_deadline, WaitVerdict};
use crate::tail::TailBuffer;

/// Bytes the default sanitize pass removes: the line-discipline characters a
/// terminal turns into signals or EOF (INTR ^C, QUIT ^\, SUSP ^Z, EOF ^D).
/// Any of these in random input would kill or starve the target before it
/// ever misbehaved on its own.
pub const DEFAULT_STRIP_SET: [u8; 4] = [0x03, 0x1C, 0x1A, 0x04];

/// Remove the default control bytes from `input`, preserving everything
/// else in order.
pub fn sanitize_for_pty(input: &[u8]) -> Vec<u8> {
    sanitize_with(input, &DEFAULT_STRIP_SET)
}

/// Remove every occurrence of the bytes in `strip` from `input`.
pub fn sanitize_with(input: &[u8], strip: &[u8]) -> Vec<u8> {
    input
        .iter()
        .copied()
        .filter(|b| !strip.contains(b))
        .collect()
}

/// Byte sequence appended after the input so an interactive target quits on
/// its own instead of waiting forever for more input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuitSequence {
    bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuitSequenceError {
    #[error("invalid escape `\\{0}` (expected \\n, \\r, \\e, \\\\ or \\xNN)")]
    BadEscape(char),
    #[error("truncated escape at end of sequence")]
    Truncated,
    #[error("invalid hex digits in \\x escape")]
    BadHex,
}

impl QuitSequence {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bytes(bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            bytes: bytes.into(),
        }
    }

    /// Decode the escape syntax: `\n`, `\r`, `\e` (ESC), `\\`, and `\xNN`.
    /// All other characters stand for themselves.
    pub fn parse(text: &str) -> Result<Self, QuitSequenceError> {
        let mut bytes = Vec::with_capacity(text.len());
        let mut chars = text.chars();
        while let Some(c) = chars.next() {
            if c != '\\' {
                let mut buf = [0u8; 4];
                bytes.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
                continue;
            }
            match chars.next() {
                Some('n') => bytes.push(b'\n'),
                Some('r') => bytes.push(b'\r'),
                Some('e') => bytes.push(0x1B),
                Some('\\') => bytes.push(b'\\'),
                Some('x') => {
                    let hi = chars.next().ok_or(QuitSequenceError::Truncated)?;
                    let lo = chars.next().ok_or(QuitSequenceError::Truncated)?;
                    let hex = [hi, lo].iter().collect::<String>();
                    let byte =
                        u8::from_str_radix(&hex, 16).map_err(|_| QuitSequenceError::BadHex)?;
                    bytes.push(byte);
                }
                Some(other) => return Err(QuitSequenceError::BadEscape(other)),
                None => return Err(QuitSequenceError::Truncated),
            }
        }
        Ok(Self { bytes })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Re-encode into the escape syntax accepted by [`QuitSequence::parse`].
    pub fn encode(&self) -> String {
        let mut out = String::new();
        for &b in &self.bytes {
            match b {
                b'\n' => out.push_str("\\n"),
                b'\r' => out.push_str("\\r"),
                0x1B => out.push_str("\\e"),
                b'\\' => out.push_str("\\\\"),
                0x20..=0x7E => out.push(b as char),
                _ => out.push_str(&format!("\\x{b:02x}")),
            }
        }
        out
    }
}

/// Result of one pty-driven execution.
#[derive(Debug)]
pub struct PtyRun {
    pub outcome: TestOutcome,
    /// Tail of everything the target wrote to the terminal (echo included).
    pub output_tail: Vec<u8>,
    pub wall: Duration,
    /// Whether the process-group audit found the group empty afterwards.
    pub group_clean: bool,
}

/// Configuration for running one target under a fresh pty.
#[derive(Debug, Clone)]
pub struct PtySession {
    argv: Vec<String>,
    rows: u16,
    cols: u16,
    timeout: Duration,
    sanitize: bool,
    strip_set: Vec<u8>,
    limits: ResourceLimits,
    cwd: Option<PathBuf>,
    tail_capacity: usize,
}

impl PtySession {
    pub fn new<I, S>(argv: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            argv: argv.into_iter().map(Into::into).collect(),
            rows: 24,
            cols: 80,
            timeout: Duration::from_secs(300),
            sanitize: true,
            strip_set: DEFAULT_STRIP_SET.to_vec(),
            limits: ResourceLimits::none(),
            cwd: None,
            tail_capacity: 64 * 1024,
        }
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn window(mut self, rows: u16, cols: u16) -> Self {
        self.rows = rows;
        self.cols = cols;
        self
    }

    pub fn sanitize(mut self, on: bool) -> Self {
        self.sanitize = on;
        self
    }

    pub fn strip_set(mut self, set: impl Into<Vec<u8>>) -> Self {
        self.strip_set = set.into();
        self
    }

    pub fn resource_limits(mut self, limits: ResourceLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn current_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cwd = Some(dir.into());
        self
    }

    /// Run the target, feeding `input` (sanitized unless disabled) followed
    /// by the quit sequence. Setup problems surface as a
    /// [`TestOutcome::SetupError`], never as a target failure.
    pub fn run(&self, input: &[u8], quit: &QuitSequence) -> PtyRun {
        let start = Instant::now();
        match self.run_inner(input, quit, start) {
            Ok(run) => run,
            Err(message) => PtyRun {
                outcome: TestOutcome::setup_error(message),
                output_tail: Vec::new(),
                wall: start.elapsed(),
                group_clean: true,
            },
        }
    }

    fn run_inner(
        &self,
        input: &[u8],
        quit: &QuitSequence,
        start: Instant,
    ) -> Result<PtyRun, String> {
        if self.argv.is_empty() {
            return Err("empty argv".into());
        }
        crate::process_util::ensure_subreaper();

        let (master, replica) = open_pty_pair(self.rows, self.cols)
            .map_err(|e| format!("pty allocation failed: {e}"))?;

        let mut feed = if self.sanitize {
            sanitize_with(input, &self.strip_set)
        } else {
            input.to_vec()
        };
        feed.extend_from_slice(quit.as_bytes());

        let mut cmd = Command::new(&self.argv[0]);
        cmd.args(&self.argv[1..]);
        if let Some(dir) = &self.cwd {
            cmd.current_dir(dir);
        }
        let stdin = replica.try_clone().map_err(|e| e.to_string())?;
        let stdout = replica.try_clone().map_err(|e| e.to_string())?;
        cmd.stdin(Stdio::from(stdin))
            .stdout(Stdio::from(stdout))
            .stderr(Stdio::from(replica));
        self.limits.apply_to(&mut cmd);
        unsafe {
            use std::os::unix::process::CommandExt;
            // After std wires the replica onto fds 0..2: become a session
            // (and process-group) leader, then adopt the replica as the
            // controlling terminal.
            cmd.pre_exec(|| {
                if libc::setsid() == -1 {
                    return Err(std::io::Error::last_os_error());
                }
                if libc::ioctl(0, libc::TIOCSCTTY, 0) == -1 {
                    return Err(std::io::Error::last_os_error());
                }
                Ok(())
            });
        }

        let mut child = cmd.spawn().map_err(|e| format!("spawn failed: {e}"))?;
        // The Command object still holds replica fds; drop it so the only
        // replica handles left are the child's. Otherwise the master never
        // reports hangup after the child dies.
        drop(cmd);
        let pgid = child.id() as libc::pid_t;

        let stop = Arc::new(AtomicBool::new(false));
        let pump_fd = master
            .try_clone()
            .map_err(|e| format!("dup of pty master failed: {e}"))?;
        let pump_stop = Arc::clone(&stop);
        let tail_capacity = self.tail_capacity;
        let pump = std::thread::spawn(move || pump_pty(pump_fd, feed, tail_capacity, pump_stop));

        let deadline = start + self.timeout;
        let outcome = match wait_with_deadline(&mut child, deadline) {
            Ok(WaitVerdict::Exited(status)) => TestOutcome::from_exit_status(status),
            Ok(WaitVerdict::DeadlineHit) => {
                crate::process_util::kill_and_reap(&mut child, pgid);
                TestOutcome::hang(self.timeout)
            }
            Err(e) => {
                crate::process_util::kill_and_reap(&mut child, pgid);
                TestOutcome::setup_error(format!("wait failed: {e}"))
            }
        };
        let wall = start.elapsed();

        let group_clean = audit_group(pgid);
        stop.store(true, Ordering::Relaxed);
        let output_tail = pump.join().unwrap_or_default();
        drop(master);

        Ok(PtyRun {
            outcome,
            output_tail,
            wall,
            group_clean,
        })
    }
}

/// Run `argv` under a fresh pty with default geometry and sanitizing.
pub fn run_under_pty(
    argv: &[String],
    input: &[u8],
    quit: &QuitSequence,
    timeout: Duration,
) -> PtyRun {
    PtySession::new(argv.iter().cloned())
        .timeout(timeout)
        .run(input, quit)
}

fn open_pty_pair(rows: u16, cols: u16) -> std::io::Result<(OwnedFd, OwnedFd)> {
    unsafe {
        let master = libc::posix_openpt(libc::O_RDWR | libc::O_NOCTTY);
        if master == -1 {
            return Err(std::io::Error::last_os_error());
        }
        let master = OwnedFd::from_raw_fd(master);
        if libc::grantpt(master.as_raw_fd()) == -1 {
            return Err(std::io::Error::last_os_error());
        }
        if libc::unlockpt(master.as_raw_fd()) == -1 {
            return Err(std::io::Error::last_os_error());
        }
        let mut name = [0 as libc::c_char; 128];
        if libc::ptsname_r(master.as_raw_fd(), name.as_mut_ptr(), name.len()) != 0 {
            return Err(std::io::Error::last_os_error());
        }
        let replica = libc::open(name.as_ptr(), libc::O_RDWR | libc::O_NOCTTY);
        if replica == -1 {
            return Err(std::io::Error::last_os_error());
        }
        let replica = OwnedFd::from_raw_fd(replica);

        let size = libc::winsize {
            ws_row: rows,
            ws_col: cols,
            ws_xpixel: 0,
            ws_ypixel: 0,
        };
        if libc::ioctl(master.as_raw_fd(), libc::TIOCSWINSZ, &size) == -1 {
            return Err(std::io::Error::last_os_error());
        }
        Ok((master, replica))
    }
}

const WRITE_CHUNK: usize = 1024;
const PUMP_POLL_MS: libc::c_int = 50;

/// Single-threaded full-duplex pump over the (non-blocking) pty master:
/// pushes `feed` in 1 KiB chunks while draining target output into a
/// bounded tail. Exits when the far side hangs up or `stop` is set, so a
/// stuck target can never wedge the harness.
fn pump_pty(fd: OwnedFd, feed: Vec<u8>, tail_capacity: usize, stop: Arc<AtomicBool>) -> Vec<u8> {
    set_nonblocking(&fd);
    let raw = fd.as_raw_fd();
    let mut tail = TailBuffer::new(tail_capacity);
    let mut cursor = 0usize;
    let mut hangup = false;

    loop {
        if stop.load(Ordering::Relaxed) {
            // Child reaped; anything left is already buffered in the pty.
            drain_available(raw, &mut tail);
            break;
        }
        let mut events = libc::POLLIN;
        if cursor < feed.len() && !hangup {
            events |= libc::POLLOUT;
        }
        let mut pfd = libc::pollfd {
            fd: raw,
            events,
            revents: 0,
        };
        let n = unsafe { libc::poll(&mut pfd, 1, PUMP_POLL_MS) };
        if n == -1 {
            let err = std::io::Error::last_os_error();
            if err.kind() == std::io::ErrorKind::Interrupted {
                continue;
            }
            break;
        }
        if pfd.revents & libc::POLLIN != 0 {
            if !drain_available(raw, &mut tail) {
                hangup = true;
            }
        }
        if pfd.revents & libc::POLLOUT != 0 && cursor < feed.len() {
            let end = (cursor + WRITE_CHUNK).min(feed.len());
            let wrote = unsafe {
                libc::write(
                    raw,
                    feed[cursor..end].as_ptr().cast(),
                    end - cursor,
                )
            };
            if wrote > 0 {
                cursor += wrote as usize;
            } else if wrote == -1 {
                let err = std::io::Error::last_os_error();
                match err.raw_os_error() {
                    Some(libc::EAGAIN) | Some(libc::EINTR) => {}
                    // Replica gone: nobody will read the rest.
                    _ => cursor = feed.len(),
                }
            }
        }
        if pfd.revents & (libc::POLLERR | libc::POLLHUP) != 0 {
            drain_available(raw, &mut tail);
            hangup = true;
        }
        if hangup {
            // No replica left but the group may linger; poll would return
            // POLLHUP immediately, so pace the loop while waiting for the
            // reaper to flag stop.
            std::thread::sleep(Duration::from_millis(5));
        }
    }
    tail.into_bytes()
}

/// Read everything currently available. Returns false once the replica side
/// is gone (EOF or EIO).
fn drain_available(fd: libc::c_int, tail: &mut TailBuffer) -> bool {
    let mut buf = [0u8; 4096];
    loop {
        let n = unsafe { libc::read(fd, buf.as_mut_ptr().cast(), buf.len()) };
        if n > 0 {
            tail.push(&buf[..n as usize]);
            continue;
        }
        if n == 0 {
            return false;
        }
        let err = std::io::Error::last_os_error();
        return match err.raw_os_error() {
            Some(libc::EAGAIN) => true,
            Some(libc::EINTR) => continue,
            _ => false, // EIO: no replica left
        };
    }
}

fn set_nonblocking(fd: &OwnedFd) {
    unsafe {
        let flags = libc::fcntl(fd.as_raw_fd(), libc::F_GETFL);
        libc::fcntl(fd.as_raw_fd(), libc::F_SETFL, flags | libc::O_NONBLOCK);
    }
}
