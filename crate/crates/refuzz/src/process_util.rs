//! Shared child-process control: deadline waits and process-group teardown.
//!
//! The harness registers itself as a child subreaper the first time it runs
//! a test, so descendants orphaned by a dying target reparent to us instead
//! of init and can be reaped per process group. The group audit counts live
//! (non-zombie) members via /proc, which is the question that matters: a
//! zombie cannot run or hold the pty open, it is just a pid awaiting its
//! parent's wait call.

use std::process::Child;
use std::sync::Once;
use std::time::{Duration, Instant};

const POLL_INTERVAL: Duration = Duration::from_millis(5);
pub(crate) const GROUP_AUDIT_GRACE: Duration = Duration::from_millis(500);

static SUBREAPER: Once = Once::new();

/// Adopt orphaned descendants (PR_SET_CHILD_SUBREAPER). Idempotent.
pub(crate) fn ensure_subreaper() {
    SUBREAPER.call_once(|| unsafe {
        libc::prctl(libc::PR_SET_CHILD_SUBREAPER, 1, 0, 0, 0);
    });
}

pub(crate) enum WaitVerdict {
    Exited(std::process::ExitStatus),
    DeadlineHit,
}

/// Poll `child` until it exits or `deadline` passes. Never blocks past the
/// deadline.
pub(crate) fn wait_with_deadline(
    child: &mut Child,
    deadline: Instant,
) -> std::io::Result<WaitVerdict> {
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(WaitVerdict::Exited(status));
        }
        if Instant::now() >= deadline {
            return Ok(WaitVerdict::DeadlineHit);
        }
        std::thread::sleep(POLL_INTERVAL);
    }
}

/// Reap a child that is being abandoned at its deadline: kill its whole
/// process group and wait it out.
pub(crate) fn kill_and_reap(child: &mut Child, pgid: libc::pid_t) {
    unsafe {
        libc::killpg(pgid, libc::SIGKILL);
    }
    // SIGKILL cannot be ignored; wait() returns promptly.
    let _ = child.wait();
}

/// Reap any of our (reparented) children that belong to `pgid`. Safe next
/// to concurrent tests: their children live in different groups.
fn reap_group(pgid: libc::pid_t) {
    loop {
        let mut status = 0;
        let r = unsafe { libc::waitpid(-pgid, &mut status, libc::WNOHANG) };
        if r <= 0 {
            return;
        }
    }
}

/// Count live (non-zombie) processes in `pgid` by scanning /proc.
fn live_group_members(pgid: libc::pid_t) -> usize {
    let Ok(entries) = std::fs::read_dir("/proc") else {
        return 0;
    };
    let mut count = 0;
    for entry in entries.flatten() {
        let name = entry.file_name();
        let Some(pid_str) = name.to_str() else {
            continue;
        };
        if !pid_str.bytes().all(|b| b.is_ascii_digit()) {
            continue;
        }
        let Ok(stat) = std::fs::read_to_string(entry.path().join("stat")) else {
            continue;
        };
        // comm can contain spaces and parentheses; fields resume after the
        // last ')': state, ppid, pgrp, ...
        let Some(rest) = stat.rsplit_once(')').map(|(_, r)| r.trim_start()) else {
            continue;
        };
        let mut fields = rest.split_whitespace();
        let state = fields.next().unwrap_or("");
        let _ppid = fields.next();
        let pgrp = fields.next().and_then(|s| s.parse::<libc::pid_t>().ok());
        if pgrp == Some(pgid) && state != "Z" && state != "X" {
            count += 1;
        }
    }
    count
}

/// Ensure nothing survives in the test's process group: hard-kill, give
/// stragglers a grace period to die and be reaped, and report whether the
/// group ended with zero live members. The spawned child itself must
/// already be reaped by the caller.
pub(crate) fn audit_group(pgid: libc::pid_t) -> bool {
    let deadline = Instant::now() + GROUP_AUDIT_GRACE;
    loop {
        unsafe {
            libc::killpg(pgid, libc::SIGKILL);
        }
        reap_group(pgid);
        if live_group_members(pgid) == 0 {
            return true;
        }
        if Instant::now() >= deadline {
            unsafe {
                libc::killpg(pgid, libc::SIGKILL);
            }
            reap_group(pgid);
            return live_group_members(pgid) == 0;
        }
        std::thread::sleep(Duration::from_millis(10));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::os::unix::process::CommandExt;
    use std::process::{Command, Stdio};

    #[test]
    fn audit_kills_stragglers() {
        ensure_subreaper();
        // A shell that spawns a sleeping grandchild and exits; the
        // grandchild stays in the group until the audit reaps it.
        let mut child = Command::new("sh")
            .args(["-c", "sleep 30 & exit 0"])
            .process_group(0)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let pgid = child.id() as libc::pid_t;
        child.wait().unwrap();
        assert!(audit_group(pgid), "grandchild survived the audit");
        assert_eq!(live_group_members(pgid), 0);
    }

    #[test]
    fn deadline_fires_for_sleeper() {
        ensure_subreaper();
        let mut child = Command::new("sleep")
            .arg("30")
            .process_group(0)
            .spawn()
            .unwrap();
        let pgid = child.id() as libc::pid_t;
        let verdict =
            wait_with_deadline(&mut child, Instant::now() + Duration::from_millis(100)).unwrap();
        assert!(matches!(verdict, WaitVerdict::DeadlineHit));
        kill_and_reap(&mut child, pgid);
        assert!(audit_group(pgid));
    }

    #[test]
    fn quick_exit_before_deadline() {
        let mut child = Command::new("true").process_group(0).spawn().unwrap();
        let verdict =
            wait_with_deadline(&mut child, Instant::now() + Duration::from_secs(5)).unwrap();
        assert!(matches!(verdict, WaitVerdict::Exited(s) if s.success()));
    }
}
