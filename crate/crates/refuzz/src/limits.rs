//! Per-test kernel resource limits.
//!
//! Applied in the child between fork and exec so a runaway target cannot
//! take the harness down with it: CPU time bounds spin loops that ignore the
//! wall-clock timeout, the file-size cap bounds output spam, and core dumps
//! are disabled to keep scratch directories small.

use std::process::Command;

/// Limits applied to a spawned target. `None` leaves the inherited limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    pub cpu_seconds: Option<u64>,
    pub address_space_bytes: Option<u64>,
    pub output_file_bytes: Option<u64>,
}

impl ResourceLimits {
    /// Defaults scaled from the test timeout: CPU at twice the timeout,
    /// output files capped at 1 GiB, address space unlimited.
    pub fn defaults_for(timeout: std::time::Duration) -> Self {
        Self {
            cpu_seconds: Some(timeout.as_secs().saturating_mul(2).max(1)),
            address_space_bytes: None,
            output_file_bytes: Some(1 << 30),
        }
    }

    pub fn none() -> Self {
        Self {
            cpu_seconds: None,
            address_space_bytes: None,
            output_file_bytes: None,
        }
    }

    /// Install a pre-exec hook on `cmd` that applies these limits (and
    /// disables core dumps) in the child.
    pub fn apply_to(self, cmd: &mut Command) {
        use std::os::unix::process::CommandExt;
        unsafe {
            cmd.pre_exec(move || {
                if let Some(secs) = self.cpu_seconds {
                    set_rlimit(libc::RLIMIT_CPU, secs)?;
                }
                if let Some(bytes) = self.address_space_bytes {
                    set_rlimit(libc::RLIMIT_AS, bytes)?;
                }
                if let Some(bytes) = self.output_file_bytes {
                    set_rlimit(libc::RLIMIT_FSIZE, bytes)?;
                }
                set_rlimit(libc::RLIMIT_CORE, 0)?;
                Ok(())
            });
        }
    }
}

fn set_rlimit(resource: libc::__rlimit_resource_t, limit: u64) -> std::io::Result<()> {
    let rlim = libc::rlimit {
        rlim_cur: limit,
        rlim_max: limit,
    };
    // SAFETY: resource is a valid constant and rlim outlives the call.
    if unsafe { libc::setrlimit(resource, &rlim) } != 0 {
        return Err(std::io::Error::last_os_error());
    }
    Ok(())
}
