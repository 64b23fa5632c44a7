//! spec-editor: interactive vi-style target.
//!
//! Echoes every byte it reads. The only way it ever exits is receiving the
//! quit sequence ESC `:` `q` `!` in order, upon which it exits 0. Without
//! that sequence it keeps waiting for input indefinitely, including after
//! end of input, which is exactly how a terminal editor behaves on a pty.
//!
//! When standard input is a terminal the program switches it to
//! non-canonical, no-echo mode the way a real editor does, so bytes arrive
//! without line buffering and the harness sees the program's own echo.

use std::io::{Read, Write};

const QUIT: [u8; 4] = [0x1B, b':', b'q', b'!'];

fn set_raw_mode(fd: i32) {
    unsafe {
        let mut t: libc::termios = std::mem::zeroed();
        if libc::tcgetattr(fd, &mut t) != 0 {
            return;
        }
        t.c_lflag &= !(libc::ICANON | libc::ECHO);
        t.c_cc[libc::VMIN] = 1;
        t.c_cc[libc::VTIME] = 0;
        libc::tcsetattr(fd, libc::TCSANOW, &t);
    }
}

fn main() {
    let on_tty = unsafe { libc::isatty(libc::STDIN_FILENO) } == 1;
    if on_tty {
        set_raw_mode(libc::STDIN_FILENO);
    }

    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-editor: {e}");
            std::process::exit(2);
        }
    };
    let stdout = std::io::stdout();
    let mut matched = 0usize;
    let mut buf = [0u8; 512];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => {
                // End of input without a quit command: keep waiting, the
                // way an editor sits at its prompt.
                refuzz_specimens::hang_forever();
            }
            Ok(n) => n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(_) => refuzz_specimens::hang_forever(),
        };
        let mut out = stdout.lock();
        let _ = out.write_all(&buf[..n]);
        let _ = out.flush();
        drop(out);
        for &b in &buf[..n] {
            if b == QUIT[matched] {
                matched += 1;
                if matched == QUIT.len() {
                    std::process::exit(0);
                }
            } else {
                matched = usize::from(b == QUIT[0]);
            }
        }
    }
}
