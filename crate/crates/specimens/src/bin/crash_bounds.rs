//! spec-crash-bounds: fixed-capacity line buffer with no bound check.
//!
//! Models the classic loop whose termination condition looks at the data
//! instead of the buffer size. Capacity is 256 bytes; any line whose body
//! (terminator excluded) exceeds it "overruns" and the process dies by
//! SIGABRT. A 1000-byte file with no newline is one 1000-byte line and
//! therefore a guaranteed trigger; line-structured input capped at 100
//! bytes per line never triggers.

use std::io::Read;

const LINE_CAPACITY: usize = 256;

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-crash-bounds: {e}");
            std::process::exit(2);
        }
    };

    let mut line_len = 0usize;
    let mut buf = [0u8; 4096];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) => {
                eprintln!("spec-crash-bounds: read: {e}");
                std::process::exit(2);
            }
        };
        for &b in &buf[..n] {
            if b == b'\n' {
                line_len = 0;
            } else {
                line_len += 1;
                if line_len > LINE_CAPACITY {
                    eprintln!("spec-crash-bounds: line buffer overrun");
                    std::process::abort();
                }
            }
        }
    }
    std::process::exit(0);
}
