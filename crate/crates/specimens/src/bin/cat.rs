//! spec-cat: the well-behaved control. Copies its input to stdout and
//! exits 0 whatever the input contains.

use std::io::{Read, Write};

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-cat: {e}");
            std::process::exit(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut buf = [0u8; 8192];
    loop {
        match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => {
                if out.write_all(&buf[..n]).is_err() {
                    break;
                }
            }
            Err(e) => {
                eprintln!("spec-cat: read: {e}");
                std::process::exit(2);
            }
        }
    }
    std::process::exit(0);
}
