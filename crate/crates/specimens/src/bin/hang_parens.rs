//! spec-hang-parens: delimiter-balance loop that never terminates.
//!
//! Models a parser whose loop exit requires the running count of right
//! parentheses to catch up with the left ones. When input ends with more
//! `(` than `)`, that condition is unsatisfiable and the scan spins
//! forever. Balanced or right-heavy input exits 0.

use std::io::Read;

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-hang-parens: {e}");
            std::process::exit(2);
        }
    };

    let mut left = 0u64;
    let mut right = 0u64;
    let mut buf = [0u8; 4096];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) => {
                eprintln!("spec-hang-parens: read: {e}");
                std::process::exit(2);
            }
        };
        for &b in &buf[..n] {
            match b {
                b'(' => left += 1,
                b')' => right += 1,
                _ => {}
            }
        }
    }
    if left > right {
        // Waiting for closing parentheses that will never come.
        refuzz_specimens::hang_forever();
    }
    std::process::exit(0);
}
