//! spec-slow-quadratic: per-line work quadratic in line length.
//!
//! Models an algorithm that reprocesses the whole line so far for every
//! byte it consumes. Short lines finish instantly; a single mult
//! megabyte line needs ~len^2/2 steps, which at any realistic timeout is
//! indistinguishable from a hang even though the program would eventually
//! finish.

use std::hint::black_box;
use std::io::Read;

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-slow-quadratic: {e}");
            std::process::exit(2);
        }
    };

    let mut acc = 0u64;
    let mut line_len = 0u64;
    let mut buf = [0u8; 4096];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) => {
                eprintln!("spec-slow-quadratic: read: {e}");
                std::process::exit(2);
            }
        };
        for &b in &buf[..n] {
            if b == b'\n' {
                line_len = 0;
                continue;
            }
            line_len += 1;
            // Rescan "the line so far" for this byte.
            for i in 0..line_len {
                acc = black_box(acc.wrapping_add(i ^ u64::from(b)));
            }
        }
    }
    println!("{acc:x}");
    std::process::exit(0);
}
