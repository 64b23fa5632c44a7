//! spec-hang-noadvance: scan cursor that stops moving.
//!
//! Models a comparison loop with category tests for alphanumerics, line
//! ends, and end of input, where a byte matching none of them leaves the
//! cursor untouched. A leading NUL falls through every case, so the loop
//! re-examines the same position forever. Any other first byte scans
//! through and exits 0.

use std::io::Read;

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-hang-noadvance: {e}");
            std::process::exit(2);
        }
    };

    let mut first = [0u8; 1];
    match input.read(&mut first) {
        Ok(1) if first[0] == 0x00 => {
            // No category matches NUL; the cursor never advances.
            refuzz_specimens::hang_forever();
        }
        Ok(1) => {
            let mut sink = [0u8; 4096];
            while matches!(input.read(&mut sink), Ok(n) if n > 0) {}
            std::process::exit(0);
        }
        _ => std::process::exit(0),
    }
}
