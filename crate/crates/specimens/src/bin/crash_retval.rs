//! spec-crash-retval: error return left unchecked.
//!
//! Models a tokenizer that reports an unmatched quote through its return
//! value while leaving its output parameters uninitialized, and a caller
//! that dereferences them anyway. Trigger: first input byte is `'` (0x27).
//! Everything else is consumed quietly and the process exits 0.

use std::io::Read;

/// "Tokenize" the leading byte. Returns nonzero on an unmatched quote, in
/// which case `tokens` is left unset.
fn tok_line(first: u8, tokens: &mut Option<usize>) -> i32 {
    if first == b'\'' {
        return 1;
    }
    *tokens = Some(1);
    0
}

fn main() {
    let mut input = match refuzz_specimens::input_stream() {
        Ok(stream) => stream,
        Err(e) => {
            eprintln!("spec-crash-retval: {e}");
            std::process::exit(2);
        }
    };

    let mut first = [0u8; 1];
    let had_first = matches!(input.read(&mut first), Ok(1));
    if had_first {
        let mut tokens: Option<usize> = None;
        // The return value goes unchecked, exactly the planted defect.
        let _ = tok_line(first[0], &mut tokens);
        match tokens {
            Some(_) => {}
            None => {
                // The caller "dereferences" the never-initialized result.
                eprintln!("spec-crash-retval: using uninitialized token list");
                std::process::abort();
            }
        }
        let mut sink = [0u8; 4096];
        while matches!(input.read(&mut sink), Ok(n) if n > 0) {}
    }
    std::process::exit(0);
}
