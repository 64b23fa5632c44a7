//! Property tests for the stream generator and pty input sanitizer.

use proptest::prelude::*;

use refuzz::generator::{generate_stream, CharsetBase, GenSpec};
use refuzz::pty::{sanitize_for_pty, QuitSequence, DEFAULT_STRIP_SET};

fn collect(spec: &GenSpec) -> Vec<u8> {
    let mut out = Vec::new();
    generate_stream(spec, &mut out).unwrap();
    out
}

fn arb_spec() -> impl Strategy<Value = GenSpec> {
    (
        1u64..500,
        prop::bool::ANY,
        prop::bool::ANY,
        prop::option::of(1u32..120),
        any::<u64>(),
        prop::option::of(1u64..1000),
    )
        .prop_map(
            |(length, printable, include_nul, line_mode_max, seed, seed_modulus)| GenSpec {
                length,
                charset_base: if printable {
                    CharsetBase::Printable
                } else {
                    CharsetBase::All8Bit
                },
                include_nul,
                line_mode_max,
                seed,
                seed_modulus,
                inter_byte_delay: None,
            },
        )
}

proptest! {
    #[test]
    fn streams_are_deterministic(spec in arb_spec()) {
        prop_assert_eq!(collect(&spec), collect(&spec));
    }

    #[test]
    fn charset_closure_holds(spec in arb_spec()) {
        let charset = spec.charset();
        let out = collect(&spec);
        for &b in &out {
            if spec.line_mode_max.is_some() && b == b'\n' {
                continue; // line terminator
            }
            prop_assert!(
                charset.contains(&b),
                "byte {b:#04x} outside charset for {spec:?}"
            );
        }
    }

    #[test]
    fn line_structure_holds(spec in arb_spec()) {
        prop_assume!(spec.line_mode_max.is_some());
        let max = spec.line_mode_max.unwrap() as usize;
        let out = collect(&spec);
        prop_assert_eq!(*out.last().unwrap(), b'\n');
        let lines: Vec<&[u8]> = out.split(|&b| b == b'\n').collect();
        // split produces one trailing empty slice after the final terminator
        prop_assert_eq!(lines.len() as u64 - 1, spec.length);
        for body in &lines[..lines.len() - 1] {
            prop_assert!(body.len() <= max);
        }
    }

    #[test]
    fn modulus_is_seed_reduction(seed in any::<u64>(), modulus in 1u64..10_000) {
        let with = GenSpec { seed, seed_modulus: Some(modulus), ..GenSpec::new(64, 0) };
        let without = GenSpec::new(64, seed % modulus);
        prop_assert_eq!(collect(&with), collect(&without));
    }

    #[test]
    fn sanitize_strips_and_preserves_order(input in prop::collection::vec(any::<u8>(), 0..2000)) {
        let out = sanitize_for_pty(&input);
        for b in DEFAULT_STRIP_SET {
            prop_assert!(!out.contains(&b));
        }
        // order-preserving subsequence of the input
        let mut it = input.iter();
        for b in &out {
            prop_assert!(it.any(|x| x == b), "output byte not found in order");
        }
        // nothing else removed
        let kept = input.iter().filter(|b| !DEFAULT_STRIP_SET.contains(b)).count();
        prop_assert_eq!(out.len(), kept);
    }

    #[test]
    fn quit_sequence_encode_parse_round_trip(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let quit = QuitSequence::from_bytes(bytes.clone());
        let reparsed = QuitSequence::parse(&quit.encode()).unwrap();
        prop_assert_eq!(reparsed.as_bytes(), &bytes[..]);
    }
}
