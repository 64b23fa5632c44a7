//! Constrained-random byte-stream generation.
//!
//! A [`GenSpec`] fully determines one output stream: the same spec always
//! produces the same bytes. Byte mode emits exactly `length` bytes drawn
//! uniformly from the active character set; line mode emits exactly `length`
//! newline-terminated lines whose body lengths are uniform on
//! `0..=line_mode_max`.

use std::io::Write;
use std::time::Duration;

use crate::rng::SplitMix64;

/// Base character set before NUL adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharsetBase {
    /// Printable ASCII, bytes 0x20..=0x7E (95 values).
    Printable,
    /// The full 8-bit range minus NUL, bytes 0x01..=0xFF (255 values).
    All8Bit,
}

/// Full parameterization of one random stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    /// Bytes in byte mode, newline-terminated lines in line mode.
    pub length: u64,
    pub charset_base: CharsetBase,
    /// Add 0x00 to the base set.
    pub include_nul: bool,
    /// Maximum line body length, excluding the terminator. `Some` switches
    /// the stream to line mode.
    pub line_mode_max: Option<u32>,
    pub seed: u64,
    /// When present, the stream runs from `seed % seed_modulus`.
    pub seed_modulus: Option<u64>,
    /// Sleep inserted between consecutive byte writes.
    pub inter_byte_delay: Option<Duration>,
}

impl GenSpec {
    /// A byte-mode spec over the full 8-bit set (the CLI defaults).
    pub fn new(length: u64, seed: u64) -> Self {
        Self {
            length,
            charset_base: CharsetBase::All8Bit,
            include_nul: false,
            line_mode_max: None,
            seed,
            seed_modulus: None,
            inter_byte_delay: None,
        }
    }

    pub fn printable(mut self) -> Self {
        self.charset_base = CharsetBase::Printable;
        self
    }

    pub fn with_nul(mut self) -> Self {
        self.include_nul = true;
        self
    }

    pub fn lines(mut self, max_body: u32) -> Self {
        self.line_mode_max = Some(max_body);
        self
    }

    pub fn validate(&self) -> Result<(), GenCliError> {
        if self.length == 0 {
            return Err(GenCliError::ZeroLength);
        }
        if self.line_mode_max == Some(0) {
            return Err(GenCliError::ZeroLineMax);
        }
        if self.seed_modulus == Some(0) {
            return Err(GenCliError::ZeroModulus);
        }
        Ok(())
    }

    /// Seed actually driving the stream: `seed % seed_modulus` when a
    /// modulus is set.
    pub fn effective_seed(&self) -> u64 {
        match self.seed_modulus {
            Some(m) => self.seed % m,
            None => self.seed,
        }
    }

    /// The active character set in ascending byte order.
    pub fn charset(&self) -> Vec<u8> {
        let mut set = Vec::with_capacity(256);
        if self.include_nul {
            set.push(0x00);
        }
        match self.charset_base {
            CharsetBase::Printable => set.extend(0x20..=0x7Eu8),
            CharsetBase::All8Bit => set.extend(0x01..=0xFFu8),
        }
        set
    }

    /// Render back to the CLI argument form accepted by [`parse_gen_cli`].
    pub fn to_cli_args(&self) -> Vec<String> {
        let mut args = vec![self.length.to_string()];
        match self.charset_base {
            CharsetBase::Printable => args.push("-p".into()),
            CharsetBase::All8Bit => args.push("-a".into()),
        }
        if self.include_nul {
            args.push("-0".into());
        }
        if let Some(max) = self.line_mode_max {
            args.push("-l".into());
            args.push(max.to_string());
        }
        args.push("-s".into());
        args.push(self.seed.to_string());
        if let Some(m) = self.seed_modulus {
            args.push("-m".into());
            args.push(m.to_string());
        }
        if let Some(d) = self.inter_byte_delay {
            args.push("-d".into());
            args.push(d.as_millis().to_string());
        }
        args
    }

    pub fn to_cli_string(&self) -> String {
        self.to_cli_args().join(" ")
    }
}

/// Errors from [`parse_gen_cli`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenCliError {
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("flag `{0}` requires a value")]
    MissingValue(&'static str),
    #[error("invalid number `{value}` for {what}")]
    InvalidNumber { what: &'static str, value: String },
    #[error("length argument missing")]
    MissingLength,
    #[error("length must be positive")]
    ZeroLength,
    #[error("unexpected extra argument `{0}`")]
    ExtraArgument(String),
    #[error("-p and -a are mutually exclusive")]
    ConflictingCharset,
    #[error("-m modulus must be at least 1")]
    ZeroModulus,
    #[error("-l maximum line length must be at least 1")]
    ZeroLineMax,
}

/// Parse `LENGTH [-p] [-a] [-0] [-l MAX] [-s SEED] [-m MOD] [-d MS]`.
///
/// The default character set is the full 8-bit one. When `-s` is absent the
/// seed is drawn from system entropy; callers that want reproducibility
/// should report the seed of the returned spec.
pub fn parse_gen_cli<I, S>(args: I) -> Result<GenSpec, GenCliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut length: Option<u64> = None;
    let mut base: Option<CharsetBase> = None;
    let mut include_nul = false;
    let mut line_mode_max: Option<u32> = None;
    let mut seed: Option<u64> = None;
    let mut seed_modulus: Option<u64> = None;
    let mut delay_ms: Option<u64> = None;

    let mut it = args.into_iter();
    while let Some(tok) = it.next() {
        let tok = tok.as_ref();
        match tok {
            "-p" => match base {
                Some(CharsetBase::All8Bit) => return Err(GenCliError::ConflictingCharset),
                _ => base = Some(CharsetBase::Printable),
            },
            "-a" => match base {
                Some(CharsetBase::Printable) => return Err(GenCliError::ConflictingCharset),
                _ => base = Some(CharsetBase::All8Bit),
            },
            "-0" => include_nul = true,
            "-l" => line_mode_max = Some(flag_value(&mut it, "-l")?),
            "-s" => seed = Some(flag_value(&mut it, "-s")?),
            "-m" => seed_modulus = Some(flag_value(&mut it, "-m")?),
            "-d" => delay_ms = Some(flag_value(&mut it, "-d")?),
            _ if tok.starts_with('-') && tok.len() > 1 => {
                return Err(GenCliError::UnknownFlag(tok.to_string()));
            }
            _ => {
                if length.is_some() {
                    return Err(GenCliError::ExtraArgument(tok.to_string()));
                }
                length = Some(tok.parse().map_err(|_| GenCliError::InvalidNumber {
                    what: "length",
                    value: tok.to_string(),
                })?);
            }
        }
    }

    let spec = GenSpec {
        length: length.ok_or(GenCliError::MissingLength)?,
        charset_base: base.unwrap_or(CharsetBase::All8Bit),
        include_nul,
        line_mode_max,
        seed: seed.unwrap_or_else(entropy_seed),
        seed_modulus,
        inter_byte_delay: delay_ms.map(Duration::from_millis),
    };
    spec.validate()?;
    Ok(spec)
}

fn flag_value<I, S, T>(it: &mut I, flag: &'static str) -> Result<T, GenCliError>
where
    I: Iterator<Item = S>,
    S: AsRef<str>,
    T: std::str::FromStr,
{
    let tok = it.next().ok_or(GenCliError::MissingValue(flag))?;
    tok.as_ref()
        .parse()
        .map_err(|_| GenCliError::InvalidNumber {
            what: flag,
            value: tok.as_ref().to_string(),
        })
}

/// A 64-bit seed from system entropy.
pub fn entropy_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    std::collections::hash_map::RandomState::new()
        .build_hasher()
        .finish()
}

/// Sink failure part-way through a stream.
#[derive(Debug, thiserror::Error)]
#[error("stream write failed after {bytes_emitted} bytes: {source}")]
pub struct StreamError {
    /// Bytes successfully handed to the sink before the failure.
    pub bytes_emitted: u64,
    #[source]
    pub source: std::io::Error,
}

const CHUNK: usize = 64 * 1024;

/// Generate the stream described by `spec` into `sink`.
///
/// Returns the total number of bytes emitted. Output is a pure function of
/// the spec (its effective seed included); running the same spec twice gives
/// byte-identical streams. In line mode the newline byte is reserved as the
/// terminator and never drawn into a line body.
pub fn generate_stream(spec: &GenSpec, sink: &mut dyn Write) -> Result<u64, StreamError> {
    if let Err(e) = spec.validate() {
        return Err(StreamError {
            bytes_emitted: 0,
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, e.to_string()),
        });
    }

    let mut rng = SplitMix64::new(spec.effective_seed());
    let charset = spec.charset();
    let k = charset.len() as u64;
    let mut out = Emitter {
        sink,
        delay: spec.inter_byte_delay,
        buf: Vec::with_capacity(if spec.inter_byte_delay.is_none() {
            CHUNK
        } else {
            0
        }),
        emitted: 0,
    };

    match spec.line_mode_max {
        None => {
            for _ in 0..spec.length {
                let b = charset[rng.next_below(k) as usize];
                out.push(b)?;
            }
        }
        Some(max) => {
            // Line bodies never contain the terminator itself, so the
            // output always splits into exactly `length` lines.
            let body_set: Vec<u8> = charset.iter().copied().filter(|&b| b != b'\n').collect();
            let body_k = body_set.len() as u64;
            for _ in 0..spec.length {
                let body = rng.next_below(u64::from(max) + 1);
                for _ in 0..body {
                    let b = body_set[rng.next_below(body_k) as usize];
                    out.push(b)?;
                }
                out.push(b'\n')?;
            }
        }
    }
    out.finish()
}

struct Emitter<'a> {
    sink: &'a mut dyn Write,
    delay: Option<Duration>,
    buf: Vec<u8>,
    emitted: u64,
}

impl Emitter<'_> {
    fn push(&mut self, b: u8) -> Result<(), StreamError> {
        match self.delay {
            None => {
                self.buf.push(b);
                if self.buf.len() >= CHUNK {
                    self.flush()?;
                }
            }
            Some(d) => {
                if self.emitted > 0 {
                    std::thread::sleep(d);
                }
                self.sink.write_all(&[b]).map_err(|source| StreamError {
                    bytes_emitted: self.emitted,
                    source,
                })?;
                self.emitted += 1;
            }
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), StreamError> {
        if !self.buf.is_empty() {
            self.sink.write_all(&self.buf).map_err(|source| StreamError {
                bytes_emitted: self.emitted,
                source,
            })?;
            self.emitted += self.buf.len() as u64;
            self.buf.clear();
        }
        Ok(())
    }

    fn finish(mut self) -> Result<u64, StreamError> {
        self.flush()?;
        Ok(self.emitted)
    }
}

/// Convenience wrapper collecting the stream into memory.
pub fn generate_to_vec(spec: &GenSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    generate_stream(spec, &mut buf).expect("writes to Vec cannot fail");
    buf
}
