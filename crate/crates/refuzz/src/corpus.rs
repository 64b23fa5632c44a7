//! Test-input corpus builder.
//!
//! Builds the full input matrix (size class x character category x newline
//! treatment) as named files plus a tab-separated manifest. Per-file seeds
//! are derived from the plan's base seed and the file stem, so any category
//! subset can be regenerated independently and byte-identically.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use crate::generator::{generate_stream, CharsetBase, GenSpec};
use crate::rng::derive_seed;

pub const MANIFEST_NAME: &str = "MANIFEST.tsv";

/// Input size tiers. Byte counts apply in raw mode, line counts in lines
/// mode; every tier caps line bodies at 100 bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
    Huge,
}

impl SizeClass {
    pub const ALL: [SizeClass; 4] = [
        SizeClass::Small,
        SizeClass::Medium,
        SizeClass::Large,
        SizeClass::Huge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
            SizeClass::Huge => "huge",
        }
    }

    pub fn byte_count(self) -> u64 {
        match self {
            SizeClass::Small => 1_000,
            SizeClass::Medium => 100_000,
            SizeClass::Large => 10_000_000,
            SizeClass::Huge => 100_000_000,
        }
    }

    pub fn line_count(self) -> u64 {
        match self {
            SizeClass::Small => 10,
            SizeClass::Medium => 1_000,
            SizeClass::Large => 100_000,
            SizeClass::Huge => 1_000_000,
        }
    }

    pub fn max_line_len(self) -> u32 {
        100
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "small" | "s" => Some(SizeClass::Small),
            "medium" | "m" => Some(SizeClass::Medium),
            "large" | "l" => Some(SizeClass::Large),
            "huge" | "h" => Some(SizeClass::Huge),
            _ => None,
        }
    }
}

/// Character category axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CharsetClass {
    AllWithNul,
    AllWithoutNul,
    Printable,
}

impl CharsetClass {
    pub const ALL: [CharsetClass; 3] = [
        CharsetClass::AllWithNul,
        CharsetClass::AllWithoutNul,
        CharsetClass::Printable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CharsetClass::AllWithNul => "all_with_nul",
            CharsetClass::AllWithoutNul => "all_without_nul",
            CharsetClass::Printable => "printable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all_with_nul" => Some(CharsetClass::AllWithNul),
            "all_without_nul" => Some(CharsetClass::AllWithoutNul),
            "printable" => Some(CharsetClass::Printable),
            _ => None,
        }
    }

    fn base(self) -> CharsetBase {
        match self {
            CharsetClass::Printable => CharsetBase::Printable,
            _ => CharsetBase::All8Bit,
        }
    }

    fn include_nul(self) -> bool {
        matches!(self, CharsetClass::AllWithNul)
    }
}

/// Newline treatment axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NewlineMode {
    /// Line-structured output, body lengths uniform on 0..=100.
    Lines,
    /// Plain byte stream; newline gets no special treatment.
    Raw,
}

impl NewlineMode {
    pub const ALL: [NewlineMode; 2] = [NewlineMode::Lines, NewlineMode::Raw];

    pub fn name(self) -> &'static str {
        match self {
            NewlineMode::Lines => "lines",
            NewlineMode::Raw => "raw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lines" => Some(NewlineMode::Lines),
            "raw" => Some(NewlineMode::Raw),
            _ => None,
        }
    }
}

/// What to build: which axes, how many files per category, where, and from
/// which base seed.
#[derive(Debug, Clone)]
pub struct CorpusPlan {
    pub sizes: Vec<SizeClass>,
    pub charsets: Vec<CharsetClass>,
    pub newline_modes: Vec<NewlineMode>,
    pub files_per_category: u32,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

impl CorpusPlan {
    /// The full 24-category matrix with the default five files each.
    pub fn full(output_dir: impl Into<PathBuf>, base_seed: u64) -> Self {
        Self {
            sizes: SizeClass::ALL.to_vec(),
            charsets: CharsetClass::ALL.to_vec(),
            newline_modes: NewlineMode::ALL.to_vec(),
            files_per_category: 5,
            base_seed,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.sizes.is_empty() || self.charsets.is_empty() || self.newline_modes.is_empty() {
            return Err(CorpusError::EmptyAxis);
        }
        if self.files_per_category == 0 {
            return Err(CorpusError::ZeroFilesPerCategory);
        }
        Ok(())
    }

    /// Deduplicated category cross product, in deterministic order.
    pub fn categories(&self) -> Vec<(SizeClass, CharsetClass, NewlineMode)> {
        let sizes: BTreeSet<_> = self.sizes.iter().copied().collect();
        let charsets: BTreeSet<_> = self.charsets.iter().copied().collect();
        let modes: BTreeSet<_> = self.newline_modes.iter().copied().collect();
        let mut out = Vec::new();
        for &s in &sizes {
            for &c in &charsets {
                for &m in &modes {
                    out.push((s, c, m));
                }
            }
        }
        out
    }
}

/// File stem for one corpus member: `<size>_<charset>_<newline>_<index>`.
pub fn file_stem(
    size: SizeClass,
    charset: CharsetClass,
    newline: NewlineMode,
    index: u32,
) -> String {
    format!(
        "{}_{}_{}_{}",
        size.name(),
        charset.name(),
        newline.name(),
        index
    )
}

/// The generation spec for one corpus file.
///
/// The per-file seed is one SplitMix64 step over
/// `base_seed ^ fnv1a64(file_stem)`, so files are independent of each other
/// and of generation order.
pub fn category_spec(
    size: SizeClass,
    charset: CharsetClass,
    newline: NewlineMode,
    file_index: u32,
    base_seed: u64,
) -> GenSpec {
    let seed = derive_seed(base_seed, &file_stem(size, charset, newline, file_index));
    let mut spec = match newline {
        NewlineMode::Raw => GenSpec::new(size.byte_count(), seed),
        NewlineMode::Lines => {
            let mut s = GenSpec::new(size.line_count(), seed);
            s.line_mode_max = Some(size.max_line_len());
            s
        }
    };
    spec.charset_base = charset.base();
    spec.include_nul = charset.include_nul();
    spec
}

/// One manifest record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// File name relative to the corpus directory.
    pub path: String,
    /// SHA-256 of the file contents, lowercase hex.
    pub digest: String,
    pub size: u64,
    /// CLI rendering of the generating spec; parseable by `parse_gen_cli`.
    pub spec: GenSpec,
}

/// Provenance of a generated corpus.
#[derive(Debug, Clone)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub base_seed: u64,
    pub tool_version: String,
}

impl CorpusManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# refuzz corpus manifest\n");
        out.push_str(&format!("# base_seed={}\n", self.base_seed));
        out.push_str(&format!("# tool_version={}\n", self.tool_version));
        out.push_str("# path\tsha256\tbytes\tspec\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.path,
                e.digest,
                e.size,
                e.spec.to_cli_string()
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut base_seed = 0u64;
        let mut tool_version = String::new();
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("base_seed=") {
                    base_seed = v.parse().map_err(|_| CorpusError::ManifestSyntax {
                        line: no + 1,
                        reason: "bad base_seed".into(),
                    })?;
                } else if let Some(v) = rest.strip_prefix("tool_version=") {
                    tool_version = v.to_string();
                }
                continue;
            }
            let mut fields = line.split('\t');
            let (path, digest, size, spec) = match (
                fields.next(),
                fields.next(),
                fields.next(),
                fields.next(),
            ) {
                (Some(p), Some(d), Some(s), Some(g)) => (p, d, s, g),
                _ => {
                    return Err(CorpusError::ManifestSyntax {
                        line: no + 1,
                        reason: "expected 4 tab-separated fields".into(),
                    })
                }
            };
            let size = size.parse().map_err(|_| CorpusError::ManifestSyntax {
                line: no + 1,
                reason: "bad size".into(),
            })?;
            let spec = crate::generator::parse_gen_cli(spec.split(' ')).map_err(|e| {
                CorpusError::ManifestSyntax {
                    line: no + 1,
                    reason: format!("bad spec: {e}"),
                }
            })?;
            entries.push(ManifestEntry {
                path: path.to_string(),
                digest: digest.to_string(),
                size,
                spec,
            });
        }
        Ok(Self {
            entries,
            base_seed,
            tool_version,
        })
    }

    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let path = dir.join(MANIFEST_NAME);
        let text = fs::read_to_string(&path).map_err(|source| CorpusError::Io {
            path: path.clone(),
            source,
        })?;
        Self::parse(&text)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus plan has an empty axis")]
    EmptyAxis,
    #[error("files_per_category must be at least 1")]
    ZeroFilesPerCategory,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Generation aborted part-way; `written` lists the files that did
    /// complete (with valid digests) before the failure.
    #[error("corpus generation aborted after {} files: {source}", written.len())]
    Partial {
        written: Vec<ManifestEntry>,
        #[source]
        source: Box<CorpusError>,
    },
    #[error("manifest line {line}: {reason}")]
    ManifestSyntax { line: usize, reason: String },
    #[error("{path}: digest mismatch (manifest {expected}, disk {actual})")]
    DigestMismatch {
        path: String,
        expected: String,
        actual: String,
    },
    #[error("{path}: listed in manifest but missing on disk")]
    MissingFile { path: String },
    #[error("{path}: present on disk but not in manifest")]
    UnlistedFile { path: String },
}

/// Build every file in the plan and write `MANIFEST.tsv` beside them.
///
/// Files within the run are generated in parallel; each file is written by
/// exactly one worker and the manifest is assembled after all workers join.
/// On failure the error carries the entries completed so far.
pub fn build_corpus(plan: &CorpusPlan) -> Result<CorpusManifest, CorpusError> {
    plan.validate()?;
    fs::create_dir_all(&plan.output_dir).map_err(|source| CorpusError::Io {
        path: plan.output_dir.clone(),
        source,
    })?;

    let mut jobs = Vec::new();
    for (size, charset, newline) in plan.categories() {
        for index in 0..plan.files_per_category {
            jobs.push((size, charset, newline, index));
        }
    }

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let done: Mutex<Vec<ManifestEntry>> = Mutex::new(Vec::new());
    let failure: Mutex<Option<CorpusError>> = Mutex::new(None);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(jobs.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    return;
                }
                let (size, charset, newline, index) = jobs[i];
                match write_one(plan, size, charset, newline, index) {
                    Ok(entry) => done.lock().unwrap().push(entry),
                    Err(e) => {
                        abort.store(true, Ordering::Relaxed);
                        failure.lock().unwrap().get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });

    let mut entries = done.into_inner().unwrap();
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(CorpusError::Partial {
            written: entries,
            source: Box::new(e),
        });
    }

    let manifest = CorpusManifest {
        entries,
        base_seed: plan.base_seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let manifest_path = plan.output_dir.join(MANIFEST_NAME);
    fs::write(&manifest_path, manifest.render()).map_err(|source| CorpusError::Io {
        path: manifest_path,
        source,
    })?;
    Ok(manifest)
}

fn write_one(
    plan: &CorpusPlan,
    size: SizeClass,
    charset: CharsetClass,
    newline: NewlineMode,
    index: u32,
) -> Result<ManifestEntry, CorpusError> {
    let stem = file_stem(size, charset, newline, index);
    let spec = category_spec(size, charset, newline, index, plan.base_seed);
    let path = plan.output_dir.join(&stem);
    let io_err = |source| CorpusError::Io {
        path: path.clone(),
        source,
    };

    let file = fs::File::create(&path).map_err(io_err)?;
    let mut sink = HashingWriter {
        inner: BufWriter::new(file),
        hasher: Sha256::new(),
    };
    let written = generate_stream(&spec, &mut sink).map_err(|e| io_err(e.source))?;
    sink.inner.flush().map_err(io_err)?;

    Ok(ManifestEntry {
        path: stem,
        digest: hex::encode(sink.hasher.finalize()),
        size: written,
        spec,
    })
}

struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

fn sha256_file(path: &Path) -> Result<String, std::io::Error> {
    use std::io::Read;
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Re-read a corpus directory and check it against its manifest, both ways:
/// every manifest entry must exist with a matching digest and size, and
/// every regular file in the directory (manifest aside) must be listed.
pub fn verify_corpus(dir: &Path) -> Result<CorpusManifest, CorpusError> {
    let manifest = CorpusManifest::load(dir)?;
    for entry in &manifest.entries {
        let path = dir.join(&entry.path);
        if !path.is_file() {
            return Err(CorpusError::MissingFile {
                path: entry.path.clone(),
            });
        }
        let actual = sha256_file(&path).map_err(|source| CorpusError::Io {
            path: path.clone(),
            source,
        })?;
        if actual != entry.digest {
            return Err(CorpusError::DigestMismatch {
                path: entry.path.clone(),
                expected: entry.digest.clone(),
                actual,
            });
        }
    }
    let listed: BTreeSet<&str> = manifest.entries.iter().map(|e| e.path.as_str()).collect();
    let read_dir = fs::read_dir(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for item in read_dir {
        let item = item.map_err(|source| CorpusError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        if !item.file_type().map(|t| t.is_file()).unwrap_or(false) {
            continue;
        }
        let name = item.file_name().to_string_lossy().into_owned();
        if name == MANIFEST_NAME || name.starts_with('.') {
            continue;
        }
        if !listed.contains(name.as_str()) {
            return Err(CorpusError::UnlistedFile { path: name });
        }
    }
    Ok(manifest)
}

impl fmt::Display for CorpusManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
