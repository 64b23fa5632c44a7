//! Campaign configuration parsing.
//!
//! One entry per non-blank, non-comment line:
//!
//! ```text
//! {stdin|file|cp|two_files|pty} [COPY_NAME] cmd {fixed options} {[ option pool ]} [quit="..."]
//! ```
//!
//! `COPY_NAME` is consumed only in `cp` mode (the input file is copied to
//! that name before the run, for targets that require a particular suffix).
//! Tokens inside square brackets form the option pool from which each run
//! independently picks every option with probability one half. A trailing
//! `quit="..."` (pty mode only) is the byte sequence appended after the
//! input so the target exits.

use std::fmt;

use crate::pty::{QuitSequence, QuitSequenceError};

/// How the input file reaches the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// Piped to standard input.
    Stdin,
    /// Path appended to the command line.
    File,
    /// Copied to a fixed name in the scratch dir; that name is appended.
    Cp,
    /// Two distinct input paths appended.
    TwoFiles,
    /// Fed through a pseudo-terminal.
    Pty,
}

impl InputMode {
    pub fn name(self) -> &'static str {
        match self {
            InputMode::Stdin => "stdin",
            InputMode::File => "file",
            InputMode::Cp => "cp",
            InputMode::TwoFiles => "two_files",
            InputMode::Pty => "pty",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "stdin" => Some(InputMode::Stdin),
            "file" => Some(InputMode::File),
            "cp" => Some(InputMode::Cp),
            "two_files" => Some(InputMode::TwoFiles),
            "pty" => Some(InputMode::Pty),
            _ => None,
        }
    }
}

/// One parsed campaign entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub input_mode: InputMode,
    /// Destination file name, `cp` mode only.
    pub copy_target_name: Option<String>,
    pub command: String,
    /// Options passed on every run.
    pub fixed_args: Vec<String>,
    /// Options each run picks from with probability 0.5 apiece.
    pub option_pool: Vec<String>,
    /// Quit sequence, `pty` mode only.
    pub quit: Option<QuitSequence>,
}

impl ConfigEntry {
    /// Utility name for records and statistics: the command's basename.
    pub fn utility_name(&self) -> &str {
        self.command.rsplit('/').next().unwrap_or(&self.command)
    }
}

impl fmt::Display for ConfigEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.input_mode.name())?;
        if let Some(name) = &self.copy_target_name {
            write!(f, " {name}")?;
        }
        write!(f, " {}", self.command)?;
        for arg in &self.fixed_args {
            write!(f, " {arg}")?;
        }
        if !self.option_pool.is_empty() {
            write!(f, " [ {} ]", self.option_pool.join(" "))?;
        }
        if let Some(quit) = &self.quit {
            write!(f, " quit=\"{}\"", quit.encode())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: unknown input mode `{mode}`")]
    UnknownMode { line: usize, mode: String },
    #[error("line {line}: cp mode requires a copy target name")]
    CpWithoutName { line: usize },
    #[error("line {line}: missing command")]
    MissingCommand { line: usize },
    #[error("line {line}: unbalanced brackets")]
    UnbalancedBrackets { line: usize },
    #[error("line {line}: tokens after option pool (only quit=\"...\" may follow)")]
    TrailingTokens { line: usize },
    #[error("line {line}: quit sequence on non-pty entry")]
    QuitOnNonPty { line: usize },
    #[error("line {line}: bad quit sequence: {source}")]
    BadQuit {
        line: usize,
        source: QuitSequenceError,
    },
    #[error("line {line}: unterminated quote")]
    UnterminatedQuote { line: usize },
}

/// Parse a whole configuration file. `#`-prefixed and blank lines are
/// skipped.
pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, ConfigError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        entries.push(parse_line(line, line_no)?);
    }
    Ok(entries)
}

fn parse_line(line: &str, line_no: usize) -> Result<ConfigEntry, ConfigError> {
    let tokens = tokenize(line, line_no)?;
    let mut it = tokens.into_iter().peekable();

    let Some(mode_tok) = it.next() else {
        return Err(ConfigError::MissingCommand { line: line_no });
    };
    let Token::Word(mode_word) = mode_tok else {
        return Err(ConfigError::UnknownMode {
            line: line_no,
            mode: mode_tok.to_string(),
        });
    };
    let input_mode = InputMode::parse(&mode_word).ok_or(ConfigError::UnknownMode {
        line: line_no,
        mode: mode_word.clone(),
    })?;

    let copy_target_name = if input_mode == InputMode::Cp {
        match it.next() {
            Some(Token::Word(name)) => Some(name),
            _ => return Err(ConfigError::CpWithoutName { line: line_no }),
        }
    } else {
        None
    };

    let command = match it.next() {
        Some(Token::Word(cmd)) => cmd,
        _ => return Err(ConfigError::MissingCommand { line: line_no }),
    };

    let mut fixed_args = Vec::new();
    let mut option_pool = Vec::new();
    let mut quit: Option<QuitSequence> = None;
    let mut seen_pool = false;

    while let Some(tok) = it.next() {
        match tok {
            Token::Open => {
                if seen_pool {
                    return Err(ConfigError::UnbalancedBrackets { line: line_no });
                }
                seen_pool = true;
                loop {
                    match it.next() {
                        Some(Token::Word(w)) => option_pool.push(w),
                        Some(Token::Close) => break,
                        Some(Token::Open) | Some(Token::Quit(_)) | None => {
                            return Err(ConfigError::UnbalancedBrackets { line: line_no })
                        }
                    }
                }
            }
            Token::Close => return Err(ConfigError::UnbalancedBrackets { line: line_no }),
            Token::Quit(text) => {
                let seq = QuitSequence::parse(&text).map_err(|source| ConfigError::BadQuit {
                    line: line_no,
                    source,
                })?;
                if input_mode != InputMode::Pty {
                    return Err(ConfigError::QuitOnNonPty { line: line_no });
                }
                if it.peek().is_some() {
                    return Err(ConfigError::TrailingTokens { line: line_no });
                }
                quit = Some(seq);
            }
            Token::Word(w) => {
                if seen_pool {
                    return Err(ConfigError::TrailingTokens { line: line_no });
                }
                fixed_args.push(w);
            }
        }
    }

    Ok(ConfigEntry {
        input_mode,
        copy_target_name,
        command,
        fixed_args,
        option_pool,
        quit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Open,
    Close,
    /// The value of a `quit="..."` token, quotes removed.
    Quit(String),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            Token::Open => f.write_str("["),
            Token::Close => f.write_str("]"),
            Token::Quit(q) => write!(f, "quit=\"{q}\""),
        }
    }
}

/// Split a config line into words, brackets, and `quit="..."`. Brackets
/// separate even when glued to a word (the usual `[-l -w -s -q]` spelling).
fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ConfigError> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut chars = line.chars().peekable();

    let flush = |word: &mut String, tokens: &mut Vec<Token>| {
        if !word.is_empty() {
            tokens.push(Token::Word(std::mem::take(word)));
        }
    };

    while let Some(c) = chars.next() {
        match c {
            '[' => {
                flush(&mut word, &mut tokens);
                tokens.push(Token::Open);
            }
            ']' => {
                flush(&mut word, &mut tokens);
                tokens.push(Token::Close);
            }
            '"' => {
                // Only meaningful as part of quit="..."; keep the quoted
                // text (spaces included) attached to the pending word.
                let mut quoted = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => quoted.push(ch),
                        None => return Err(ConfigError::UnterminatedQuote { line: line_no }),
                    }
                }
                if word == "quit=" {
                    word.clear();
                    tokens.push(Token::Quit(quoted));
                } else {
                    word.push_str(&quoted);
                }
            }
            c if c.is_whitespace() => flush(&mut word, &mut tokens),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut tokens);
    Ok(tokens)
}
