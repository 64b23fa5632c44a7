//! Classic black-box fuzz toolkit.
//!
//! Four cooperating pieces, usable as a library or through the `refuzz`
//! multi-call binary:
//!
//! - [`generator`]: deterministic constrained-random byte streams
//!   (`refuzz gen`), seeded and replayable.
//! - [`corpus`]: the size x charset x newline input-file matrix with a
//!   digest manifest (`refuzz corpus`).
//! - [`pty`]: drive interactive targets through a real pseudo-terminal,
//!   with input sanitizing and quit sequences (`refuzz pty`).
//! - [`runner`] + [`config`]: config-driven campaigns pairing utilities
//!   with inputs and random option subsets, one record per run
//!   (`refuzz run`).
//! - [`report`]: failure-rate statistics, cross-campaign comparison, and
//!   cause-category tables (`refuzz report`).
//!
//! A target fails only by crashing (signal death) or hanging (alive at the
//! timeout); error exits are passes. See the `examples/` directory for one
//! runnable walkthrough per capability.

pub mod config;
pub mod corpus;
pub mod generator;
pub mod limits;
pub mod outcome;
pub mod pty;
pub mod report;
pub mod rng;
pub mod runner;

mod process_util;
mod tail;

pub use config::{parse_config, ConfigEntry, InputMode};
pub use generator::{generate_stream, parse_gen_cli, GenSpec};
pub use outcome::{OutcomeKind, TestOutcome};
pub use pty::{run_under_pty, sanitize_for_pty, PtySession, QuitSequence};
pub use rng::SplitMix64;
pub use runner::{run_campaign, CampaignSettings, RunRecord};
