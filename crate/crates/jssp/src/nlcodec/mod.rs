//! Text formats: the compact matrix form, the two natural-language problem
//! renderings, the solution rendering, and chat-record assembly.
//!
//! Emission is byte-stable: the same value always renders to the same text,
//! including whitespace. Parsers are more forgiving; they accept flexible
//! spacing, and the solution parser scrapes operation lines out of arbitrary
//! prose, since model output rarely arrives clean.

mod chat;
mod matrix;
mod problem;
mod solution;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::ScheduledOp;

pub use chat::{build_chat_record, user_turn, ChatRecord, PROMPT_VARIANTS, SYSTEM_PROMPT};
pub use matrix::{emit_matrix, parse_matrix};
pub use problem::{emit_problem_nl, parse_problem_nl};
pub use solution::{emit_solution_nl, parse_solution_nl};

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("bad matrix header: {0}")]
    BadHeader(String),
    #[error("bad job row at line {line}: {detail}")]
    BadJobRow { line: usize, detail: String },
    #[error("machine {machine} out of range for {num_machines} machines")]
    InvalidMachine { machine: usize, num_machines: usize },
    #[error("expected {expected} job rows, found {found}")]
    MissingJobRows { expected: usize, found: usize },
    #[error("unexpected trailing content at line {line}")]
    TrailingContent { line: usize },
    #[error("missing or malformed problem preamble")]
    BadPreamble,
    #[error("job {job} out of range for {num_jobs} jobs")]
    JobIdOutOfRange { job: usize, num_jobs: usize },
    #[error("operations of job {job} do not form a contiguous 0-based sequence")]
    NonContiguousOps { job: usize },
    #[error("duplicate entry for job {job} operation {op}")]
    DuplicateOp { job: usize, op: usize },
    #[error("no operations listed for job {job}")]
    MissingJob { job: usize },
    #[error("operation line outside any block at line {line}")]
    OrphanLine { line: usize },
    #[error("zero duration for job {job} operation {op}")]
    InvalidDuration { job: usize, op: usize },
    #[error("no operation lines found")]
    NoOperationsFound,
    #[error("schedule does not cover the instance: {detail}")]
    CoverageError { detail: String },
    #[error("prompt variant {variant} out of range (0..{count})")]
    BadPromptVariant { variant: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NlStyle {
    #[serde(rename = "job")]
    JobCentric,
    #[serde(rename = "machine")]
    MachineCentric,
}

impl NlStyle {
    pub fn name(self) -> &'static str {
        match self {
            NlStyle::JobCentric => "job",
            NlStyle::MachineCentric => "machine",
        }
    }
}

impl fmt::Display for NlStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NlStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "job" => Ok(NlStyle::JobCentric),
            "machine" => Ok(NlStyle::MachineCentric),
            other => Err(format!("unknown style: {other} (expected job or machine)")),
        }
    }
}

/// What the solution parser could extract from a piece of text. Claimed end
/// times are kept verbatim; entries whose end does not equal start plus
/// duration are flagged rather than repaired.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsedSolution {
    pub ops: Vec<ScheduledOp>,
    pub claimed_makespan: Option<f64>,
    /// Indices into `ops` with inconsistent arithmetic.
    pub arithmetic_defects: Vec<usize>,
}

impl ParsedSolution {
    pub fn empty() -> Self {
        Self {
            ops: Vec::new(),
            claimed_makespan: None,
            arithmetic_defects: Vec::new(),
        }
    }
}
