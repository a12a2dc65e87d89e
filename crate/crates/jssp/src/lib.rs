//! Job-shop scheduling toolkit: instance generation, exact and anytime
//! solving, natural-language serialization, solution validation, and an
//! evaluation pipeline for chat models that answer scheduling prompts.
//!
//! The core object is a [`JsspInstance`]: jobs made of ordered operations,
//! each claiming one machine for a fixed duration. A [`Schedule`] assigns
//! start times; its makespan is the latest completion. Everything else is
//! built around moving these two types between memory, text formats and
//! model endpoints without losing a byte.

pub mod core;
pub mod evalkit;
pub mod instgen;
pub mod nlcodec;
pub mod pipeline;
pub mod solver;
pub mod validator;

#[cfg(test)]
mod testutil;

pub use crate::core::{JsspInstance, Operation, Schedule, ScheduledOp};
pub use crate::solver::SolveResult;
pub use crate::validator::{ValidationReport, Violation, ViolationKind};
