//! Solvers: exhaustive oracle, exact branch-and-bound, dispatch heuristics
//! and an anytime metaheuristic. All of them are deterministic functions of
//! (instance, parameters, seed); wall-clock limits only decide how far a
//! search gets, never which branch it takes next.

mod anytime;
mod dispatch;
mod exact;
mod graph;
mod oracle;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::core::Schedule;

pub use anytime::{solve_anytime, trivial_lower_bound};
pub use dispatch::{dispatch_heuristic, DispatchRule};
pub use exact::solve_exact;
pub use graph::{orders_from_schedule, schedule_from_orders, MachineOrders};
pub use oracle::{brute_force_oracle, ORACLE_MAX_TOTAL_OPS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance has {total_ops} operations, oracle accepts at most {limit}")]
    TooLargeForOracle { total_ops: usize, limit: usize },
    #[error("{combos} order combinations exceed the oracle enumeration cap")]
    TooManyOrderings { combos: u128 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub schedule: Schedule,
    /// True when the makespan is proven optimal: the search ran to
    /// completion, or the incumbent hit a lower bound.
    pub proven_optimal: bool,
    #[serde(serialize_with = "secs_f64")]
    pub elapsed: Duration,
    /// Branch-and-bound nodes expanded; 0 for the anytime solver.
    pub nodes_explored: u64,
}

fn secs_f64<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}
