//! Exhaustive reference solver for tiny instances.
//!
//! Enumerates every combination of per-machine processing orders and
//! evaluates each with the longest-path pass, skipping cyclic combinations.
//! Deliberately shares no search logic with the branch-and-bound solver so
//! the two act as independent checks on each other.

use itertools::Itertools;

use super::graph;
use super::SolverError;
use crate::core::JsspInstance;

/// Hard cap on instance size; anything larger is refused outright.
pub const ORACLE_MAX_TOTAL_OPS: usize = 12;
/// Secondary cap on enumerated order combinations, so degenerate shapes
/// (many ops piled on one machine) stay tractable.
const MAX_ORDERINGS: u128 = 5_000_000;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn brute_force_oracle(instance: &JsspInstance) -> Result<u32, SolverError> {
    let total_ops = instance.total_ops();
    if total_ops > ORACLE_MAX_TOTAL_OPS {
        return Err(SolverError::TooLargeForOracle {
            total_ops,
            limit: ORACLE_MAX_TOTAL_OPS,
        });
    }

    // With a single machine or a single job every feasible order is a chain
    // with no forced idle time, so the total work is the optimum.
    if instance.num_machines == 1 || instance.num_jobs == 1 {
        return Ok(instance.jobs.iter().flatten().map(|op| op.duration).sum());
    }

    let mut per_machine: Vec<Vec<(usize, usize)>> = vec![Vec::new(); instance.num_machines];
    for (j, ops) in instance.jobs.iter().enumerate() {
        for (k, op) in ops.iter().enumerate() {
            per_machine[op.machine].push((j, k));
        }
    }

    let combos: u128 = per_machine.iter().map(|ops| factorial(ops.len())).product();
    if combos > MAX_ORDERINGS {
        return Err(SolverError::TooManyOrderings { combos });
    }

    let best = per_machine
        .iter()
        .map(|ops| ops.iter().copied().permutations(ops.len()))
        .multi_cartesian_product()
        .filter_map(|orders| graph::evaluate(instance, &orders).map(|eval| eval.makespan))
        .min();
    Ok(best.expect("at least one acyclic order combination exists"))
}
