//! Anytime solver: dispatch seed plus simulated annealing.
//!
//! The neighborhood swaps adjacent operations on a machine where the
//! connecting arc lies on a critical path; other swaps can never shorten the
//! makespan. The incumbent only ever improves, and the run stops early when
//! it reaches the trivial lower bound, stalls, or exhausts its iteration or
//! time budget. Given the same (instance, time limit, seed) the result is
//! reproducible whenever the iteration budget, not the clock, is what stops
//! the run.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dispatch::{dispatch_heuristic, DispatchRule};
use super::graph::{self, MachineOrders};
use super::SolveResult;
use crate::core::{instance_total_work, JsspInstance, Schedule};

/// max(heaviest machine workload, longest job chain): every schedule is at
/// least this long.
pub fn trivial_lower_bound(instance: &JsspInstance) -> u32 {
    let mach = (0..instance.num_machines)
        .map(|m| instance_total_work(instance, m).expect("machine id in range"))
        .max()
        .unwrap_or(0);
    let job = instance.job_totals().into_iter().max().unwrap_or(0);
    mach.max(job)
}

/// Best of the four dispatch rules, ties to the earlier rule.
pub(super) fn best_dispatch(instance: &JsspInstance) -> Schedule {
    DispatchRule::ALL
        .into_iter()
        .map(|rule| dispatch_heuristic(instance, rule))
        .min_by_key(|sched| sched.makespan)
        .expect("at least one rule")
}

pub fn solve_anytime(instance: &JsspInstance, time_limit: Duration, seed: u64) -> SolveResult {
    let t0 = Instant::now();
    let deadline = t0.checked_add(time_limit);
    let lb = trivial_lower_bound(instance);
    let mut best = best_dispatch(instance);
    if best.makespan > lb {
        let total_ops = instance.total_ops() as u64;
        let improved = sa_improve(
            instance,
            &best,
            50_000 + 2_000 * total_ops,
            10_000 + 200 * total_ops,
            seed,
            deadline,
            Some(lb),
        );
        if improved.makespan < best.makespan {
            best = improved;
        }
    }
    SolveResult {
        proven_optimal: best.makespan == lb,
        schedule: best,
        elapsed: t0.elapsed(),
        nodes_explored: 0,
    }
}

/// Adjacent same-machine pairs whose connecting arc is critical and tight.
fn critical_moves(
    instance: &JsspInstance,
    orders: &MachineOrders,
    eval: &graph::Evaluation,
    tails: &[u32],
) -> Vec<(usize, usize)> {
    let ids = graph::OpIds::new(instance);
    let mk = eval.makespan;
    let mut moves = Vec::new();
    for (m, seq) in orders.iter().enumerate() {
        for pos in 0..seq.len().saturating_sub(1) {
            let (ja, ka) = seq[pos];
            let (jb, kb) = seq[pos + 1];
            if ja == jb {
                continue;
            }
            let a = ids.id(ja, ka);
            let b = ids.id(jb, kb);
            let dur_a = instance.jobs[ja][ka].duration;
            if eval.starts[a] + tails[a] == mk
                && eval.starts[b] + tails[b] == mk
                && eval.starts[a] + dur_a == eval.starts[b]
            {
                moves.push((m, pos));
            }
        }
    }
    moves
}

/// Simulated annealing from `seed_schedule`. Returns a schedule no worse
/// than the (left-shifted) seed. `target_lb` stops the run as soon as the
/// incumbent is provably optimal.
pub(super) fn sa_improve(
    instance: &JsspInstance,
    seed_schedule: &Schedule,
    max_iters: u64,
    stall_limit: u64,
    rng_seed: u64,
    deadline: Option<Instant>,
    target_lb: Option<u32>,
) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut current = graph::orders_from_schedule(instance, seed_schedule);
    let mut cur_eval =
        graph::evaluate(instance, &current).expect("orders of a real schedule are acyclic");
    let mut best_orders = current.clone();
    let mut best_mk = cur_eval.makespan;

    let mut temp = (best_mk as f64 * 0.05).max(2.0);
    let mut since_improve = 0u64;
    for iter in 0..max_iters {
        if since_improve >= stall_limit {
            break;
        }
        if target_lb.is_some_and(|lb| best_mk <= lb) {
            break;
        }
        if iter % 128 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }

        let tails = graph::tails(instance, &current, &cur_eval);
        let moves = critical_moves(instance, &current, &cur_eval, &tails);
        if moves.is_empty() {
            break;
        }
        let (m, pos) = moves[rng.random_range(0..moves.len())];
        current[m].swap(pos, pos + 1);
        since_improve += 1;
        match graph::evaluate(instance, &current) {
            Some(eval) => {
                let delta = eval.makespan as f64 - cur_eval.makespan as f64;
                if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
                    cur_eval = eval;
                    if cur_eval.makespan < best_mk {
                        best_mk = cur_eval.makespan;
                        best_orders = current.clone();
                        since_improve = 0;
                    }
                } else {
                    current[m].swap(pos, pos + 1);
                }
            }
            // A critical-arc swap stays acyclic; guard anyway.
            None => current[m].swap(pos, pos + 1),
        }
        temp = (temp * 0.9997).max(0.01);
    }

    graph::schedule_from_orders(instance, &best_orders).expect("incumbent orders are acyclic")
}
