//! Exact solver: depth-first branch-and-bound over active schedules.
//!
//! Branching follows the classic conflict-set scheme: find the earliest
//! possible completion C* among the next operations of all jobs, take the
//! machine achieving it, and branch on every candidate operation of that
//! machine that could start before C*. Enumerating those choices visits
//! every active schedule, and some optimal schedule is always active, so a
//! completed search proves optimality.
//!
//! Pruning combines two lower bounds at each node: job tails (an unfinished
//! job needs at least its remaining work) and a one-machine relaxation
//! (earliest head + remaining work + smallest tail per machine).

use std::time::{Duration, Instant};

use super::anytime;
use super::SolveResult;
use crate::core::{JsspInstance, Schedule, ScheduledOp};

const SEED_SA_ITERS: u64 = 30_000;
const SEED_SA_STALL: u64 = 8_000;
const SEED_SA_RNG: u64 = 0x5A17;

struct Search<'a> {
    instance: &'a JsspInstance,
    /// suffix[j][k]: total duration of job j's operations k and later.
    suffix: Vec<Vec<u32>>,
    next_op: Vec<usize>,
    job_avail: Vec<u32>,
    mach_avail: Vec<u32>,
    rem_mach: Vec<u32>,
    scheduled: usize,
    max_end: u32,
    partial: Vec<ScheduledOp>,
    best_makespan: u32,
    best_ops: Vec<ScheduledOp>,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    aborted: bool,
    head_buf: Vec<u32>,
    tail_buf: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a JsspInstance, incumbent: &Schedule) -> Self {
        let suffix = instance
            .jobs
            .iter()
            .map(|ops| {
                let mut s = vec![0u32; ops.len() + 1];
                for k in (0..ops.len()).rev() {
                    s[k] = s[k + 1] + ops[k].duration;
                }
                s
            })
            .collect();
        let rem_mach = (0..instance.num_machines)
            .map(|m| crate::core::instance_total_work(instance, m).expect("machine in range"))
            .collect();
        Self {
            instance,
            suffix,
            next_op: vec![0; instance.num_jobs],
            job_avail: vec![0; instance.num_jobs],
            mach_avail: vec![0; instance.num_machines],
            rem_mach,
            scheduled: 0,
            max_end: 0,
            partial: Vec::with_capacity(instance.total_ops()),
            best_makespan: incumbent.makespan,
            best_ops: incumbent.ops.clone(),
            nodes: 0,
            node_limit: None,
            deadline: None,
            aborted: false,
            head_buf: vec![0; instance.num_machines],
            tail_buf: vec![0; instance.num_machines],
        }
    }

    fn lower_bound(&mut self) -> u32 {
        let mut lb = self.max_end;
        self.head_buf.fill(u32::MAX);
        self.tail_buf.fill(u32::MAX);
        for j in 0..self.instance.num_jobs {
            let ops = &self.instance.jobs[j];
            if self.next_op[j] >= ops.len() {
                continue;
            }
            lb = lb.max(self.job_avail[j] + self.suffix[j][self.next_op[j]]);
            // Machine-free earliest starts along the rest of the job.
            let mut est = self.job_avail[j];
            for k in self.next_op[j]..ops.len() {
                let m = ops[k].machine;
                self.head_buf[m] = self.head_buf[m].min(est);
                self.tail_buf[m] = self.tail_buf[m].min(self.suffix[j][k + 1]);
                est += ops[k].duration;
            }
        }
        for m in 0..self.instance.num_machines {
            if self.rem_mach[m] > 0 && self.head_buf[m] != u32::MAX {
                let head = self.head_buf[m].max(self.mach_avail[m]);
                lb = lb.max(head + self.rem_mach[m] + self.tail_buf[m]);
            }
        }
        lb
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.node_limit.is_some_and(|limit| self.nodes >= limit) {
            self.aborted = true;
            return true;
        }
        if self.nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.aborted = true;
            return true;
        }
        false
    }

    fn dfs(&mut self) {
        if self.out_of_budget() {
            return;
        }
        self.nodes += 1;

        if self.scheduled == self.instance.total_ops() {
            if self.max_end < self.best_makespan {
                self.best_makespan = self.max_end;
                self.best_ops = self.partial.clone();
            }
            return;
        }
        if self.lower_bound() >= self.best_makespan {
            return;
        }

        // Earliest completion among next operations, and its machine.
        let mut c_star = u32::MAX;
        let mut m_star = usize::MAX;
        for j in 0..self.instance.num_jobs {
            let k = self.next_op[j];
            if k >= self.instance.jobs[j].len() {
                continue;
            }
            let op = self.instance.jobs[j][k];
            let est = self.job_avail[j].max(self.mach_avail[op.machine]);
            let ect = est + op.duration;
            if ect < c_star || (ect == c_star && op.machine < m_star) {
                c_star = ect;
                m_star = op.machine;
            }
        }

        // Conflict set: next operations on m_star that could start before C*.
        let mut branches: Vec<(u32, usize)> = Vec::new();
        for j in 0..self.instance.num_jobs {
            let k = self.next_op[j];
            if k >= self.instance.jobs[j].len() {
                continue;
            }
            let op = self.instance.jobs[j][k];
            if op.machine != m_star {
                continue;
            }
            let est = self.job_avail[j].max(self.mach_avail[m_star]);
            if est < c_star {
                branches.push((est + op.duration, j));
            }
        }
        branches.sort_unstable();

        for (_, j) in branches {
            let k = self.next_op[j];
            let op = self.instance.jobs[j][k];
            let est = self.job_avail[j].max(self.mach_avail[m_star]);
            let end = est + op.duration;

            let saved = (self.job_avail[j], self.mach_avail[m_star], self.max_end);
            self.partial.push(ScheduledOp::new(j, k, m_star, est, op.duration));
            self.next_op[j] += 1;
            self.job_avail[j] = end;
            self.mach_avail[m_star] = end;
            self.rem_mach[m_star] -= op.duration;
            self.scheduled += 1;
            self.max_end = self.max_end.max(end);

            self.dfs();

            self.partial.pop();
            self.next_op[j] -= 1;
            self.rem_mach[m_star] += op.duration;
            self.scheduled -= 1;
            (self.job_avail[j], self.mach_avail[m_star], self.max_end) = saved;

            if self.aborted {
                return;
            }
        }
    }
}

/// Warm start: best dispatch rule, then a fixed-budget annealing pass. The
/// budget is iteration-based, so the incumbent it hands the search is a
/// deterministic function of the instance.
fn seed_schedule(instance: &JsspInstance) -> Schedule {
    let best = anytime::best_dispatch(instance);
    anytime::sa_improve(
        instance,
        &best,
        SEED_SA_ITERS,
        SEED_SA_STALL,
        SEED_SA_RNG,
        None,
        Some(anytime::trivial_lower_bound(instance)),
    )
}

pub fn solve_exact(
    instance: &JsspInstance,
    node_limit: Option<u64>,
    time_limit: Option<Duration>,
) -> SolveResult {
    let t0 = Instant::now();
    let incumbent = seed_schedule(instance);

    let mut search = Search::new(instance, &incumbent);
    search.node_limit = node_limit;
    search.deadline = time_limit.and_then(|limit| t0.checked_add(limit));
    let root_lb = search.lower_bound();

    if incumbent.makespan > root_lb {
        search.dfs();
    }

    let schedule = if search.best_makespan < incumbent.makespan {
        Schedule::new(search.best_ops.clone()).expect("complete schedules are non-empty")
    } else {
        incumbent
    };
    SolveResult {
        proven_optimal: !search.aborted || schedule.makespan == root_lb,
        schedule,
        elapsed: t0.elapsed(),
        nodes_explored: search.nodes,
    }
}
