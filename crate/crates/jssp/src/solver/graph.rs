//! Evaluation of machine-order solutions.
//!
//! A solution is represented as one processing sequence per machine. Job
//! chains plus those sequences form a DAG (or a cycle, making the orders
//! infeasible); earliest starts fall out of a longest-path pass.

use crate::core::{JsspInstance, Schedule, ScheduledOp};

/// One processing sequence of (job, op) per machine.
pub type MachineOrders = Vec<Vec<(usize, usize)>>;

/// Flat node ids: ops of job j occupy `base[j] .. base[j] + jobs[j].len()`.
pub(crate) struct OpIds {
    pub base: Vec<usize>,
    pub total: usize,
}

impl OpIds {
    pub fn new(instance: &JsspInstance) -> Self {
        let mut base = Vec::with_capacity(instance.num_jobs);
        let mut total = 0;
        for ops in &instance.jobs {
            base.push(total);
            total += ops.len();
        }
        Self { base, total }
    }

    pub fn id(&self, job: usize, op: usize) -> usize {
        self.base[job] + op
    }
}

pub(crate) struct Evaluation {
    pub starts: Vec<u32>,
    pub makespan: u32,
}

/// Earliest starts under job precedence plus `orders`, or None when the
/// combined constraints are cyclic.
pub(crate) fn evaluate(instance: &JsspInstance, orders: &MachineOrders) -> Option<Evaluation> {
    let ids = OpIds::new(instance);
    let n = ids.total;
    let mut duration = vec![0u32; n];
    let mut job_succ = vec![usize::MAX; n];
    let mut mach_succ = vec![usize::MAX; n];
    let mut indegree = vec![0u8; n];

    for (j, ops) in instance.jobs.iter().enumerate() {
        for (k, op) in ops.iter().enumerate() {
            let v = ids.id(j, k);
            duration[v] = op.duration;
            if k + 1 < ops.len() {
                job_succ[v] = v + 1;
                indegree[v + 1] += 1;
            }
        }
    }
    for seq in orders {
        for pair in seq.windows(2) {
            let a = ids.id(pair[0].0, pair[0].1);
            let b = ids.id(pair[1].0, pair[1].1);
            mach_succ[a] = b;
            indegree[b] += 1;
        }
    }

    let mut starts = vec![0u32; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut processed = 0;
    let mut makespan = 0;
    while let Some(v) = stack.pop() {
        processed += 1;
        let end = starts[v] + duration[v];
        makespan = makespan.max(end);
        for succ in [job_succ[v], mach_succ[v]] {
            if succ != usize::MAX {
                starts[succ] = starts[succ].max(end);
                indegree[succ] -= 1;
                if indegree[succ] == 0 {
                    stack.push(succ);
                }
            }
        }
    }
    (processed == n).then_some(Evaluation { starts, makespan })
}

/// Longest path from each op to the sink, counting the op itself. An op is
/// on a critical path iff `start + tail == makespan`.
pub(crate) fn tails(
    instance: &JsspInstance,
    orders: &MachineOrders,
    eval: &Evaluation,
) -> Vec<u32> {
    let ids = OpIds::new(instance);
    let n = ids.total;
    let mut duration = vec![0u32; n];
    let mut job_succ = vec![usize::MAX; n];
    let mut mach_succ = vec![usize::MAX; n];
    for (j, ops) in instance.jobs.iter().enumerate() {
        for (k, op) in ops.iter().enumerate() {
            let v = ids.id(j, k);
            duration[v] = op.duration;
            if k + 1 < ops.len() {
                job_succ[v] = v + 1;
            }
        }
    }
    for seq in orders {
        for pair in seq.windows(2) {
            mach_succ[ids.id(pair[0].0, pair[0].1)] = ids.id(pair[1].0, pair[1].1);
        }
    }

    // Durations are positive, so along any arc the successor starts strictly
    // later than its predecessor. Decreasing start time is therefore a
    // reverse topological order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((eval.starts[v], v)));
    let mut tail = vec![0u32; n];
    for &v in &order {
        let mut best = 0;
        for succ in [job_succ[v], mach_succ[v]] {
            if succ != usize::MAX {
                best = best.max(tail[succ]);
            }
        }
        tail[v] = duration[v] + best;
    }
    tail
}

/// Build the schedule induced by `orders`, or None when cyclic.
pub fn schedule_from_orders(instance: &JsspInstance, orders: &MachineOrders) -> Option<Schedule> {
    let eval = evaluate(instance, orders)?;
    let ids = OpIds::new(instance);
    let mut ops = Vec::with_capacity(ids.total);
    for (j, job_ops) in instance.jobs.iter().enumerate() {
        for (k, op) in job_ops.iter().enumerate() {
            ops.push(ScheduledOp::new(
                j,
                k,
                op.machine,
                eval.starts[ids.id(j, k)],
                op.duration,
            ));
        }
    }
    Some(Schedule::new(ops).expect("non-empty instance"))
}

/// Per-machine sequences recovered from a schedule, ordered by start time.
pub fn orders_from_schedule(instance: &JsspInstance, schedule: &Schedule) -> MachineOrders {
    let mut orders: MachineOrders = vec![Vec::new(); instance.num_machines];
    let mut sorted: Vec<&ScheduledOp> = schedule.ops.iter().collect();
    sorted.sort_by_key(|sop| (sop.start, sop.job, sop.op));
    for sop in sorted {
        orders[sop.machine].push((sop.job, sop.op));
    }
    orders
}
