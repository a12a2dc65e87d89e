//! Instance and schedule types shared by every other module.
//!
//! All times are integer minutes. Jobs, operations and machines are
//! 0-indexed everywhere; the one-decimal makespan seen in the text formats
//! is a rendering concern handled by `nlcodec`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("schedule contains no operations")]
    EmptySchedule,
    #[error("machine {machine} out of range for {num_machines} machines")]
    InvalidMachine { machine: usize, num_machines: usize },
    #[error("instance has no jobs")]
    NoJobs,
    #[error("job {job} has no operations")]
    EmptyJob { job: usize },
    #[error("job {job} operation {op} has zero duration")]
    ZeroDuration { job: usize, op: usize },
}

/// One step of a job: which machine it needs and for how long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub machine: usize,
    pub duration: u32,
}

/// A job-shop instance: per job, an ordered chain of operations.
///
/// `num_jobs` always equals `jobs.len()`; it is kept as a field because the
/// wire formats carry it explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsspInstance {
    pub num_jobs: usize,
    pub num_machines: usize,
    pub jobs: Vec<Vec<Operation>>,
}

impl JsspInstance {
    pub fn new(num_machines: usize, jobs: Vec<Vec<Operation>>) -> Result<Self, CoreError> {
        if jobs.is_empty() {
            return Err(CoreError::NoJobs);
        }
        for (j, ops) in jobs.iter().enumerate() {
            if ops.is_empty() {
                return Err(CoreError::EmptyJob { job: j });
            }
            for (k, op) in ops.iter().enumerate() {
                if op.machine >= num_machines {
                    return Err(CoreError::InvalidMachine {
                        machine: op.machine,
                        num_machines,
                    });
                }
                if op.duration == 0 {
                    return Err(CoreError::ZeroDuration { job: j, op: k });
                }
            }
        }
        Ok(Self {
            num_jobs: jobs.len(),
            num_machines,
            jobs,
        })
    }

    pub fn operation(&self, job: usize, op: usize) -> Option<Operation> {
        self.jobs.get(job).and_then(|ops| ops.get(op)).copied()
    }

    pub fn total_ops(&self) -> usize {
        self.jobs.iter().map(Vec::len).sum()
    }

    /// True when every job visits every machine exactly once, the shape the
    /// generator produces.
    pub fn is_permutation_form(&self) -> bool {
        self.jobs.iter().all(|ops| {
            if ops.len() != self.num_machines {
                return false;
            }
            let mut seen = vec![false; self.num_machines];
            for op in ops {
                if seen[op.machine] {
                    return false;
                }
                seen[op.machine] = true;
            }
            true
        })
    }

    /// Sum of job durations, per job. Useful as a trivial lower bound.
    pub fn job_totals(&self) -> Vec<u32> {
        self.jobs
            .iter()
            .map(|ops| ops.iter().map(|op| op.duration).sum())
            .collect()
    }
}

/// Total processing time an instance demands of one machine.
pub fn instance_total_work(instance: &JsspInstance, machine: usize) -> Result<u32, CoreError> {
    if machine >= instance.num_machines {
        return Err(CoreError::InvalidMachine {
            machine,
            num_machines: instance.num_machines,
        });
    }
    Ok(instance
        .jobs
        .iter()
        .flatten()
        .filter(|op| op.machine == machine)
        .map(|op| op.duration)
        .sum())
}

/// An operation placed in time. `end` is stored rather than derived so that
/// parsed solutions can carry whatever end value the text claimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledOp {
    pub job: usize,
    pub op: usize,
    pub machine: usize,
    pub start: u32,
    pub duration: u32,
    pub end: u32,
}

impl ScheduledOp {
    pub fn new(job: usize, op: usize, machine: usize, start: u32, duration: u32) -> Self {
        Self {
            job,
            op,
            machine,
            start,
            duration,
            end: start + duration,
        }
    }

    pub fn arithmetic_ok(&self) -> bool {
        self.end == self.start + self.duration
    }
}

/// Maximum completion time over a set of scheduled operations.
pub fn makespan_of(ops: &[ScheduledOp]) -> Result<u32, CoreError> {
    ops.iter()
        .map(|op| op.end)
        .max()
        .ok_or(CoreError::EmptySchedule)
}

/// A complete schedule with its cached makespan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub ops: Vec<ScheduledOp>,
    pub makespan: u32,
}

impl Schedule {
    pub fn new(ops: Vec<ScheduledOp>) -> Result<Self, CoreError> {
        let makespan = makespan_of(&ops)?;
        Ok(Self { ops, makespan })
    }

    /// True when `ops` contains exactly one entry per instance operation,
    /// with the machine and duration the instance prescribes.
    pub fn covers(&self, instance: &JsspInstance) -> bool {
        if self.ops.len() != instance.total_ops() {
            return false;
        }
        let mut seen: Vec<Vec<bool>> = instance
            .jobs
            .iter()
            .map(|ops| vec![false; ops.len()])
            .collect();
        for sop in &self.ops {
            match instance.operation(sop.job, sop.op) {
                Some(op) if op.machine == sop.machine && op.duration == sop.duration => {
                    if seen[sop.job][sop.op] {
                        return false;
                    }
                    seen[sop.job][sop.op] = true;
                }
                _ => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{example_3x3, example_3x3_ops};

    fn op(machine: usize, duration: u32) -> Operation {
        Operation { machine, duration }
    }

    #[test]
    fn makespan_of_full_example() {
        assert_eq!(makespan_of(&example_3x3_ops()), Ok(488));
    }

    #[test]
    fn makespan_of_single_op() {
        assert_eq!(makespan_of(&[ScheduledOp::new(0, 0, 0, 0, 5)]), Ok(5));
    }

    #[test]
    fn makespan_of_tied_ends() {
        let ops = [
            ScheduledOp::new(0, 0, 0, 0, 7),
            ScheduledOp::new(1, 0, 1, 3, 4),
        ];
        assert_eq!(makespan_of(&ops), Ok(7));
    }

    #[test]
    fn makespan_of_empty_is_error() {
        assert_eq!(makespan_of(&[]), Err(CoreError::EmptySchedule));
    }

    #[test]
    fn total_work_per_machine() {
        let inst = example_3x3();
        assert_eq!(instance_total_work(&inst, 0), Ok(105 + 213 + 78));
        assert_eq!(instance_total_work(&inst, 1), Ok(29 + 18 + 221));
        assert_eq!(instance_total_work(&inst, 2), Ok(213 + 193 + 74));
    }

    #[test]
    fn total_work_single_op_instance() {
        let inst = JsspInstance::new(1, vec![vec![op(0, 9)]]).unwrap();
        assert_eq!(instance_total_work(&inst, 0), Ok(9));
    }

    #[test]
    fn total_work_bad_machine() {
        let inst = example_3x3();
        assert_eq!(
            instance_total_work(&inst, 3),
            Err(CoreError::InvalidMachine {
                machine: 3,
                num_machines: 3
            })
        );
    }

    #[test]
    fn instance_rejects_bad_shapes() {
        assert_eq!(JsspInstance::new(1, vec![]), Err(CoreError::NoJobs));
        assert_eq!(
            JsspInstance::new(1, vec![vec![]]),
            Err(CoreError::EmptyJob { job: 0 })
        );
        assert_eq!(
            JsspInstance::new(1, vec![vec![op(1, 5)]]),
            Err(CoreError::InvalidMachine {
                machine: 1,
                num_machines: 1
            })
        );
        assert_eq!(
            JsspInstance::new(1, vec![vec![op(0, 0)]]),
            Err(CoreError::ZeroDuration { job: 0, op: 0 })
        );
    }

    #[test]
    fn permutation_form_detection() {
        assert!(example_3x3().is_permutation_form());
        let not_perm =
            JsspInstance::new(2, vec![vec![op(0, 1), op(0, 2)], vec![op(1, 3), op(0, 4)]])
                .unwrap();
        assert!(!not_perm.is_permutation_form());
    }

    #[test]
    fn schedule_covers_instance() {
        let inst = example_3x3();
        let sched = Schedule::new(example_3x3_ops()).unwrap();
        assert!(sched.covers(&inst));
        assert_eq!(sched.makespan, 488);

        let mut short = example_3x3_ops();
        short.pop();
        assert!(!Schedule::new(short).unwrap().covers(&inst));

        let mut dup = example_3x3_ops();
        dup[1] = dup[0];
        assert!(!Schedule::new(dup).unwrap().covers(&inst));
    }
}
