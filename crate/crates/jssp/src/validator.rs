//! Schedule validation against an instance.
//!
//! Boundary touches are legal on both machines and job chains: an operation
//! may start exactly when its predecessor ends. Feasibility requires every
//! instance operation to appear exactly once with correct machine, duration
//! and arithmetic, free of overlaps and precedence faults. A wrong claimed
//! makespan is reported but does not make an otherwise valid schedule
//! infeasible; the computed value is authoritative.

use serde::Serialize;

use crate::core::{JsspInstance, ScheduledOp};
use crate::nlcodec::ParsedSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    WrongMachine,
    WrongDuration,
    MachineOverlap,
    PrecedenceViolation,
    MissingOperation,
    DuplicateOperation,
    UnknownOperation,
    MakespanMismatch,
    ArithmeticDefect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ViolationSubject {
    Op {
        job: usize,
        op: usize,
    },
    MachinePair {
        machine: usize,
        first: (usize, usize),
        second: (usize, usize),
    },
    Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: ViolationSubject,
    pub detail: String,
}

impl Violation {
    fn op(kind: ViolationKind, job: usize, op: usize, detail: String) -> Self {
        Self {
            kind,
            subject: ViolationSubject::Op { job, op },
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Max end over the parsed operations; present only when the schedule
    /// covers the instance exactly (no missing, duplicate or unknown ops).
    pub computed_makespan: Option<u32>,
}

/// Per-operation checks: known (job, op), correct machine and duration,
/// and exact coverage of the instance.
pub fn check_operations(instance: &JsspInstance, parsed: &ParsedSolution) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut counts: Vec<Vec<usize>> = instance
        .jobs
        .iter()
        .map(|ops| vec![0; ops.len()])
        .collect();

    for sop in &parsed.ops {
        match instance.operation(sop.job, sop.op) {
            None => violations.push(Violation::op(
                ViolationKind::UnknownOperation,
                sop.job,
                sop.op,
                format!("job {} operation {} is not part of the instance", sop.job, sop.op),
            )),
            Some(expected) => {
                counts[sop.job][sop.op] += 1;
                if sop.machine != expected.machine {
                    violations.push(Violation::op(
                        ViolationKind::WrongMachine,
                        sop.job,
                        sop.op,
                        format!("expected machine {}, got {}", expected.machine, sop.machine),
                    ));
                }
                if sop.duration != expected.duration {
                    violations.push(Violation::op(
                        ViolationKind::WrongDuration,
                        sop.job,
                        sop.op,
                        format!(
                            "expected duration {}, got {}",
                            expected.duration, sop.duration
                        ),
                    ));
                }
            }
        }
    }

    for (job, job_counts) in counts.iter().enumerate() {
        for (op, &count) in job_counts.iter().enumerate() {
            if count == 0 {
                violations.push(Violation::op(
                    ViolationKind::MissingOperation,
                    job,
                    op,
                    "operation never scheduled".into(),
                ));
            } else if count > 1 {
                violations.push(Violation::op(
                    ViolationKind::DuplicateOperation,
                    job,
                    op,
                    format!("operation scheduled {count} times"),
                ));
            }
        }
    }
    violations
}

/// Overlap detection per machine. Ops are ordered by start time; each must
/// start no earlier than the previous one ends.
pub fn check_machine_conflicts(parsed: &ParsedSolution) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut machines: Vec<usize> = parsed.ops.iter().map(|op| op.machine).collect();
    machines.sort_unstable();
    machines.dedup();

    for machine in machines {
        let mut ops: Vec<&ScheduledOp> = parsed
            .ops
            .iter()
            .filter(|op| op.machine == machine)
            .collect();
        ops.sort_by_key(|op| (op.start, op.end, op.job, op.op));
        for pair in ops.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.end > b.start {
                violations.push(Violation {
                    kind: ViolationKind::MachineOverlap,
                    subject: ViolationSubject::MachinePair {
                        machine,
                        first: (a.job, a.op),
                        second: (b.job, b.op),
                    },
                    detail: format!(
                        "job {} op {} runs [{}, {}) and job {} op {} starts at {}",
                        a.job, a.op, a.start, a.end, b.job, b.op, b.start
                    ),
                });
            }
        }
    }
    violations
}

/// Job-order checks: within each job, an operation may start only after the
/// previous listed operation ends (equality allowed).
pub fn check_precedence(parsed: &ParsedSolution) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut jobs: Vec<usize> = parsed.ops.iter().map(|op| op.job).collect();
    jobs.sort_unstable();
    jobs.dedup();

    for job in jobs {
        let mut ops: Vec<&ScheduledOp> = parsed.ops.iter().filter(|op| op.job == job).collect();
        ops.sort_by_key(|op| (op.op, op.start));
        for pair in ops.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.op == b.op {
                // Duplicate entries are reported by check_operations.
                continue;
            }
            if a.end > b.start {
                violations.push(Violation::op(
                    ViolationKind::PrecedenceViolation,
                    job,
                    b.op,
                    format!(
                        "operation {} starts at {} before operation {} ends at {}",
                        b.op, b.start, a.op, a.end
                    ),
                ));
            }
        }
    }
    violations
}

pub fn validate(instance: &JsspInstance, parsed: &ParsedSolution) -> ValidationReport {
    let mut violations = check_operations(instance, parsed);
    violations.extend(check_machine_conflicts(parsed));
    violations.extend(check_precedence(parsed));

    for (index, sop) in parsed.ops.iter().enumerate() {
        if !sop.arithmetic_ok() {
            violations.push(Violation::op(
                ViolationKind::ArithmeticDefect,
                sop.job,
                sop.op,
                format!(
                    "line {}: {} + {} does not equal {}",
                    index, sop.start, sop.duration, sop.end
                ),
            ));
        }
    }

    let coverage_clean = !violations.iter().any(|v| {
        matches!(
            v.kind,
            ViolationKind::MissingOperation
                | ViolationKind::DuplicateOperation
                | ViolationKind::UnknownOperation
        )
    });
    let computed_makespan = if coverage_clean {
        parsed.ops.iter().map(|op| op.end).max()
    } else {
        None
    };

    if let (Some(claimed), Some(computed)) = (parsed.claimed_makespan, computed_makespan) {
        if claimed != f64::from(computed) {
            violations.push(Violation {
                kind: ViolationKind::MakespanMismatch,
                subject: ViolationSubject::Schedule,
                detail: format!("claimed {claimed}, computed {computed}"),
            });
        }
    }

    let feasible = violations
        .iter()
        .all(|v| v.kind == ViolationKind::MakespanMismatch);
    ValidationReport {
        feasible,
        violations,
        computed_makespan,
    }
}
