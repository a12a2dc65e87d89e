//! Shared fixtures for unit tests.

use crate::core::{JsspInstance, Operation, Schedule, ScheduledOp};

fn op(machine: usize, duration: u32) -> Operation {
    Operation { machine, duration }
}

/// 3 jobs, 3 machines; optimal makespan 488.
pub(crate) fn example_3x3() -> JsspInstance {
    JsspInstance::new(
        3,
        vec![
            vec![op(0, 105), op(1, 29), op(2, 213)],
            vec![op(2, 193), op(1, 18), op(0, 213)],
            vec![op(0, 78), op(2, 74), op(1, 221)],
        ],
    )
    .unwrap()
}

/// An optimal placement of `example_3x3`, makespan 488.
pub(crate) fn example_3x3_ops() -> Vec<ScheduledOp> {
    vec![
        ScheduledOp::new(2, 0, 0, 0, 78),
        ScheduledOp::new(1, 0, 2, 0, 193),
        ScheduledOp::new(0, 0, 0, 78, 105),
        ScheduledOp::new(0, 1, 1, 183, 29),
        ScheduledOp::new(2, 1, 2, 193, 74),
        ScheduledOp::new(1, 1, 1, 212, 18),
        ScheduledOp::new(1, 2, 0, 230, 213),
        ScheduledOp::new(2, 2, 1, 267, 221),
        ScheduledOp::new(0, 2, 2, 267, 213),
    ]
}

pub(crate) fn example_3x3_schedule() -> Schedule {
    Schedule::new(example_3x3_ops()).unwrap()
}
