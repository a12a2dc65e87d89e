//! Natural-language problem statements.
//!
//! Both styles share a preamble naming the instance size, then list every
//! operation either grouped by job or grouped by machine. The two renderings
//! carry identical information and parse back to the same instance.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

use super::{CodecError, NlStyle};
use crate::core::{JsspInstance, Operation};

static PREAMBLE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"Optimize schedule for\s+(\d+)\s+Jobs across\s+(\d+)\s+Machines").unwrap()
});
static JOB_HEADER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^Job\s+(\d+)\s+consists of the following Operations:$").unwrap());
static JOB_ITEM_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Operation\s+(\d+)\s+on\s+Machine\s+(\d+)\s+duration\s+(\d+)\s+mins\.$").unwrap()
});
static MACHINE_HEADER_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Machine\s+(\d+)\s+is used for the following Operations:$").unwrap()
});
static MACHINE_ITEM_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Job\s+(\d+)\s+Operation\s+(\d+)\s+duration\s+(\d+)\s+mins\.$").unwrap()
});

fn preamble(num_jobs: usize, num_machines: usize) -> String {
    format!(
        "Optimize schedule for {num_jobs} Jobs across {num_machines} Machines to minimize \
         makespan. Each job involves a series of Operations needing specific machines and \
         times. Operations are processed in order, without interruption, on a single Machine \
         at a time."
    )
}

pub fn emit_problem_nl(instance: &JsspInstance, style: NlStyle) -> String {
    let blocks: Vec<String> = match style {
        NlStyle::JobCentric => instance
            .jobs
            .iter()
            .enumerate()
            .map(|(j, ops)| {
                let mut block = format!(" Job {j} consists of the following Operations:");
                for (k, op) in ops.iter().enumerate() {
                    block.push_str(&format!(
                        "\n  Operation {k} on Machine {} duration {} mins.",
                        op.machine, op.duration
                    ));
                }
                block
            })
            .collect(),
        NlStyle::MachineCentric => (0..instance.num_machines)
            .map(|m| {
                let mut block = format!(" Machine {m} is used for the following Operations:");
                for (j, ops) in instance.jobs.iter().enumerate() {
                    for (k, op) in ops.iter().enumerate() {
                        if op.machine == m {
                            block.push_str(&format!(
                                "\n  Job {j} Operation {k} duration {} mins.",
                                op.duration
                            ));
                        }
                    }
                }
                block
            })
            .collect(),
    };
    format!(
        "{}\n\nProblem: \n\n{}\n",
        preamble(instance.num_jobs, instance.num_machines),
        blocks.join("\n\n\n")
    )
}

enum Block {
    Job(usize),
    Machine(usize),
}

/// Parse either style back into an instance. The style is detected from the
/// block headers; unrecognized prose lines are ignored, but an operation
/// line with no enclosing block is an error.
pub fn parse_problem_nl(text: &str) -> Result<JsspInstance, CodecError> {
    let caps = PREAMBLE_RE.captures(text).ok_or(CodecError::BadPreamble)?;
    let num_jobs: usize = caps[1].parse().map_err(|_| CodecError::BadPreamble)?;
    let num_machines: usize = caps[2].parse().map_err(|_| CodecError::BadPreamble)?;
    if num_jobs == 0 || num_machines == 0 {
        return Err(CodecError::BadPreamble);
    }

    // (job, op) -> (machine, duration), insertion order tracked for errors.
    let mut entries: HashMap<(usize, usize), (usize, u32)> = HashMap::new();
    let mut block: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if let Some(caps) = JOB_HEADER_RE.captures(line) {
            block = Some(Block::Job(caps[1].parse().map_err(|_| CodecError::BadPreamble)?));
        } else if let Some(caps) = MACHINE_HEADER_RE.captures(line) {
            block = Some(Block::Machine(
                caps[1].parse().map_err(|_| CodecError::BadPreamble)?,
            ));
        } else if let Some(caps) = JOB_ITEM_RE.captures(line) {
            let Some(Block::Job(job)) = block else {
                return Err(CodecError::OrphanLine { line: lineno });
            };
            let op: usize = caps[1].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            let machine: usize =
                caps[2].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            let duration: u32 =
                caps[3].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            if entries.insert((job, op), (machine, duration)).is_some() {
                return Err(CodecError::DuplicateOp { job, op });
            }
        } else if let Some(caps) = MACHINE_ITEM_RE.captures(line) {
            let Some(Block::Machine(machine)) = block else {
                return Err(CodecError::OrphanLine { line: lineno });
            };
            let job: usize = caps[1].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            let op: usize = caps[2].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            let duration: u32 =
                caps[3].parse().map_err(|_| CodecError::OrphanLine { line: lineno })?;
            if entries.insert((job, op), (machine, duration)).is_some() {
                return Err(CodecError::DuplicateOp { job, op });
            }
        }
    }

    for &(job, _) in entries.keys() {
        if job >= num_jobs {
            return Err(CodecError::JobIdOutOfRange { job, num_jobs });
        }
    }

    let mut jobs: Vec<Vec<Operation>> = Vec::with_capacity(num_jobs);
    for job in 0..num_jobs {
        let mut ops: Vec<(usize, usize, u32)> = entries
            .iter()
            .filter(|((j, _), _)| *j == job)
            .map(|(&(_, op), &(machine, duration))| (op, machine, duration))
            .collect();
        if ops.is_empty() {
            return Err(CodecError::MissingJob { job });
        }
        ops.sort_unstable();
        for (expected, &(op, _, _)) in ops.iter().enumerate() {
            if op != expected {
                return Err(CodecError::NonContiguousOps { job });
            }
        }
        let mut chain = Vec::with_capacity(ops.len());
        for (op, machine, duration) in ops {
            if machine >= num_machines {
                return Err(CodecError::InvalidMachine {
                    machine,
                    num_machines,
                });
            }
            if duration == 0 {
                return Err(CodecError::InvalidDuration { job, op });
            }
            chain.push(Operation { machine, duration });
        }
        jobs.push(chain);
    }

    Ok(JsspInstance::new(num_machines, jobs).expect("entries validated before construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{JsspInstance, Operation};
    use crate::testutil::example_3x3;

    const JOB_TEXT: &str = include_str!("../../tests/fixtures/problem_3x3_job.txt");
    const MACHINE_TEXT: &str = include_str!("../../tests/fixtures/problem_3x3_machine.txt");

    #[test]
    fn emits_job_centric_fixture() {
        assert_eq!(emit_problem_nl(&example_3x3(), NlStyle::JobCentric), JOB_TEXT);
    }

    #[test]
    fn emits_machine_centric_fixture() {
        assert_eq!(
            emit_problem_nl(&example_3x3(), NlStyle::MachineCentric),
            MACHINE_TEXT
        );
    }

    #[test]
    fn parses_both_styles_to_same_instance() {
        let a = parse_problem_nl(JOB_TEXT).unwrap();
        let b = parse_problem_nl(MACHINE_TEXT).unwrap();
        assert_eq!(a, example_3x3());
        assert_eq!(a, b);
    }

    #[test]
    fn round_trips_single_op_instance() {
        let inst = JsspInstance::new(
            1,
            vec![vec![Operation {
                machine: 0,
                duration: 7,
            }]],
        )
        .unwrap();
        for style in [NlStyle::JobCentric, NlStyle::MachineCentric] {
            let text = emit_problem_nl(&inst, style);
            assert_eq!(parse_problem_nl(&text).unwrap(), inst);
        }
    }

    #[test]
    fn tolerates_extra_prose() {
        let text = format!("Some chatter first.\n\n{JOB_TEXT}\nTrailing words.\n");
        assert_eq!(parse_problem_nl(&text).unwrap(), example_3x3());
    }

    #[test]
    fn missing_preamble() {
        assert_eq!(
            parse_problem_nl(" Job 0 consists of the following Operations:\n"),
            Err(CodecError::BadPreamble)
        );
    }

    #[test]
    fn duplicate_entry() {
        let text = JOB_TEXT.replace(
            "  Operation 1 on Machine 1 duration 29 mins.",
            "  Operation 1 on Machine 1 duration 29 mins.\n  Operation 1 on Machine 1 duration 29 mins.",
        );
        assert_eq!(
            parse_problem_nl(&text),
            Err(CodecError::DuplicateOp { job: 0, op: 1 })
        );
    }

    #[test]
    fn non_contiguous_ops() {
        let text = JOB_TEXT.replace(
            "  Operation 1 on Machine 1 duration 29 mins.",
            "  Operation 5 on Machine 1 duration 29 mins.",
        );
        assert_eq!(
            parse_problem_nl(&text),
            Err(CodecError::NonContiguousOps { job: 0 })
        );
    }

    #[test]
    fn orphan_operation_line() {
        let text = format!(
            "{}\n\nProblem: \n\n  Operation 0 on Machine 0 duration 5 mins.\n",
            super::preamble(1, 1)
        );
        assert!(matches!(
            parse_problem_nl(&text),
            Err(CodecError::OrphanLine { .. })
        ));
    }

    #[test]
    fn job_id_out_of_preamble_range() {
        let text = JOB_TEXT.replace(" Job 2 consists", " Job 7 consists");
        assert_eq!(
            parse_problem_nl(&text),
            Err(CodecError::JobIdOutOfRange { job: 7, num_jobs: 3 })
        );
    }
}
