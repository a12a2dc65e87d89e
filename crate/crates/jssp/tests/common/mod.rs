//! Shared fixtures and helpers for the integration suites.
#![allow(dead_code)]

use jssp::core::{JsspInstance, Operation, ScheduledOp};
use jssp::instgen::{derive_seed, generate_instance, GenSpec};
use jssp::nlcodec::parse_solution_nl;

pub const FT06_MATRIX: &str = include_str!("../fixtures/ft06.jssp");
pub const PROBLEM_3X3_JOB: &str = include_str!("../fixtures/problem_3x3_job.txt");
pub const PROBLEM_3X3_MACHINE: &str = include_str!("../fixtures/problem_3x3_machine.txt");
pub const SOLUTION_3X3: &str = include_str!("../fixtures/solution_3x3.txt");

pub fn op(machine: usize, duration: u32) -> Operation {
    Operation { machine, duration }
}

/// The worked 3x3 example whose texts are pinned in the fixtures.
pub fn example_3x3() -> JsspInstance {
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

/// Random permutation-form instance, deterministic in (master_seed, index).
pub fn random_instance(
    num_jobs: usize,
    num_machines: usize,
    dur_min: u32,
    dur_max: u32,
    master_seed: u64,
    index: u64,
) -> JsspInstance {
    generate_instance(&GenSpec {
        num_jobs,
        num_machines,
        dur_min,
        dur_max,
        seed: derive_seed(master_seed, index),
    })
    .unwrap()
}

/// Render one solution body line exactly as the emitter does.
pub fn solution_line(op: &ScheduledOp) -> String {
    format!(
        " Job {} Operation {} on Machine {} : {} + {} -> {} \n",
        op.job, op.op, op.machine, op.start, op.duration, op.end
    )
}

/// Rebuild a solution text from mutated ops, keeping the original footer.
pub fn rebuild_solution(ops: &[ScheduledOp], original: &str) -> String {
    let footer = original
        .lines()
        .find(|l| l.contains("Makespan:"))
        .expect("solution text has a makespan footer");
    let mut text = String::from("Solution:\n\n");
    for op in ops {
        text.push_str(&solution_line(op));
    }
    text.push('\n');
    text.push_str(footer);
    text.push('\n');
    text
}

pub fn parsed_ops(solution_text: &str) -> Vec<ScheduledOp> {
    parse_solution_nl(solution_text).expect("solution parses").ops
}

/// The five ways the mutation suite corrupts a solution text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    OverlapShift,
    PrecedenceInversion,
    DurationEdit,
    LineDeletion,
    LineDuplication,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::OverlapShift,
        Mutation::PrecedenceInversion,
        Mutation::DurationEdit,
        Mutation::LineDeletion,
        Mutation::LineDuplication,
    ];
}

/// Corrupt a feasible solution text. Needs at least two operations for the
/// structural mutations, which permutation-form instances with two or more
/// jobs always provide.
pub fn mutate_solution(text: &str, mutation: Mutation) -> String {
    let mut ops = parsed_ops(text);
    match mutation {
        Mutation::OverlapShift => {
            // Pull some machine-mate onto another op's start time.
            let (a, b) = same_machine_pair(&ops);
            ops[b].start = ops[a].start;
            ops[b].end = ops[b].start + ops[b].duration;
            rebuild_solution(&ops, text)
        }
        Mutation::PrecedenceInversion => {
            let (a, b) = same_job_pair(&ops);
            let (sa, sb) = (ops[a].start, ops[b].start);
            ops[a].start = sb;
            ops[a].end = sb + ops[a].duration;
            ops[b].start = sa;
            ops[b].end = sa + ops[b].duration;
            rebuild_solution(&ops, text)
        }
        Mutation::DurationEdit => {
            ops[0].duration += 1;
            ops[0].end = ops[0].start + ops[0].duration;
            rebuild_solution(&ops, text)
        }
        Mutation::LineDeletion => drop_op_line(text, 0, false),
        Mutation::LineDuplication => drop_op_line(text, 0, true),
    }
}

fn same_machine_pair(ops: &[ScheduledOp]) -> (usize, usize) {
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate().skip(i + 1) {
            if a.machine == b.machine {
                return if a.start <= b.start { (i, j) } else { (j, i) };
            }
        }
    }
    panic!("no two operations share a machine");
}

fn same_job_pair(ops: &[ScheduledOp]) -> (usize, usize) {
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate().skip(i + 1) {
            if a.job == b.job {
                return if a.op < b.op { (i, j) } else { (j, i) };
            }
        }
    }
    panic!("no job has two operations");
}

fn drop_op_line(text: &str, op_index: usize, duplicate: bool) -> String {
    let mut seen = 0usize;
    let mut out = String::new();
    for line in text.lines() {
        let is_op_line = line.contains("->");
        if is_op_line && seen == op_index {
            if duplicate {
                out.push_str(line);
                out.push('\n');
                out.push_str(line);
                out.push('\n');
            }
            seen += 1;
            continue;
        }
        if is_op_line {
            seen += 1;
        }
        out.push_str(line);
        out.push('\n');
    }
    assert!(seen > op_index, "no operation line to mutate");
    out
}
