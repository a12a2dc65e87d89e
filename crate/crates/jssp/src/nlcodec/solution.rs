//! Solution text: one line per operation with its placement arithmetic,
//! sorted by start time, then a closing makespan line.

use std::sync::LazyLock;

use regex::Regex;

use super::{CodecError, ParsedSolution};
use crate::core::{JsspInstance, Schedule, ScheduledOp};

static OP_LINE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"Job\s+(\d+)\s+Operation\s+(\d+)\s+on\s+Machine\s+(\d+)\s*:\s*(\d+)\s*\+\s*(\d+)\s*->\s*(\d+)",
    )
    .unwrap()
});
static MAKESPAN_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"Makespan:\s*([0-9]+(?:\.[0-9]+)?)").unwrap());

/// Render a complete schedule. Operations are listed by start time (machine
/// id breaks ties); the closing line names the operation index achieving the
/// makespan, taking the last such line when several end together.
pub fn emit_solution_nl(schedule: &Schedule, instance: &JsspInstance) -> Result<String, CodecError> {
    check_coverage(schedule, instance)?;

    let mut ops: Vec<&ScheduledOp> = schedule.ops.iter().collect();
    ops.sort_by_key(|op| (op.start, op.machine));

    let mut out = String::from("Solution:\n\n");
    let mut peak_op_index = 0;
    for op in &ops {
        out.push_str(&format!(
            " Job {} Operation {} on Machine {} : {} + {} -> {} \n",
            op.job, op.op, op.machine, op.start, op.duration, op.end
        ));
        if op.end == schedule.makespan {
            peak_op_index = op.op;
        }
    }
    out.push_str(&format!(
        "\nMakespan:  {:.1}, as it is the maximum end completion time of Operation {}\n",
        schedule.makespan as f64, peak_op_index
    ));
    Ok(out)
}

fn check_coverage(schedule: &Schedule, instance: &JsspInstance) -> Result<(), CodecError> {
    let mut seen: Vec<Vec<bool>> = instance
        .jobs
        .iter()
        .map(|ops| vec![false; ops.len()])
        .collect();
    for sop in &schedule.ops {
        let Some(op) = instance.operation(sop.job, sop.op) else {
            return Err(CodecError::CoverageError {
                detail: format!("job {} operation {} is not in the instance", sop.job, sop.op),
            });
        };
        if op.machine != sop.machine || op.duration != sop.duration {
            return Err(CodecError::CoverageError {
                detail: format!(
                    "job {} operation {} disagrees with the instance on machine or duration",
                    sop.job, sop.op
                ),
            });
        }
        if seen[sop.job][sop.op] {
            return Err(CodecError::CoverageError {
                detail: format!("job {} operation {} appears twice", sop.job, sop.op),
            });
        }
        seen[sop.job][sop.op] = true;
    }
    if schedule.ops.len() != instance.total_ops() {
        return Err(CodecError::CoverageError {
            detail: format!(
                "{} operations scheduled, instance has {}",
                schedule.ops.len(),
                instance.total_ops()
            ),
        });
    }
    Ok(())
}

/// Scrape operation lines and a claimed makespan out of arbitrary text.
/// Claimed end values are kept verbatim; inconsistent ones are flagged in
/// `arithmetic_defects`. When the text states several makespans the last
/// one wins. Fails only when no operation line is found at all.
pub fn parse_solution_nl(text: &str) -> Result<ParsedSolution, CodecError> {
    let mut ops = Vec::new();
    let mut arithmetic_defects = Vec::new();
    for caps in OP_LINE_RE.captures_iter(text) {
        let fields: Option<(usize, usize, usize, u32, u32, u32)> = (|| {
            Some((
                caps[1].parse().ok()?,
                caps[2].parse().ok()?,
                caps[3].parse().ok()?,
                caps[4].parse().ok()?,
                caps[5].parse().ok()?,
                caps[6].parse().ok()?,
            ))
        })();
        // A line whose numbers do not fit the integer types is treated as
        // prose rather than a reason to fail the whole parse.
        let Some((job, op, machine, start, duration, end)) = fields else {
            continue;
        };
        let index = ops.len();
        ops.push(ScheduledOp {
            job,
            op,
            machine,
            start,
            duration,
            end,
        });
        if u64::from(start) + u64::from(duration) != u64::from(end) {
            arithmetic_defects.push(index);
        }
    }
    if ops.is_empty() {
        return Err(CodecError::NoOperationsFound);
    }
    let claimed_makespan = MAKESPAN_RE
        .captures_iter(text)
        .last()
        .and_then(|caps| caps[1].parse().ok());
    Ok(ParsedSolution {
        ops,
        claimed_makespan,
        arithmetic_defects,
    })
}
