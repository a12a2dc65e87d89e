//! Compact matrix form: a header line `num_jobs num_machines`, one line per
//! job of whitespace-separated `machine duration` pairs, and optionally a
//! final line holding the reference makespan with one decimal.

use super::CodecError;
use crate::core::{JsspInstance, Operation};

pub fn emit_matrix(instance: &JsspInstance, makespan: Option<f64>) -> String {
    let mut out = format!("{} {}\n", instance.num_jobs, instance.num_machines);
    for ops in &instance.jobs {
        let row: Vec<String> = ops
            .iter()
            .flat_map(|op| [op.machine.to_string(), op.duration.to_string()])
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(mk) = makespan {
        out.push_str(&format!("{mk:.1}\n"));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<(JsspInstance, Option<f64>), CodecError> {
    // Keep 1-based source line numbers for error reporting, skip blanks.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let (_, header) = lines
        .first()
        .ok_or_else(|| CodecError::BadHeader("empty input".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(CodecError::BadHeader(format!(
            "expected 2 fields, found {}",
            head.len()
        )));
    }
    let num_jobs: usize = head[0]
        .parse()
        .map_err(|_| CodecError::BadHeader(format!("bad job count: {}", head[0])))?;
    let num_machines: usize = head[1]
        .parse()
        .map_err(|_| CodecError::BadHeader(format!("bad machine count: {}", head[1])))?;
    if num_jobs == 0 || num_machines == 0 {
        return Err(CodecError::BadHeader("zero jobs or machines".into()));
    }

    let rows = &lines[1..];
    if rows.len() < num_jobs {
        return Err(CodecError::MissingJobRows {
            expected: num_jobs,
            found: rows.len(),
        });
    }

    let mut jobs = Vec::with_capacity(num_jobs);
    for &(line, row) in &rows[..num_jobs] {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.is_empty() || tokens.len() % 2 != 0 {
            return Err(CodecError::BadJobRow {
                line,
                detail: format!("{} tokens, expected a positive even count", tokens.len()),
            });
        }
        let mut ops = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks(2) {
            let machine: usize = pair[0].parse().map_err(|_| CodecError::BadJobRow {
                line,
                detail: format!("bad machine id: {}", pair[0]),
            })?;
            let duration: u32 = pair[1].parse().map_err(|_| CodecError::BadJobRow {
                line,
                detail: format!("bad duration: {}", pair[1]),
            })?;
            if machine >= num_machines {
                return Err(CodecError::InvalidMachine {
                    machine,
                    num_machines,
                });
            }
            if duration == 0 {
                return Err(CodecError::BadJobRow {
                    line,
                    detail: "zero duration".into(),
                });
            }
            ops.push(Operation { machine, duration });
        }
        jobs.push(ops);
    }

    let makespan = match rows.get(num_jobs) {
        None => None,
        Some(&(line, tail)) => {
            if rows.len() > num_jobs + 1 {
                return Err(CodecError::TrailingContent {
                    line: rows[num_jobs + 1].0,
                });
            }
            let value: f64 = tail
                .parse()
                .map_err(|_| CodecError::TrailingContent { line })?;
            Some(value)
        }
    };

    let instance =
        JsspInstance::new(num_machines, jobs).expect("rows validated before construction");
    Ok((instance, makespan))
}
