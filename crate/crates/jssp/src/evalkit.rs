//! Best-of-N candidate selection and gap statistics.

use serde::Serialize;
use thiserror::Error;

use crate::core::{JsspInstance, Schedule};
use crate::nlcodec::parse_solution_nl;
use crate::validator::validate;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("reference makespan must be positive, got {0}")]
    InvalidReference(f64),
    #[error("no values to summarize")]
    EmptyInput,
}

/// Relative regret in percent: how far `makespan` is above `reference`.
pub fn gap_percent(makespan: f64, reference: f64) -> Result<f64, EvalError> {
    if reference <= 0.0 {
        return Err(EvalError::InvalidReference(reference));
    }
    Ok(100.0 * (makespan - reference) / reference)
}

/// The winning candidate of a best-of-N draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestCandidate {
    /// Position in the original candidate list.
    pub index: usize,
    pub makespan: u32,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub n_candidates: usize,
    pub n_feasible: usize,
    pub best: Option<BestCandidate>,
}

/// Parse and validate every candidate text, keeping the feasible one with
/// the smallest computed makespan; ties go to the earliest candidate. The
/// makespan a candidate claims for itself is ignored for ranking.
pub fn select_best(instance: &JsspInstance, candidates: &[String]) -> Selection {
    let mut n_feasible = 0;
    let mut best: Option<BestCandidate> = None;
    for (index, text) in candidates.iter().enumerate() {
        let Ok(parsed) = parse_solution_nl(text) else {
            continue;
        };
        let report = validate(instance, &parsed);
        if !report.feasible {
            continue;
        }
        let Some(makespan) = report.computed_makespan else {
            continue;
        };
        n_feasible += 1;
        if best.as_ref().is_none_or(|b| makespan < b.makespan) {
            let schedule = Schedule::new(parsed.ops).expect("feasible candidate has ops");
            best = Some(BestCandidate {
                index,
                makespan,
                schedule,
            });
        }
    }
    Selection {
        n_candidates: candidates.len(),
        n_feasible,
        best,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Descriptive statistics over a set of gaps: sample standard deviation
/// (n-1 divisor, 0 for a single value) and linearly interpolated quartiles.
pub fn summarize_gaps(gaps: &[f64]) -> Result<GapStats, EvalError> {
    if gaps.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = gaps.len();
    let mut sorted = gaps.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("gaps are finite"));
    // Sum in sorted order so the result does not depend on input order.
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let var = sorted.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    Ok(GapStats {
        count: n,
        mean,
        std,
        min: sorted[0],
        p25: quantile(&sorted, 0.25),
        p50: quantile(&sorted, 0.50),
        p75: quantile(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

/// One instance's outcome in an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutcome {
    pub id: String,
    pub n_candidates: usize,
    pub n_feasible: usize,
    pub best_makespan: Option<u32>,
    pub reference_makespan: u32,
    pub reference_proven_optimal: bool,
    pub gap_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n_instances: usize,
    /// Instances where no candidate was feasible.
    pub n_no_feasible: usize,
    /// Fraction of instances with at least one feasible candidate.
    pub feasibility_rate: f64,
    /// Gap statistics; None when no instance contributed a gap.
    pub gap_stats: Option<GapStats>,
}

/// Aggregate per-instance outcomes. Instances without a feasible candidate
/// normally drop out of the gap statistics and show up only in the
/// feasibility rate; passing `penalty_gap` instead charges them that gap.
pub fn evaluate_run(outcomes: &[EvalOutcome], penalty_gap: Option<f64>) -> RunReport {
    let n_instances = outcomes.len();
    let mut gaps = Vec::with_capacity(n_instances);
    let mut n_no_feasible = 0;
    for outcome in outcomes {
        match outcome.gap_percent {
            Some(gap) => gaps.push(gap),
            None => {
                n_no_feasible += 1;
                if let Some(penalty) = penalty_gap {
                    gaps.push(penalty);
                }
            }
        }
    }
    RunReport {
        n_instances,
        n_no_feasible,
        feasibility_rate: if n_instances == 0 {
            0.0
        } else {
            (n_instances - n_no_feasible) as f64 / n_instances as f64
        },
        gap_stats: summarize_gaps(&gaps).ok(),
    }
}

/// Fixed-width text rendering of the summary rows.
pub fn render_stats_table(stats: &GapStats) -> String {
    let rows = [
        ("count", format!("{}", stats.count)),
        ("mean", format!("{:.2}", stats.mean)),
        ("std", format!("{:.2}", stats.std)),
        ("min", format!("{:.2}", stats.min)),
        ("25%", format!("{:.2}", stats.p25)),
        ("50%", format!("{:.2}", stats.p50)),
        ("75%", format!("{:.2}", stats.p75)),
        ("max", format!("{:.2}", stats.max)),
    ];
    let width = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(label, value)| format!("{label:<6}{value:>width$}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::example_3x3;

    const SOLUTION: &str = include_str!("../tests/fixtures/solution_3x3.txt");

    #[test]
    fn gap_basics() {
        assert_eq!(gap_percent(100.0, 100.0), Ok(0.0));
        assert_eq!(gap_percent(110.0, 100.0), Ok(10.0));
        assert_eq!(gap_percent(55.0, 55.0), Ok(0.0));
        assert_eq!(gap_percent(50.0, 0.0), Err(EvalError::InvalidReference(0.0)));
        assert_eq!(
            gap_percent(50.0, -1.0),
            Err(EvalError::InvalidReference(-1.0))
        );
    }

    #[test]
    fn summarize_two_values() {
        let stats = summarize_gaps(&[0.0, 10.0]).unwrap();
        assert_eq!(stats.count, 2);
        assert_eq!(stats.mean, 5.0);
        assert!((stats.std - 7.0711).abs() < 1e-3);
        assert_eq!(stats.min, 0.0);
        assert_eq!(stats.p25, 2.5);
        assert_eq!(stats.p50, 5.0);
        assert_eq!(stats.p75, 7.5);
        assert_eq!(stats.max, 10.0);
    }

    #[test]
    fn summarize_singleton() {
        let stats = summarize_gaps(&[4.0]).unwrap();
        assert_eq!(stats.count, 1);
        assert_eq!(stats.mean, 4.0);
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.p25, 4.0);
        assert_eq!(stats.p50, 4.0);
        assert_eq!(stats.p75, 4.0);
    }

    #[test]
    fn summarize_empty_is_error() {
        assert_eq!(summarize_gaps(&[]), Err(EvalError::EmptyInput));
    }

    #[test]
    fn summarize_is_permutation_invariant() {
        let a = summarize_gaps(&[3.0, 1.0, 4.0, 1.0, 5.0]).unwrap();
        let b = summarize_gaps(&[5.0, 1.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn select_best_takes_reference_solution() {
        let selection = select_best(&example_3x3(), &[SOLUTION.to_string()]);
        assert_eq!(selection.n_candidates, 1);
        assert_eq!(selection.n_feasible, 1);
        let best = selection.best.unwrap();
        assert_eq!(best.index, 0);
        assert_eq!(best.makespan, 488);
    }

    #[test]
    fn select_best_skips_garbage() {
        let candidates = vec!["total nonsense".to_string(), SOLUTION.to_string()];
        let selection = select_best(&example_3x3(), &candidates);
        assert_eq!(selection.n_candidates, 2);
        assert_eq!(selection.n_feasible, 1);
        assert_eq!(selection.best.unwrap().index, 1);
    }

    #[test]
    fn select_best_empty_list() {
        let selection = select_best(&example_3x3(), &[]);
        assert_eq!(selection.n_candidates, 0);
        assert_eq!(selection.n_feasible, 0);
        assert!(selection.best.is_none());
    }

    #[test]
    fn select_best_ignores_claimed_makespan_for_ranking() {
        // Same schedule, but one candidate claims a tiny makespan. The
        // claim must not make it rank better: ties resolve to index 0.
        let lying = SOLUTION.replace("Makespan:  488.0", "Makespan:  1.0");
        let selection = select_best(&example_3x3(), &[SOLUTION.to_string(), lying]);
        assert_eq!(selection.n_feasible, 2);
        assert_eq!(selection.best.unwrap().index, 0);
    }

    #[test]
    fn evaluate_run_aggregates() {
        let outcome = |id: &str, gap: Option<f64>| EvalOutcome {
            id: id.to_string(),
            n_candidates: 1,
            n_feasible: usize::from(gap.is_some()),
            best_makespan: gap.map(|_| 100),
            reference_makespan: 100,
            reference_proven_optimal: true,
            gap_percent: gap,
        };
        let report = evaluate_run(
            &[outcome("a", Some(0.0)), outcome("b", Some(0.0))],
            None,
        );
        assert_eq!(report.feasibility_rate, 1.0);
        let stats = report.gap_stats.unwrap();
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.std, 0.0);

        let report = evaluate_run(&[outcome("a", Some(10.0)), outcome("b", None)], None);
        assert_eq!(report.feasibility_rate, 0.5);
        assert_eq!(report.n_no_feasible, 1);
        assert_eq!(report.gap_stats.unwrap().count, 1);

        let report = evaluate_run(&[outcome("a", Some(10.0)), outcome("b", None)], Some(100.0));
        assert_eq!(report.gap_stats.unwrap().mean, 55.0);

        let report = evaluate_run(&[outcome("b", None)], None);
        assert_eq!(report.feasibility_rate, 0.0);
        assert!(report.gap_stats.is_none());
    }

    #[test]
    fn table_has_exact_row_labels() {
        let stats = summarize_gaps(&[0.0, 10.0]).unwrap();
        let table = render_stats_table(&stats);
        let labels: Vec<&str> = table
            .lines()
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        assert_eq!(
            labels,
            vec!["count", "mean", "std", "min", "25%", "50%", "75%", "max"]
        );
        assert!(table.contains("5.00"));
        assert!(table.contains("7.07"));
    }
}
