//! Dataset building and evaluation runs: the glue that turns instances into
//! training records and recorded or live model output into gap reports.

pub mod cli;
pub mod client;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::time::{Duration, SystemTime};

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::makespan_of;
use crate::evalkit::{evaluate_run, gap_percent, select_best, EvalOutcome, RunReport};
use crate::instgen::{derive_seed, generate_instance, GenSpec};
use crate::nlcodec::{
    emit_matrix, emit_problem_nl, emit_solution_nl, parse_matrix, parse_problem_nl,
    parse_solution_nl, user_turn, ChatRecord, NlStyle,
};
use crate::solver::solve_anytime;
use crate::validator::validate;

pub use client::{
    llm_complete, ChatRequest, ChatTransport, EndpointConfig, FnTransport, HttpTransport,
    ReplayTransport, SamplingParams, TransportError,
};

/// Seed-space separators so instance generation, solver seeds and prompt
/// draws never share a stream.
const SOLVER_SEED_SALT: u64 = 0x51;
const PROMPT_SEED_SALT: u64 = 0x9e;

/// One dataset line: everything needed to reproduce the chat record and to
/// re-check the solution against the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub num_jobs: usize,
    pub num_machines: usize,
    /// Matrix form, labeled with the solver makespan.
    pub matrix: String,
    pub problem_nl: String,
    pub solution_nl: String,
    pub makespan: u32,
    pub proven_optimal: bool,
    pub style: NlStyle,
    pub prompt_variant: usize,
}

impl DatasetRecord {
    /// Cross-check every redundant field against the others.
    pub fn self_validate(&self) -> Result<(), String> {
        let (instance, label) =
            parse_matrix(&self.matrix).map_err(|err| format!("matrix: {err}"))?;
        if instance.num_jobs != self.num_jobs || instance.num_machines != self.num_machines {
            return Err("matrix size disagrees with record fields".into());
        }
        if label != Some(f64::from(self.makespan)) {
            return Err(format!(
                "matrix label {label:?} disagrees with makespan {}",
                self.makespan
            ));
        }
        let from_nl =
            parse_problem_nl(&self.problem_nl).map_err(|err| format!("problem_nl: {err}"))?;
        if from_nl != instance {
            return Err("problem_nl and matrix describe different instances".into());
        }
        let parsed =
            parse_solution_nl(&self.solution_nl).map_err(|err| format!("solution_nl: {err}"))?;
        let report = validate(&instance, &parsed);
        if !report.feasible {
            return Err(format!(
                "solution_nl is infeasible: {:?}",
                report.violations.first().map(|v| v.kind)
            ));
        }
        if report.computed_makespan != Some(self.makespan) {
            return Err(format!(
                "solution_nl computes to {:?}, record says {}",
                report.computed_makespan, self.makespan
            ));
        }
        if self.prompt_variant >= crate::nlcodec::PROMPT_VARIANTS.len() {
            return Err(format!("prompt_variant {} out of range", self.prompt_variant));
        }
        Ok(())
    }

    /// The chat triple this record trains on.
    pub fn chat_record(&self) -> ChatRecord {
        ChatRecord {
            system: crate::nlcodec::SYSTEM_PROMPT.to_string(),
            user: user_turn(self.prompt_variant, &self.problem_nl),
            assistant: self.solution_nl.clone(),
            style: self.style,
            prompt_variant: self.prompt_variant,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub sizes: Vec<(usize, usize)>,
    pub count_per_size: usize,
    pub dur_min: u32,
    pub dur_max: u32,
    pub master_seed: u64,
    /// Per-instance solver budget.
    pub time_limit: Duration,
    pub style: NlStyle,
    /// Records held out into validation.jsonl, taken from the stream tail.
    pub validation_count: usize,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub master_seed: u64,
    pub sizes: Vec<String>,
    pub count_per_size: usize,
    pub dur_min: u32,
    pub dur_max: u32,
    pub time_limit_secs: f64,
    pub style: NlStyle,
    pub train_count: usize,
    pub validation_count: usize,
    pub skipped: usize,
    pub per_size: BTreeMap<String, usize>,
    pub proven_optimal_count: usize,
    /// Wall-clock stamp. Kept in its own field so that everything else in
    /// the output, JSONL files included, is byte-reproducible.
    pub created_unix_secs: u64,
}

fn in_worker_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    Ok(pool.install(job))
}

/// Generate, solve and serialize a dataset under `out_dir`: train.jsonl,
/// validation.jsonl and manifest.json. Instances the solver or serializer
/// cannot handle are logged and skipped; every emitted record self-validates.
pub fn build_dataset(config: &BuildConfig, out_dir: &Path) -> anyhow::Result<BuildManifest> {
    use rayon::prelude::*;

    if config.sizes.is_empty() || config.count_per_size == 0 {
        bail!("dataset needs at least one size and a positive count");
    }

    let mut tasks = Vec::with_capacity(config.sizes.len() * config.count_per_size);
    for (i, &(num_jobs, num_machines)) in config.sizes.iter().enumerate() {
        for c in 0..config.count_per_size {
            let index = (i * config.count_per_size + c) as u64;
            tasks.push((index, num_jobs, num_machines));
        }
    }

    let records: Vec<Option<DatasetRecord>> = in_worker_pool(config.workers, || {
        tasks
            .par_iter()
            .map(|&(index, num_jobs, num_machines)| {
                build_one(config, index, num_jobs, num_machines)
            })
            .collect()
    })?;

    let skipped = records.iter().filter(|r| r.is_none()).count();
    let records: Vec<DatasetRecord> = records.into_iter().flatten().collect();
    if records.is_empty() {
        bail!("no instance could be solved within the budget");
    }
    if config.validation_count > records.len() {
        bail!(
            "validation split of {} exceeds the {} built records",
            config.validation_count,
            records.len()
        );
    }

    let split_at = records.len() - config.validation_count;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    write_jsonl(&out_dir.join("train.jsonl"), &records[..split_at])?;
    write_jsonl(&out_dir.join("validation.jsonl"), &records[split_at..])?;

    let mut per_size = BTreeMap::new();
    for record in &records {
        *per_size
            .entry(format!("{}x{}", record.num_jobs, record.num_machines))
            .or_insert(0) += 1;
    }
    let manifest = BuildManifest {
        master_seed: config.master_seed,
        sizes: config
            .sizes
            .iter()
            .map(|(j, m)| format!("{j}x{m}"))
            .collect(),
        count_per_size: config.count_per_size,
        dur_min: config.dur_min,
        dur_max: config.dur_max,
        time_limit_secs: config.time_limit.as_secs_f64(),
        style: config.style,
        train_count: split_at,
        validation_count: config.validation_count,
        skipped,
        per_size,
        proven_optimal_count: records.iter().filter(|r| r.proven_optimal).count(),
        created_unix_secs: SystemTime::now()
            .duration_since(SystemTime::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

fn build_one(
    config: &BuildConfig,
    index: u64,
    num_jobs: usize,
    num_machines: usize,
) -> Option<DatasetRecord> {
    let id = format!("jssp_{num_jobs}x{num_machines}_{index:05}");
    let spec = GenSpec {
        num_jobs,
        num_machines,
        dur_min: config.dur_min,
        dur_max: config.dur_max,
        seed: derive_seed(config.master_seed, index),
    };
    let instance = match generate_instance(&spec) {
        Ok(instance) => instance,
        Err(err) => {
            log::warn!("{id}: generation failed: {err}");
            return None;
        }
    };

    let solver_seed = derive_seed(config.master_seed ^ SOLVER_SEED_SALT, index);
    let result = solve_anytime(&instance, config.time_limit, solver_seed);
    debug_assert_eq!(
        makespan_of(&result.schedule.ops).ok(),
        Some(result.schedule.makespan)
    );

    let solution_nl = match emit_solution_nl(&result.schedule, &instance) {
        Ok(text) => text,
        Err(err) => {
            log::warn!("{id}: solver output did not serialize: {err}");
            return None;
        }
    };
    let mut prompt_rng =
        ChaCha8Rng::seed_from_u64(derive_seed(config.master_seed ^ PROMPT_SEED_SALT, index));
    let record = DatasetRecord {
        id,
        num_jobs,
        num_machines,
        matrix: emit_matrix(&instance, Some(f64::from(result.schedule.makespan))),
        problem_nl: emit_problem_nl(&instance, config.style),
        solution_nl,
        makespan: result.schedule.makespan,
        proven_optimal: result.proven_optimal,
        style: config.style,
        prompt_variant: prompt_rng.random_range(0..crate::nlcodec::PROMPT_VARIANTS.len()),
    };
    match record.self_validate() {
        Ok(()) => Some(record),
        Err(err) => {
            log::warn!("{}: dropped inconsistent record: {err}", record.id);
            None
        }
    }
}

fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> anyhow::Result<()> {
    let mut out = Vec::new();
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.push(b'\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn load_dataset(path: &Path) -> anyhow::Result<Vec<DatasetRecord>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(line)
            .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        records.push(record);
    }
    Ok(records)
}

/// Reference makespans for gap computation, keyed by instance id.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Reference {
    pub makespan: u32,
    #[serde(default)]
    pub proven_optimal: bool,
}

pub fn load_references(path: &Path) -> anyhow::Result<HashMap<String, Reference>> {
    #[derive(Deserialize)]
    struct Line {
        id: String,
        makespan: u32,
        #[serde(default)]
        proven_optimal: bool,
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(line)
            .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        map.insert(
            parsed.id,
            Reference {
                makespan: parsed.makespan,
                proven_optimal: parsed.proven_optimal,
            },
        );
    }
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub params: SamplingParams,
    /// Gap charged to instances with no feasible candidate; None drops them
    /// from the gap statistics.
    pub penalty_gap: Option<f64>,
    pub workers: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            params: SamplingParams::default(),
            penalty_gap: None,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub sampling: SamplingParams,
    pub n_records: usize,
    pub n_skipped_missing_reference: usize,
    pub summary: RunReport,
    pub outcomes: Vec<EvalOutcome>,
}

/// Prompt every record (instruction variant 0 plus its problem text), pick
/// the best feasible candidate per instance and aggregate gaps against the
/// reference makespans. References default to each record's own label when
/// no explicit table is given; with a table, records absent from it are
/// skipped and counted. Candidate order, and so the whole report, is
/// deterministic for a deterministic transport.
pub fn run_eval(
    records: &[DatasetRecord],
    references: Option<&HashMap<String, Reference>>,
    transport: &dyn ChatTransport,
    config: &EvalConfig,
) -> anyhow::Result<EvalReport> {
    use rayon::prelude::*;

    config.params.validate()?;
    let results: Vec<Option<EvalOutcome>> = in_worker_pool(config.workers, || {
        records
            .par_iter()
            .map(|record| eval_one(record, references, transport, config))
            .collect::<Result<Vec<_>, _>>()
    })??;

    let n_records = records.len();
    let outcomes: Vec<EvalOutcome> = results.into_iter().flatten().collect();
    let n_skipped = n_records - outcomes.len();
    Ok(EvalReport {
        sampling: config.params,
        n_records,
        n_skipped_missing_reference: n_skipped,
        summary: evaluate_run(&outcomes, config.penalty_gap),
        outcomes,
    })
}

fn eval_one(
    record: &DatasetRecord,
    references: Option<&HashMap<String, Reference>>,
    transport: &dyn ChatTransport,
    config: &EvalConfig,
) -> anyhow::Result<Option<EvalOutcome>> {
    let reference = match references {
        Some(map) => match map.get(&record.id) {
            Some(reference) => *reference,
            None => {
                log::warn!("{}: no reference makespan, skipping", record.id);
                return Ok(None);
            }
        },
        None => Reference {
            makespan: record.makespan,
            proven_optimal: record.proven_optimal,
        },
    };

    let request = ChatRequest {
        id: record.id.clone(),
        system: crate::nlcodec::SYSTEM_PROMPT.to_string(),
        user: user_turn(0, &record.problem_nl),
        params: config.params,
    };
    let candidates = llm_complete(transport, &request)
        .with_context(|| format!("completing {}", record.id))?;

    let (instance, _) = parse_matrix(&record.matrix)
        .map_err(|err| anyhow::anyhow!("{}: bad matrix: {err}", record.id))?;
    let selection = select_best(&instance, &candidates);
    let best_makespan = selection.best.as_ref().map(|b| b.makespan);
    let gap = best_makespan
        .map(|mk| gap_percent(f64::from(mk), f64::from(reference.makespan)))
        .transpose()?;
    Ok(Some(EvalOutcome {
        id: record.id.clone(),
        n_candidates: selection.n_candidates,
        n_feasible: selection.n_feasible,
        best_makespan,
        reference_makespan: reference.makespan,
        reference_proven_optimal: reference.proven_optimal,
        gap_percent: gap,
    }))
}

pub const GRID_TOP_K: [usize; 3] = [10, 20, 50];
pub const GRID_TEMPERATURE: [f64; 4] = [0.2, 0.5, 0.7, 1.0];
pub const GRID_TOP_P: [f64; 3] = [0.8, 0.9, 0.95];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEntry {
    pub params: SamplingParams,
    pub summary: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub entries: Vec<GridEntry>,
    /// Parameters of the entry with the lowest mean gap; feasibility rate
    /// breaks ties, then grid order.
    pub best: SamplingParams,
}

/// Sweep the sampling grid, one full evaluation per combination.
pub fn run_grid(
    records: &[DatasetRecord],
    references: Option<&HashMap<String, Reference>>,
    transport: &dyn ChatTransport,
    config: &EvalConfig,
) -> anyhow::Result<GridReport> {
    let mut entries = Vec::new();
    for top_k in GRID_TOP_K {
        for temperature in GRID_TEMPERATURE {
            for top_p in GRID_TOP_P {
                let combo = EvalConfig {
                    params: SamplingParams {
                        n: config.params.n,
                        temperature,
                        top_k,
                        top_p,
                    },
                    ..config.clone()
                };
                let report = run_eval(records, references, transport, &combo)?;
                entries.push(GridEntry {
                    params: combo.params,
                    summary: report.summary,
                });
            }
        }
    }
    let best = entries
        .iter()
        .min_by(|a, b| {
            let mean = |e: &GridEntry| e.summary.gap_stats.map_or(f64::INFINITY, |s| s.mean);
            mean(a)
                .total_cmp(&mean(b))
                .then(b.summary.feasibility_rate.total_cmp(&a.summary.feasibility_rate))
        })
        .expect("grid is non-empty")
        .params;
    Ok(GridReport { entries, best })
}

/// Training-record view of a whole dataset, one chat triple per record.
pub fn chat_records(records: &[DatasetRecord]) -> Vec<ChatRecord> {
    records.iter().map(DatasetRecord::chat_record).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    use tempfile::tempdir;

    fn small_config() -> BuildConfig {
        BuildConfig {
            sizes: vec![(2, 2)],
            count_per_size: 5,
            dur_min: 1,
            dur_max: 99,
            master_seed: 7,
            time_limit: Duration::from_secs(5),
            style: NlStyle::MachineCentric,
            validation_count: 1,
            workers: 2,
        }
    }

    #[test]
    fn builds_and_splits_dataset() {
        let dir = tempdir().unwrap();
        let manifest = build_dataset(&small_config(), dir.path()).unwrap();
        assert_eq!(manifest.train_count, 4);
        assert_eq!(manifest.validation_count, 1);
        assert_eq!(manifest.skipped, 0);
        assert_eq!(manifest.per_size.get("2x2"), Some(&5));

        let train = load_dataset(&dir.path().join("train.jsonl")).unwrap();
        let val = load_dataset(&dir.path().join("validation.jsonl")).unwrap();
        assert_eq!(train.len(), 4);
        assert_eq!(val.len(), 1);
        for record in train.iter().chain(&val) {
            record.self_validate().unwrap();
            assert!(record
                .problem_nl
                .contains("is used for the following Operations"));
        }
    }

    #[test]
    fn dataset_bytes_are_reproducible() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        build_dataset(&small_config(), dir_a.path()).unwrap();
        build_dataset(&small_config(), dir_b.path()).unwrap();
        for name in ["train.jsonl", "validation.jsonl"] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical builds");
        }
    }

    #[test]
    fn eval_against_own_labels_is_perfect() {
        let dir = tempdir().unwrap();
        build_dataset(&small_config(), dir.path()).unwrap();
        let records = load_dataset(&dir.path().join("train.jsonl")).unwrap();

        let map: HashMap<String, Vec<String>> = records
            .iter()
            .map(|r| (r.id.clone(), vec![r.solution_nl.clone()]))
            .collect();
        let transport = ReplayTransport::new(map);
        let report = run_eval(&records, None, &transport, &EvalConfig::default()).unwrap();
        assert_eq!(report.summary.feasibility_rate, 1.0);
        let stats = report.summary.gap_stats.unwrap();
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.max, 0.0);
    }

    #[test]
    fn garbage_candidates_score_zero_feasibility() {
        let dir = tempdir().unwrap();
        build_dataset(&small_config(), dir.path()).unwrap();
        let records = load_dataset(&dir.path().join("train.jsonl")).unwrap();

        let transport = FnTransport(|req: &ChatRequest| {
            Ok(vec!["no schedule here".to_string(); req.params.n])
        });
        let report = run_eval(&records, None, &transport, &EvalConfig::default()).unwrap();
        assert_eq!(report.summary.feasibility_rate, 0.0);
        assert!(report.summary.gap_stats.is_none());
        assert_eq!(report.summary.n_no_feasible, records.len());
    }

    #[test]
    fn missing_references_are_skipped_and_counted() {
        let dir = tempdir().unwrap();
        build_dataset(&small_config(), dir.path()).unwrap();
        let records = load_dataset(&dir.path().join("train.jsonl")).unwrap();

        let mut refs = HashMap::new();
        refs.insert(
            records[0].id.clone(),
            Reference {
                makespan: records[0].makespan,
                proven_optimal: true,
            },
        );
        let map: HashMap<String, Vec<String>> = records
            .iter()
            .map(|r| (r.id.clone(), vec![r.solution_nl.clone()]))
            .collect();
        let transport = ReplayTransport::new(map);
        let report =
            run_eval(&records, Some(&refs), &transport, &EvalConfig::default()).unwrap();
        assert_eq!(report.n_skipped_missing_reference, records.len() - 1);
        assert_eq!(report.summary.n_instances, 1);
    }

    #[test]
    fn transport_errors_abort_the_run() {
        let dir = tempdir().unwrap();
        build_dataset(&small_config(), dir.path()).unwrap();
        let records = load_dataset(&dir.path().join("train.jsonl")).unwrap();
        let transport = FnTransport(|_: &ChatRequest| {
            Err(TransportError::EndpointUnavailable {
                attempts: 1,
                detail: "down".into(),
            })
        });
        assert!(run_eval(&records, None, &transport, &EvalConfig::default()).is_err());
    }

    #[test]
    fn chat_record_reconstruction() {
        let dir = tempdir().unwrap();
        build_dataset(&small_config(), dir.path()).unwrap();
        let records = load_dataset(&dir.path().join("train.jsonl")).unwrap();
        let chats = chat_records(&records);
        for (record, chat) in records.iter().zip(&chats) {
            assert!(chat.user.ends_with(&record.problem_nl));
            assert_eq!(chat.assistant, record.solution_nl);
            assert_eq!(chat.system, crate::nlcodec::SYSTEM_PROMPT);
        }
    }
}
