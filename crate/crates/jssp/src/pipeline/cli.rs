//! Command-line front end. Exit codes: 0 success, 1 operational error,
//! 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::core::JsspInstance;
use crate::evalkit::{render_stats_table, summarize_gaps};
use crate::instgen::{derive_seed, generate_instance, GenSpec};
use crate::nlcodec::{
    emit_matrix, emit_solution_nl, parse_matrix, parse_problem_nl, parse_solution_nl, CodecError,
    NlStyle, ParsedSolution,
};
use crate::solver::{solve_anytime, solve_exact};
use crate::validator::validate;

use super::client::{EndpointConfig, HttpTransport, ReplayTransport, SamplingParams};
use super::{build_dataset, load_dataset, load_references, run_eval, run_grid, BuildConfig,
    ChatTransport, EvalConfig};

/// Name of the environment variable holding the endpoint bearer token.
pub const API_KEY_VAR: &str = "JSSP_API_KEY";

#[derive(Parser)]
#[command(name = "jssp", version, about = "Job-shop scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances as matrix files
    Gen(GenArgs),
    /// Solve an instance file and print the result as JSON
    Solve(SolveArgs),
    /// Generate, solve and serialize a training dataset
    BuildDataset(BuildArgs),
    /// Check a solution text against an instance
    Validate(ValidateArgs),
    /// Query a model over a dataset and score the answers
    Eval(EvalArgs),
    /// Summary statistics over a whitespace-separated numbers file
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Sizes as JxM pairs, e.g. "3x3,10x5"
    #[arg(long, value_parser = parse_sizes)]
    sizes: SizeList,
    /// Instances per size
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    dur_min: u32,
    #[arg(long, default_value_t = 199)]
    dur_max: u32,
    /// Master seed; instance k uses a seed derived from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the .jssp files
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, matrix or natural-language form
    file: PathBuf,
    /// Run the exact branch-and-bound search instead of the anytime solver
    #[arg(long)]
    exact: bool,
    /// Budget in seconds
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    /// Node budget for --exact (unlimited when absent)
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the solution as text instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_parser = parse_sizes)]
    sizes: SizeList,
    /// Instances per size
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    dur_min: u32,
    #[arg(long, default_value_t = 199)]
    dur_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver budget per instance, seconds
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, default_value = "machine")]
    style: NlStyle,
    /// Records held out for validation.jsonl
    #[arg(long, default_value_t = 0)]
    split: usize,
    /// Worker threads (0: one per core)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file, matrix or natural-language form
    #[arg(long)]
    problem: PathBuf,
    /// Solution text file
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("transport").required(true).args(["endpoint", "replay"])))]
struct EvalArgs {
    /// Dataset JSONL to evaluate over
    #[arg(long)]
    dataset: PathBuf,
    /// Reference makespans JSONL (id, makespan); defaults to dataset labels
    #[arg(long)]
    references: Option<PathBuf>,
    /// Chat-completion endpoint URL
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name sent to the endpoint
    #[arg(long, requires = "endpoint")]
    model: Option<String>,
    /// Recorded candidates JSONL; evaluates offline
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Candidates per instance
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long, default_value_t = 50)]
    top_k: usize,
    #[arg(long, default_value_t = 0.95)]
    top_p: f64,
    /// Gap charged to instances with no feasible candidate
    #[arg(long)]
    penalty_gap: Option<f64>,
    /// Sweep the sampling grid instead of a single configuration
    #[arg(long)]
    grid: bool,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Numbers file, whitespace-separated
    file: PathBuf,
    /// Emit JSON instead of the text table
    #[arg(long)]
    json: bool,
}

/// Newtype so clap can carry a parsed size list through its builder.
#[derive(Debug, Clone)]
struct SizeList(Vec<(usize, usize)>);

fn parse_sizes(input: &str) -> Result<SizeList, String> {
    let mut sizes = Vec::new();
    for part in input.split(',') {
        let part = part.trim();
        let (jobs, machines) = part
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("size '{part}' is not of the form JxM"))?;
        let jobs = jobs.trim().parse().map_err(|_| format!("bad job count in '{part}'"))?;
        let machines = machines
            .trim()
            .parse()
            .map_err(|_| format!("bad machine count in '{part}'"))?;
        sizes.push((jobs, machines));
    }
    if sizes.is_empty() {
        return Err("at least one size is required".into());
    }
    Ok(SizeList(sizes))
}

/// Read an instance from either text form, trying the matrix layout first.
fn read_instance(path: &Path) -> anyhow::Result<JsspInstance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match parse_matrix(&text) {
        Ok((instance, _)) => Ok(instance),
        Err(matrix_err) => parse_problem_nl(&text).map_err(|nl_err| {
            anyhow::anyhow!(
                "{} parses neither as matrix ({matrix_err}) nor as problem text ({nl_err})",
                path.display()
            )
        }),
    }
}

pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::BuildDataset(args) => cmd_build(args),
        Command::Validate(args) => return exit_of(cmd_validate(args)),
        Command::Eval(args) => cmd_eval(args),
        Command::Stats(args) => cmd_stats(args),
    };
    exit_of(outcome.map(|()| 0))
}

fn exit_of(outcome: anyhow::Result<i32>) -> i32 {
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut index = 0u64;
    for &(num_jobs, num_machines) in &args.sizes.0 {
        for _ in 0..args.count {
            let spec = GenSpec {
                num_jobs,
                num_machines,
                dur_min: args.dur_min,
                dur_max: args.dur_max,
                seed: derive_seed(args.seed, index),
            };
            let instance = generate_instance(&spec)?;
            let name = format!("jssp_{num_jobs}x{num_machines}_{index:05}.jssp");
            fs::write(args.out.join(&name), emit_matrix(&instance, None))?;
            println!("{}", args.out.join(&name).display());
            index += 1;
        }
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.file)?;
    let budget = Duration::from_secs_f64(args.time_limit);
    let result = if args.exact {
        solve_exact(&instance, args.node_limit, Some(budget))
    } else {
        solve_anytime(&instance, budget, args.seed)
    };
    if args.text {
        print!("{}", emit_solution_nl(&result.schedule, &instance)?);
    } else {
        println!("{}", serde_json::to_string_pretty(&result)?);
    }
    Ok(())
}

fn cmd_build(args: BuildArgs) -> anyhow::Result<()> {
    let config = BuildConfig {
        sizes: args.sizes.0,
        count_per_size: args.count,
        dur_min: args.dur_min,
        dur_max: args.dur_max,
        master_seed: args.seed,
        time_limit: Duration::from_secs_f64(args.time_limit),
        style: args.style,
        validation_count: args.split,
        workers: args.workers,
    };
    let manifest = build_dataset(&config, &args.out)?;
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> anyhow::Result<i32> {
    let instance = read_instance(&args.problem)?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    // A solution with no recognizable lines still gets a report: every
    // operation shows up as missing.
    let parsed = match parse_solution_nl(&text) {
        Ok(parsed) => parsed,
        Err(CodecError::NoOperationsFound) => ParsedSolution::empty(),
        Err(err) => return Err(err.into()),
    };
    let report = validate(&instance, &parsed);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.feasible { 0 } else { 1 })
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let records = load_dataset(&args.dataset)?;
    let references = args
        .references
        .as_deref()
        .map(load_references)
        .transpose()?;

    let transport: Box<dyn ChatTransport> = match (&args.endpoint, &args.replay) {
        (Some(url), None) => {
            let mut config = EndpointConfig::new(url.clone());
            config.model = args.model.clone();
            config.api_key = std::env::var(API_KEY_VAR).ok();
            Box::new(HttpTransport::new(config)?)
        }
        (None, Some(path)) => Box::new(ReplayTransport::from_jsonl(path)?),
        // clap's transport group guarantees exactly one of the two.
        _ => unreachable!(),
    };

    let config = EvalConfig {
        params: SamplingParams {
            n: args.n,
            temperature: args.temperature,
            top_k: args.top_k,
            top_p: args.top_p,
        },
        penalty_gap: args.penalty_gap,
        workers: args.workers,
    };

    let json = if args.grid {
        let report = run_grid(&records, references.as_ref(), transport.as_ref(), &config)?;
        println!(
            "grid best: n={} temperature={} top_k={} top_p={}",
            report.best.n, report.best.temperature, report.best.top_k, report.best.top_p
        );
        for entry in &report.entries {
            let mean = entry
                .summary
                .gap_stats
                .map_or("n/a".to_string(), |s| format!("{:.2}", s.mean));
            println!(
                "  temperature={:<4} top_k={:<3} top_p={:<5} mean_gap={} feasible={:.2}",
                entry.params.temperature,
                entry.params.top_k,
                entry.params.top_p,
                mean,
                entry.summary.feasibility_rate
            );
        }
        serde_json::to_string_pretty(&report)?
    } else {
        let report = run_eval(&records, references.as_ref(), transport.as_ref(), &config)?;
        println!(
            "instances: {}   skipped (no reference): {}   feasibility rate: {:.3}",
            report.summary.n_instances,
            report.n_skipped_missing_reference,
            report.summary.feasibility_rate
        );
        match report.summary.gap_stats {
            Some(stats) => {
                println!("gap to reference (%):");
                print!("{}", render_stats_table(&stats));
            }
            None => println!("no feasible candidates; gap statistics unavailable"),
        }
        serde_json::to_string_pretty(&report)?
    };
    if let Some(out) = &args.out {
        fs::write(out, json).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))?;
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        values.push(
            token
                .parse::<f64>()
                .with_context(|| format!("'{token}' is not a number"))?,
        );
    }
    let stats = summarize_gaps(&values)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        print!("{}", render_stats_table(&stats));
    }
    Ok(())
}
