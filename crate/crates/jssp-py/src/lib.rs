//! Python bindings for the jssp toolkit. Scalar results cross as native
//! types; structured reports cross as plain dicts/lists via their JSON
//! form, so the Python side never needs wrapper classes for them.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use std::time::Duration;

use jssp::core::{JsspInstance, Operation, Schedule};
use jssp::instgen::{generate_instance, GenSpec};
use jssp::nlcodec::{
    build_chat_record, emit_matrix, emit_problem_nl, emit_solution_nl, parse_matrix,
    parse_problem_nl, parse_solution_nl, CodecError, NlStyle, ParsedSolution, PROMPT_VARIANTS,
    SYSTEM_PROMPT,
};
use jssp::solver::{brute_force_oracle, solve_anytime, solve_exact, trivial_lower_bound};
use jssp::validator::validate;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64()
                    .ok_or_else(|| PyRuntimeError::new_err("unrepresentable number"))?
                    .into_pyobject(py)?
                    .into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let json = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &json)
}

fn style_of(name: &str) -> PyResult<NlStyle> {
    name.parse().map_err(value_err)
}

/// A job-shop instance: per job, an ordered list of (machine, duration).
#[pyclass(module = "jssp_py")]
struct Instance {
    inner: JsspInstance,
}

#[pymethods]
impl Instance {
    /// Build from explicit job lists: [[(machine, duration), ...], ...].
    #[new]
    fn new(num_machines: usize, jobs: Vec<Vec<(usize, u32)>>) -> PyResult<Self> {
        let jobs = jobs
            .into_iter()
            .map(|job| {
                job.into_iter()
                    .map(|(machine, duration)| Operation { machine, duration })
                    .collect()
            })
            .collect();
        Ok(Self {
            inner: JsspInstance::new(num_machines, jobs).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_matrix(text: &str) -> PyResult<(Self, Option<f64>)> {
        let (inner, makespan) = parse_matrix(text).map_err(value_err)?;
        Ok((Self { inner }, makespan))
    }

    #[staticmethod]
    fn from_problem_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_problem_nl(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (num_jobs, num_machines, dur_min=1, dur_max=199, seed=0))]
    fn generate(
        num_jobs: usize,
        num_machines: usize,
        dur_min: u32,
        dur_max: u32,
        seed: u64,
    ) -> PyResult<Self> {
        let spec = GenSpec {
            num_jobs,
            num_machines,
            dur_min,
            dur_max,
            seed,
        };
        Ok(Self {
            inner: generate_instance(&spec).map_err(value_err)?,
        })
    }

    #[getter]
    fn num_jobs(&self) -> usize {
        self.inner.num_jobs
    }

    #[getter]
    fn num_machines(&self) -> usize {
        self.inner.num_machines
    }

    fn total_ops(&self) -> usize {
        self.inner.total_ops()
    }

    /// Total busy time required on one machine.
    fn total_work(&self, machine: usize) -> PyResult<u32> {
        jssp::core::instance_total_work(&self.inner, machine).map_err(value_err)
    }

    /// Makespan can never be lower than this.
    fn lower_bound(&self) -> u32 {
        trivial_lower_bound(&self.inner)
    }

    fn jobs(&self) -> Vec<Vec<(usize, u32)>> {
        self.inner
            .jobs
            .iter()
            .map(|job| job.iter().map(|op| (op.machine, op.duration)).collect())
            .collect()
    }

    #[pyo3(signature = (makespan=None))]
    fn to_matrix(&self, makespan: Option<f64>) -> String {
        emit_matrix(&self.inner, makespan)
    }

    #[pyo3(signature = (style="machine"))]
    fn to_problem_text(&self, style: &str) -> PyResult<String> {
        Ok(emit_problem_nl(&self.inner, style_of(style)?))
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .extract::<PyRef<'_, Instance>>()
            .is_ok_and(|o| o.inner == self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance({}x{}, {} ops)",
            self.inner.num_jobs,
            self.inner.num_machines,
            self.inner.total_ops()
        )
    }
}

/// Result of a solver run.
#[pyclass(module = "jssp_py")]
struct SolveOutcome {
    schedule: Schedule,
    #[pyo3(get)]
    proven_optimal: bool,
    #[pyo3(get)]
    elapsed: f64,
    #[pyo3(get)]
    nodes_explored: u64,
}

#[pymethods]
impl SolveOutcome {
    #[getter]
    fn makespan(&self) -> u32 {
        self.schedule.makespan
    }

    /// Scheduled operations as dicts (job, op, machine, start, duration, end).
    fn ops<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py_json(py, &self.schedule.ops)
    }

    /// Solution text for this schedule on its instance.
    fn to_text(&self, instance: &Instance) -> PyResult<String> {
        emit_solution_nl(&self.schedule, &instance.inner).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveOutcome(makespan={}, proven_optimal={})",
            self.schedule.makespan,
            if self.proven_optimal { "True" } else { "False" }
        )
    }
}

/// Solve an instance: simulated-annealing anytime search by default,
/// branch and bound with `exact=True`.
#[pyfunction]
#[pyo3(signature = (instance, time_limit=300.0, seed=0, exact=false, node_limit=None))]
fn solve(
    py: Python<'_>,
    instance: &Instance,
    time_limit: f64,
    seed: u64,
    exact: bool,
    node_limit: Option<u64>,
) -> PyResult<SolveOutcome> {
    if !(time_limit > 0.0) {
        return Err(value_err("time_limit must be positive"));
    }
    let budget = Duration::from_secs_f64(time_limit);
    let inner = instance.inner.clone();
    let result = py.detach(move || {
        if exact {
            solve_exact(&inner, node_limit, Some(budget))
        } else {
            solve_anytime(&inner, budget, seed)
        }
    });
    Ok(SolveOutcome {
        proven_optimal: result.proven_optimal,
        elapsed: result.elapsed.as_secs_f64(),
        nodes_explored: result.nodes_explored,
        schedule: result.schedule,
    })
}

/// Exhaustive optimal makespan for tiny instances (total ops <= 12).
#[pyfunction]
fn oracle_makespan(py: Python<'_>, instance: &Instance) -> PyResult<u32> {
    let inner = instance.inner.clone();
    py.detach(move || brute_force_oracle(&inner)).map_err(value_err)
}

/// Check a solution text against an instance; returns the report as a dict.
#[pyfunction]
fn validate_solution<'py>(
    py: Python<'py>,
    instance: &Instance,
    solution_text: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let parsed = match parse_solution_nl(solution_text) {
        Ok(parsed) => parsed,
        Err(CodecError::NoOperationsFound) => ParsedSolution::empty(),
        Err(err) => return Err(value_err(err)),
    };
    to_py_json(py, &validate(&instance.inner, &parsed))
}

/// Extract whatever schedule a free-form text carries.
#[pyfunction]
fn parse_solution<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py_json(py, &parse_solution_nl(text).map_err(value_err)?)
}

/// Best feasible candidate (lowest computed makespan, earliest index wins).
#[pyfunction]
fn select_best<'py>(
    py: Python<'py>,
    instance: &Instance,
    candidates: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py_json(py, &jssp::evalkit::select_best(&instance.inner, &candidates))
}

/// Percentage excess of a makespan over a positive reference.
#[pyfunction]
fn gap_percent(makespan: f64, reference: f64) -> PyResult<f64> {
    jssp::evalkit::gap_percent(makespan, reference).map_err(value_err)
}

/// count/mean/std/min/quartiles/max over a gap vector, as a dict.
#[pyfunction]
fn summarize_gaps<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py_json(py, &jssp::evalkit::summarize_gaps(&values).map_err(value_err)?)
}

#[pyfunction]
fn system_prompt() -> &'static str {
    SYSTEM_PROMPT
}

#[pyfunction]
fn prompt_variants() -> Vec<&'static str> {
    PROMPT_VARIANTS.to_vec()
}

/// Chat triple (system/user/assistant) for a solved instance. The prompt
/// variant is drawn from the seed when not fixed.
#[pyfunction]
#[pyo3(signature = (instance, outcome, style="machine", prompt_variant=None, seed=0))]
fn chat_record<'py>(
    py: Python<'py>,
    instance: &Instance,
    outcome: &SolveOutcome,
    style: &str,
    prompt_variant: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let record = build_chat_record(
        &instance.inner,
        &outcome.schedule,
        style_of(style)?,
        prompt_variant,
        &mut rng,
    )
    .map_err(value_err)?;
    to_py_json(py, &record)
}

#[pymodule]
fn jssp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Instance>()?;
    m.add_class::<SolveOutcome>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_makespan, m)?)?;
    m.add_function(wrap_pyfunction!(validate_solution, m)?)?;
    m.add_function(wrap_pyfunction!(parse_solution, m)?)?;
    m.add_function(wrap_pyfunction!(select_best, m)?)?;
    m.add_function(wrap_pyfunction!(gap_percent, m)?)?;
    m.add_function(wrap_pyfunction!(summarize_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(system_prompt, m)?)?;
    m.add_function(wrap_pyfunction!(prompt_variants, m)?)?;
    m.add_function(wrap_pyfunction!(chat_record, m)?)?;
    Ok(())
}
