//! Python bindings for `divsim`, importable as the `divsim` module.
//!
//! Model parameters are passed as keyword arguments using the same names as
//! the configuration file (`n_agents=10, tau=0.8, passing_scheme="always_pass"`);
//! anything omitted takes its default. Structured results come back as plain
//! dicts and lists.

use divsim::rng::stream;
use divsim::{diversity, stats, teamgen, Agent, ModelParams, SweepGrid, SweepRecord, TeamSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(value_error)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(value_error)
}

/// Defaults overlaid with `kwargs`, validated.
fn params_from(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<ModelParams> {
    let mut base = match serde_json::to_value(ModelParams::default()) {
        Ok(serde_json::Value::Object(m)) => m,
        _ => unreachable!("ModelParams serializes to an object"),
    };
    if let Some(kw) = kwargs {
        let extra: serde_json::Map<String, serde_json::Value> = from_py(kw.as_any())?;
        for (k, v) in extra {
            if !base.contains_key(&k) {
                return Err(PyValueError::new_err(format!("unknown parameter '{k}'")));
            }
            base.insert(k, v);
        }
    }
    let params: ModelParams = serde_json::from_value(serde_json::Value::Object(base)).map_err(value_error)?;
    params.validate().map_err(value_error)?;
    Ok(params)
}

/// A team of agents, each a vector of per-function skill strengths.
#[pyclass(name = "Team", module = "divsim", frozen)]
struct PyTeam {
    inner: divsim::Team,
}

#[pymethods]
impl PyTeam {
    /// Builds a team from skill vectors. Dominant functions are the argmax of
    /// each vector; exact ties are broken by a stream seeded with `seed`.
    #[new]
    #[pyo3(signature = (skills, seed = 0))]
    fn new(skills: Vec<Vec<f64>>, seed: u64) -> PyResult<Self> {
        let mut rng = stream(seed);
        let agents = skills
            .into_iter()
            .enumerate()
            .map(|(id, s)| Agent::from_skills(id, s, &mut rng))
            .collect::<divsim::Result<Vec<_>>>()
            .map_err(value_error)?;
        Ok(PyTeam {
            inner: divsim::Team::new(agents).map_err(value_error)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Team(n_agents={}, n_functions={})",
            self.inner.len(),
            self.inner.n_functions()
        )
    }

    #[getter]
    fn skills(&self) -> Vec<Vec<f64>> {
        self.inner.agents().iter().map(|a| a.skills().to_vec()).collect()
    }

    #[getter]
    fn dominant_functions(&self) -> Vec<usize> {
        self.inner.agents().iter().map(Agent::dominant_function).collect()
    }

    fn ifds(&self) -> PyResult<Vec<f64>> {
        self.inner
            .agents()
            .iter()
            .map(diversity::ifds)
            .collect::<divsim::Result<_>>()
            .map_err(value_error)
    }

    fn ifd(&self) -> PyResult<f64> {
        diversity::ifd(&self.inner).map_err(value_error)
    }

    fn dfd(&self) -> PyResult<f64> {
        diversity::dfd(&self.inner).map_err(value_error)
    }

    fn sdi(&self) -> PyResult<f64> {
        diversity::sdi(&self.inner).map_err(value_error)
    }

    fn dominant_counts(&self) -> Vec<usize> {
        diversity::dominant_counts(&self.inner)
    }

    /// Collaborating pairs `(m, n)` with `m < n` under the given parameters.
    #[pyo3(signature = (**params))]
    fn collaborators(&self, params: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<(usize, usize)>> {
        let params = params_from(params)?;
        let g = diversity::collaboration_graph(&self.inner, &params);
        let n = self.inner.len();
        Ok((0..n)
            .flat_map(|m| (m + 1..n).map(move |k| (m, k)))
            .filter(|&(m, k)| g.connected(m, k))
            .collect())
    }
}

/// Default model parameters as a dict.
#[pyfunction]
fn default_params(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &ModelParams::default())
}

/// Model parameters of a named CLI scenario preset.
#[pyfunction]
fn preset(py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
    let cfg = divsim::cli::preset(name).map_err(value_error)?;
    to_py(py, &cfg.params)
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    divsim::cli::PRESETS.to_vec()
}

#[pyfunction]
fn agent_distance(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    diversity::skill_distance(&a, &b).map_err(value_error)
}

#[pyfunction]
fn dfd_from_counts(counts: Vec<usize>) -> PyResult<f64> {
    diversity::dfd_from_counts(&counts).map_err(value_error)
}

/// Dominant-function counts whose DFD is closest to `target_dfd`.
#[pyfunction]
fn dominant_counts_for_dfd(target_dfd: f64, n_agents: usize, n_functions: usize) -> PyResult<Vec<usize>> {
    teamgen::dominant_counts_for_dfd(target_dfd, n_agents, n_functions).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (target_ifd, target_dfd, seed = 0, **params))]
fn generate_team(target_ifd: f64, target_dfd: f64, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<PyTeam> {
    let params = params_from(params)?;
    let spec = TeamSpec::from_params(&params, target_ifd, target_dfd);
    let team = teamgen::generate_team(&spec, &params, &mut stream(seed)).map_err(value_error)?;
    Ok(PyTeam { inner: team })
}

/// `n_tasks` requirement vectors.
#[pyfunction]
#[pyo3(signature = (seed = 0, **params))]
fn generate_tasks(seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<Vec<f64>>> {
    let params = params_from(params)?;
    Ok(teamgen::generate_tasks(&params, &mut stream(seed))
        .iter()
        .map(|t| t.requirements().to_vec())
        .collect())
}

/// Runs one simulation of `team` on the given task requirement vectors.
#[pyfunction]
#[pyo3(signature = (team, tasks, seed = 0, **params))]
fn simulate(
    py: Python<'_>,
    team: &PyTeam,
    tasks: Vec<Vec<f64>>,
    seed: u64,
    params: Option<&Bound<'_, PyDict>>,
) -> PyResult<Py<PyAny>> {
    let params = params_from(params)?;
    let tasks = tasks
        .into_iter()
        .enumerate()
        .map(|(id, r)| divsim::Task::new(id, r))
        .collect::<divsim::Result<Vec<_>>>()
        .map_err(value_error)?;
    let res = divsim::run_simulation(&team.inner, tasks, &params, &mut stream(seed)).map_err(value_error)?;
    to_py(py, &res)
}

/// Replicated sweep over the IFD x DFD grid; one dict per (cell, replicate).
#[pyfunction]
#[pyo3(signature = (ifd_targets, dfd_targets, threads = None, **params))]
fn run_sweep(
    py: Python<'_>,
    ifd_targets: Vec<f64>,
    dfd_targets: Vec<f64>,
    threads: Option<usize>,
    params: Option<&Bound<'_, PyDict>>,
) -> PyResult<Py<PyAny>> {
    let params = params_from(params)?;
    let grid = SweepGrid::new(ifd_targets, dfd_targets).map_err(value_error)?;
    let spec = TeamSpec::from_params(&params, 0.0, 0.0);
    let records = py
        .detach(|| divsim::sweep::run_sweep_with_threads(&grid, &spec, &params, threads))
        .map_err(value_error)?;
    to_py(py, &records)
}

/// Per-cell means and standard deviations of sweep records.
#[pyfunction]
fn aggregate(py: Python<'_>, records: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let records: Vec<SweepRecord> = from_py(records)?;
    to_py(py, &divsim::aggregate_cells(&records))
}

/// Least squares of `y` on an intercept, `x1` and `x2`.
#[pyfunction]
fn ols2(py: Python<'_>, y: Vec<f64>, x1: Vec<f64>, x2: Vec<f64>) -> PyResult<Py<PyAny>> {
    to_py(py, &stats::ols2(&y, &x1, &x2).map_err(value_error)?)
}

/// `(r, two-sided p)`.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    let c = stats::pearson(&x, &y).map_err(value_error)?;
    Ok((c.r, c.p_value))
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    let c = stats::spearman(&x, &y).map_err(value_error)?;
    Ok((c.r, c.p_value))
}

#[pyfunction]
fn student_t_sf(t: f64, df: f64) -> PyResult<f64> {
    stats::student_t_sf(t, df).map_err(value_error)
}

#[pyfunction]
fn f_sf(f: f64, df1: f64, df2: f64) -> PyResult<f64> {
    stats::f_sf(f, df1, df2).map_err(value_error)
}

#[pyfunction]
fn derive_seed(master: u64, parts: Vec<u64>) -> u64 {
    divsim::rng::derive_seed(master, &parts)
}

#[pymodule]
#[pyo3(name = "divsim")]
fn divsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTeam>()?;
    m.add_function(wrap_pyfunction!(default_params, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(agent_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dfd_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(dominant_counts_for_dfd, m)?)?;
    m.add_function(wrap_pyfunction!(generate_team, m)?)?;
    m.add_function(wrap_pyfunction!(generate_tasks, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(ols2, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(student_t_sf, m)?)?;
    m.add_function(wrap_pyfunction!(f_sf, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
