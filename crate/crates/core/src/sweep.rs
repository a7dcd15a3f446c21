//! Replicated scans over an IFD x DFD grid.
//!
//! Every (cell, replicate) work unit draws from two streams derived from the
//! master seed by position:
//!
//! - team stream: `derive_seed(master, [0, ifd_index, dfd_index, replicate])`,
//!   reported as the record's `seed`;
//! - run stream (tasks, assignment, passing order):
//!   `derive_seed(master, [1, ifd_index, replicate])`.
//!
//! The run stream does not depend on the DFD index, so cells that differ
//! only in DFD see the same tasks and the same random assignment sequence
//! (common random numbers). Work units are independent and results are
//! merged in row-major (ifd, dfd, replicate) order whatever the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diversity::{collaboration_graph, dfd, ifd, sdi};
use crate::engine::run_with_graph;
use crate::model::ModelParams;
use crate::rng::{derive_seed, stream};
use crate::teamgen::{generate_tasks, generate_team, max_dfd, TeamSpec};
use crate::{Error, Result};

const TEAM_STREAM: u64 = 0;
const RUN_STREAM: u64 = 1;

/// Target values scanned along each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    ifd_targets: Vec<f64>,
    dfd_targets: Vec<f64>,
}

impl SweepGrid {
    pub fn new(ifd_targets: Vec<f64>, dfd_targets: Vec<f64>) -> Result<Self> {
        for (name, axis) in [("ifd_targets", &ifd_targets), ("dfd_targets", &dfd_targets)] {
            if axis.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} is empty")));
            }
            if axis.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidGrid(format!("{name} must lie in [0, 1]")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!("{name} must be strictly increasing")));
            }
        }
        Ok(SweepGrid {
            ifd_targets,
            dfd_targets,
        })
    }

    /// `ifd_steps` evenly spaced IFD targets over [0, 1] and `dfd_steps`
    /// evenly spaced DFD targets from 0 to the largest DFD the team size
    /// allows.
    pub fn evenly_spaced(params: &ModelParams, ifd_steps: usize, dfd_steps: usize) -> Result<Self> {
        let top = max_dfd(params.n_agents, params.n_functions);
        SweepGrid::new(linspace(0.0, 1.0, ifd_steps), linspace(0.0, top, dfd_steps))
    }

    /// 21 IFD targets (step 0.05) by 11 DFD targets.
    pub fn default_for(params: &ModelParams) -> Result<Self> {
        Self::evenly_spaced(params, 21, 11)
    }

    pub fn ifd_targets(&self) -> &[f64] {
        &self.ifd_targets
    }

    pub fn dfd_targets(&self) -> &[f64] {
        &self.dfd_targets
    }

    pub fn n_cells(&self) -> usize {
        self.ifd_targets.len() * self.dfd_targets.len()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// One row of sweep output. Outcome fields are `None` when team generation
/// failed; `failure` then carries the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub target_ifd: f64,
    pub target_dfd: f64,
    pub replicate: usize,
    pub seed: u64,
    pub achieved_ifd: Option<f64>,
    pub achieved_dfd: Option<f64>,
    pub achieved_sdi: Option<f64>,
    pub steps: Option<usize>,
    pub passes: Option<usize>,
    pub completed_components: Option<usize>,
    pub total_components: Option<usize>,
    pub performance: Option<f64>,
    pub comm_density: Option<f64>,
    /// Share of agent pairs that are collaborators.
    pub collaborator_ratio: Option<f64>,
    pub failure: Option<String>,
}

impl SweepRecord {
    pub const FIELDS: [&'static str; 15] = [
        "target_ifd",
        "target_dfd",
        "replicate",
        "seed",
        "achieved_ifd",
        "achieved_dfd",
        "achieved_sdi",
        "steps",
        "passes",
        "completed_components",
        "total_components",
        "performance",
        "comm_density",
        "collaborator_ratio",
        "failure",
    ];

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    fn failed(target_ifd: f64, target_dfd: f64, replicate: usize, seed: u64, reason: String) -> Self {
        SweepRecord {
            target_ifd,
            target_dfd,
            replicate,
            seed,
            achieved_ifd: None,
            achieved_dfd: None,
            achieved_sdi: None,
            steps: None,
            passes: None,
            completed_components: None,
            total_components: None,
            performance: None,
            comm_density: None,
            collaborator_ratio: None,
            failure: Some(reason),
        }
    }
}

/// Position of a work unit inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellIndex {
    pub ifd: usize,
    pub dfd: usize,
    pub replicate: usize,
}

pub fn team_seed(master: u64, at: CellIndex) -> u64 {
    derive_seed(
        master,
        &[TEAM_STREAM, at.ifd as u64, at.dfd as u64, at.replicate as u64],
    )
}

pub fn run_seed(master: u64, at: CellIndex) -> u64 {
    derive_seed(master, &[RUN_STREAM, at.ifd as u64, at.replicate as u64])
}

/// Generates a team and tasks for one work unit, runs it and reports.
pub fn run_cell(
    target_ifd: f64,
    target_dfd: f64,
    at: CellIndex,
    spec_template: &TeamSpec,
    params: &ModelParams,
) -> SweepRecord {
    let seed = team_seed(params.seed, at);
    let spec = TeamSpec {
        target_ifd,
        target_dfd,
        ..*spec_template
    };
    let outcome = (|| -> Result<SweepRecord> {
        let team = generate_team(&spec, params, &mut stream(seed))?;
        let mut run_rng = stream(run_seed(params.seed, at));
        let tasks = generate_tasks(params, &mut run_rng);
        let graph = collaboration_graph(&team, params);
        let result = run_with_graph(&team, tasks, params, &graph, &mut run_rng)?;
        Ok(SweepRecord {
            target_ifd,
            target_dfd,
            replicate: at.replicate,
            seed,
            achieved_ifd: Some(ifd(&team)?),
            achieved_dfd: Some(dfd(&team)?),
            achieved_sdi: Some(sdi(&team)?),
            steps: Some(result.steps_taken),
            passes: Some(result.passes),
            completed_components: Some(result.completed_components),
            total_components: Some(result.total_components),
            performance: Some(result.performance),
            comm_density: Some(result.comm_density),
            collaborator_ratio: Some(graph.density()),
            failure: None,
        })
    })();
    outcome.unwrap_or_else(|e| SweepRecord::failed(target_ifd, target_dfd, at.replicate, seed, e.to_string()))
}

/// Runs `params.replicates` simulations per grid cell using every available
/// core. See [`run_sweep_with_threads`].
pub fn run_sweep(grid: &SweepGrid, spec_template: &TeamSpec, params: &ModelParams) -> Result<Vec<SweepRecord>> {
    run_sweep_with_threads(grid, spec_template, params, None)
}

/// Runs the sweep on at most `threads` workers (`None`: one per core).
/// Output is row-major by (ifd index, dfd index, replicate) and identical
/// for every thread count. Cells whose team cannot be generated yield
/// failure-marked records.
pub fn run_sweep_with_threads(
    grid: &SweepGrid,
    spec_template: &TeamSpec,
    params: &ModelParams,
    threads: Option<usize>,
) -> Result<Vec<SweepRecord>> {
    params.validate()?;
    let mut units = Vec::with_capacity(grid.n_cells() * params.replicates);
    for (i, &ti) in grid.ifd_targets.iter().enumerate() {
        for (j, &tj) in grid.dfd_targets.iter().enumerate() {
            for replicate in 0..params.replicates {
                units.push((
                    ti,
                    tj,
                    CellIndex {
                        ifd: i,
                        dfd: j,
                        replicate,
                    },
                ));
            }
        }
    }
    let work = || -> Vec<SweepRecord> {
        units
            .par_iter()
            .map(|&(ti, tj, at)| run_cell(ti, tj, at, spec_template, params))
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Summary {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { mean, sd }
    }
}

/// Per-cell statistics over successful replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub target_ifd: f64,
    pub target_dfd: f64,
    pub n: usize,
    pub achieved_ifd: f64,
    pub achieved_dfd: f64,
    pub achieved_sdi: f64,
    pub performance: Summary,
    pub comm_density: Summary,
    pub steps: Summary,
    pub passes: Summary,
    pub collaborator_ratio: Summary,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    /// Cells in order of first appearance.
    pub cells: Vec<CellAggregate>,
    /// Failure-marked records left out of the statistics.
    pub failed: usize,
}

/// Groups records by target cell and summarizes the successful ones.
pub fn aggregate_cells(records: &[SweepRecord]) -> Aggregates {
    let mut keys: Vec<(f64, f64)> = Vec::new();
    let mut groups: Vec<Vec<&SweepRecord>> = Vec::new();
    let mut failed = 0;
    for r in records {
        if r.is_failed() {
            failed += 1;
            continue;
        }
        let key = (r.target_ifd, r.target_dfd);
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r),
            None => {
                keys.push(key);
                groups.push(vec![r]);
            }
        }
    }
    let cells = keys
        .into_iter()
        .zip(groups)
        .map(|((ti, tj), rows)| {
            let col =
                |f: &dyn Fn(&SweepRecord) -> Option<f64>| -> Vec<f64> { rows.iter().filter_map(|r| f(r)).collect() };
            let mean = |v: Vec<f64>| Summary::of(&v).mean;
            CellAggregate {
                target_ifd: ti,
                target_dfd: tj,
                n: rows.len(),
                achieved_ifd: mean(col(&|r| r.achieved_ifd)),
                achieved_dfd: mean(col(&|r| r.achieved_dfd)),
                achieved_sdi: mean(col(&|r| r.achieved_sdi)),
                performance: Summary::of(&col(&|r| r.performance)),
                comm_density: Summary::of(&col(&|r| r.comm_density)),
                steps: Summary::of(&col(&|r| r.steps.map(|s| s as f64))),
                passes: Summary::of(&col(&|r| r.passes.map(|s| s as f64))),
                collaborator_ratio: Summary::of(&col(&|r| r.collaborator_ratio)),
            }
        })
        .collect();
    Aggregates { cells, failed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenerationMode;

    fn record(ti: f64, tj: f64, perf: f64) -> SweepRecord {
        SweepRecord {
            target_ifd: ti,
            target_dfd: tj,
            replicate: 0,
            seed: 0,
            achieved_ifd: Some(ti),
            achieved_dfd: Some(tj),
            achieved_sdi: Some(0.5),
            steps: Some(10),
            passes: Some(2),
            completed_components: Some(1),
            total_components: Some(2),
            performance: Some(perf),
            comm_density: Some(0.2),
            collaborator_ratio: Some(1.0),
            failure: None,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![0.0, 0.5], vec![0.2]).is_ok());
        assert!(SweepGrid::new(vec![0.5, 0.5], vec![0.2]).is_err());
        assert!(SweepGrid::new(vec![0.0, 1.5], vec![0.2]).is_err());
        assert!(SweepGrid::new(vec![], vec![0.2]).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = SweepGrid::default_for(&ModelParams::default()).unwrap();
        assert_eq!(g.ifd_targets().len(), 21);
        assert_eq!(g.dfd_targets().len(), 11);
        assert_eq!(g.ifd_targets()[20], 1.0);
        assert!((g.dfd_targets()[10] - 0.99).abs() < 1e-12);
    }

    #[test]
    fn aggregate_examples() {
        let rows: Vec<_> = (0..5).map(|_| record(0.1, 0.2, 0.7)).collect();
        let a = aggregate_cells(&rows);
        assert_eq!(a.cells.len(), 1);
        assert_eq!(a.cells[0].performance, Summary { mean: 0.7, sd: 0.0 });

        let a = aggregate_cells(&[record(0.0, 0.0, 0.2), record(0.0, 0.0, 0.4)]);
        assert!((a.cells[0].performance.mean - 0.3).abs() < 1e-15);
        assert!((a.cells[0].performance.sd - 0.02f64.sqrt()).abs() < 1e-15);

        let failed: Vec<_> = (0..3)
            .map(|r| SweepRecord::failed(0.0, 0.0, r, 0, "boom".into()))
            .collect();
        let a = aggregate_cells(&failed);
        assert!(a.cells.is_empty());
        assert_eq!(a.failed, 3);
    }

    #[test]
    fn small_sweep_is_ordered_and_thread_independent() {
        let p = ModelParams {
            replicates: 3,
            seed: 5,
            ..Default::default()
        };
        let grid = SweepGrid::new(vec![0.2, 0.8], vec![0.0, 0.5, 0.9]).unwrap();
        let spec = TeamSpec::from_params(&p, 0.0, 0.0);
        let serial = run_sweep_with_threads(&grid, &spec, &p, Some(1)).unwrap();
        let parallel = run_sweep_with_threads(&grid, &spec, &p, Some(4)).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial.len(), 18);
        let order: Vec<_> = serial
            .iter()
            .map(|r| (r.target_ifd, r.target_dfd, r.replicate))
            .collect();
        let mut sorted = order.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(order, sorted);
    }

    #[test]
    fn specialist_only_cell_stalls_at_one_ninth() {
        let p = ModelParams {
            generation_mode: GenerationMode::SpecGen,
            tau: 0.5,
            ..Default::default()
        };
        let grid = SweepGrid::new(vec![0.0], vec![0.0]).unwrap();
        let spec = TeamSpec::from_params(&p, 0.0, 0.0);
        let rows = run_sweep(&grid, &spec, &p).unwrap();
        let a = aggregate_cells(&rows);
        assert!((a.cells[0].performance.mean - 1.0 / 9.0).abs() < 0.01);
    }
}
