//! Agent-based simulation of task processing in management teams.
//!
//! Teams are groups of agents with skill vectors over a fixed set of
//! functions. Tasks carry per-function work requirements. Agents work on
//! tasks and pass them to sufficiently similar collaborators under one of two
//! communication schemes. The crate measures how intrapersonal functional
//! diversity (IFD) and dominant function diversity (DFD) shape team
//! performance and communication density, and provides the Skill Diversity
//! Index (SDI) for aggregate skill coverage.
//!
//! Module map:
//!
//! - [`model`]: agents, tasks, teams and the model parameter set
//! - [`diversity`]: IFDS/IFD/DFD/SDI, inter-agent distance, collaboration graph
//! - [`teamgen`]: task generation and teams realizing IFD/DFD targets
//! - [`engine`]: the discrete-time simulation loop
//! - [`sweep`]: replicated IFD x DFD grid scans and per-cell aggregation
//! - [`stats`]: OLS with two regressors, correlation, t and F tail probabilities
//! - [`cli`]: configuration, presets and output writers behind the `divsim` binary

pub mod cli;
pub mod diversity;
pub mod engine;
mod error;
pub mod model;
pub mod rng;
pub mod stats;
pub mod sweep;
pub mod teamgen;

pub use diversity::{agent_distance, collaboration_graph, dfd, ifd, ifds, sdi, CollaborationGraph};
pub use engine::{run_simulation, SimResult};
pub use error::{Error, Result};
pub use model::{Agent, GenerationMode, ModelParams, PassingScheme, Task, Team};
pub use sweep::{aggregate_cells, run_sweep, SweepGrid, SweepRecord};
pub use teamgen::{generate_task, generate_team, TeamSpec};

/// Absolute tolerance for "equals the normalization constant" checks and for
/// treating remaining work as zero.
pub const TOLERANCE: f64 = 1e-9;
