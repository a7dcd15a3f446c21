//! Discrete-time simulation of task processing.
//!
//! Each step runs three phases in order: random assignment of unassigned
//! tasks to idle agents, task passing between collaborators, and work. A
//! task held by a stuck agent is never returned to the pool; it moves only
//! by being passed. The run ends when every task is complete or after
//! `max_steps` steps.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diversity::{collaboration_graph, CollaborationGraph};
use crate::model::{Agent, ModelParams, PassingScheme, Task, Team};
use crate::{Error, Result, TOLERANCE};

/// Work `agent` could do on `task` in one step: the sum over open components
/// of `min(skill, remaining)`.
pub fn work_potential(agent: &Agent, task: &Task) -> f64 {
    agent
        .skills()
        .iter()
        .zip(task.requirements())
        .filter(|(_, &r)| r > 0.0)
        .map(|(&p, &r)| p.min(r))
        .sum()
}

/// One step of work by `agent` on `task`; returns newly completed components.
pub fn apply_work(agent: &Agent, task: &mut Task) -> usize {
    task.apply_skills(agent.skills())
}

/// The agent can make no progress on an unfinished task.
pub fn is_stuck(agent: &Agent, task: &Task) -> bool {
    !task.is_complete() && work_potential(agent, task) <= TOLERANCE
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct SimState<'a> {
    team: &'a Team,
    tasks: Vec<Task>,
    /// Task held by each agent.
    held: Vec<Option<usize>>,
    /// Agent holding each task.
    holder: Vec<Option<usize>>,
    pub step: usize,
    pub passes: usize,
    pub completed_components: usize,
}

impl<'a> SimState<'a> {
    pub fn new(team: &'a Team, tasks: Vec<Task>) -> Result<Self> {
        if team.is_empty() {
            return Err(Error::EmptyTeam);
        }
        if tasks.is_empty() {
            return Err(Error::InvalidTask("no tasks to simulate".into()));
        }
        let nf = team.n_functions();
        if let Some(t) = tasks.iter().find(|t| t.requirements().len() != nf) {
            return Err(Error::LengthMismatch(nf, t.requirements().len()));
        }
        Ok(SimState {
            team,
            held: vec![None; team.len()],
            holder: vec![None; tasks.len()],
            tasks,
            step: 0,
            passes: 0,
            completed_components: 0,
        })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn held_task(&self, agent: usize) -> Option<usize> {
        self.held[agent]
    }

    pub fn holder_of(&self, task: usize) -> Option<usize> {
        self.holder[task]
    }

    pub fn all_complete(&self) -> bool {
        self.tasks.iter().all(Task::is_complete)
    }

    pub fn remaining_work(&self) -> f64 {
        self.tasks.iter().map(Task::remaining_work).sum()
    }

    pub fn total_components(&self) -> usize {
        self.tasks.iter().map(Task::initial_components).sum()
    }

    /// (agent, task) pairs currently assigned.
    pub fn assignments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.held.iter().enumerate().filter_map(|(a, t)| t.map(|t| (a, t)))
    }

    fn transfer(&mut self, from: usize, to: usize) {
        let task = self.held[from].take().expect("holder has a task");
        debug_assert!(self.held[to].is_none());
        self.held[to] = Some(task);
        self.holder[task] = Some(to);
        self.passes += 1;
    }

    /// Pairs unassigned open tasks with idle agents uniformly at random.
    pub fn assign_phase<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut open: Vec<usize> = (0..self.tasks.len())
            .filter(|&k| self.holder[k].is_none() && !self.tasks[k].is_complete())
            .collect();
        if open.is_empty() {
            return;
        }
        let mut idle: Vec<usize> = (0..self.team.len()).filter(|&a| self.held[a].is_none()).collect();
        open.shuffle(rng);
        idle.shuffle(rng);
        for (&k, &a) in open.iter().zip(&idle) {
            self.held[a] = Some(k);
            self.holder[k] = Some(a);
        }
    }

    /// Every holder works on its task; finished tasks free their agent.
    /// Returns the total work done.
    pub fn work_phase(&mut self) -> f64 {
        let agents = self.team.agents();
        let mut work = 0.0;
        for a in 0..agents.len() {
            let Some(k) = self.held[a] else { continue };
            let task = &mut self.tasks[k];
            work += work_potential(&agents[a], task);
            self.completed_components += apply_work(&agents[a], task);
            if task.is_complete() {
                self.held[a] = None;
                self.holder[k] = None;
            }
        }
        work
    }
}

/// Idle collaborator of `agent` with the highest potential on `task`;
/// ties go to the lowest agent index.
fn best_idle_collaborator(
    state: &SimState<'_>,
    graph: &CollaborationGraph,
    agent: usize,
    task: &Task,
) -> Option<(usize, f64)> {
    let agents = state.team.agents();
    let mut best: Option<(usize, f64)> = None;
    for n in graph.collaborators(agent) {
        if state.held[n].is_some() {
            continue;
        }
        let w = work_potential(&agents[n], task);
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((n, w));
        }
    }
    best
}

/// Lets task holders hand their task to an idle collaborator. Holders act
/// in a fresh random order and idle/busy status updates as passes happen.
/// Returns the number of passes made.
pub fn pass_phase<R: Rng + ?Sized>(
    state: &mut SimState<'_>,
    scheme: PassingScheme,
    graph: &CollaborationGraph,
    rng: &mut R,
) -> usize {
    let mut holders: Vec<usize> = state.assignments().map(|(a, _)| a).collect();
    holders.shuffle(rng);
    let before = state.passes;
    let agents = state.team.agents();
    for h in holders {
        let Some(k) = state.held[h] else { continue };
        let task = &state.tasks[k];
        let own = work_potential(&agents[h], task);
        let needed = match scheme {
            PassingScheme::PassIfStuck => {
                if task.is_complete() || own > TOLERANCE {
                    continue;
                }
                TOLERANCE
            }
            PassingScheme::AlwaysPass => own + TOLERANCE,
        };
        if let Some((to, w)) = best_idle_collaborator(state, graph, h, task) {
            if w > needed {
                state.transfer(h, to);
            }
        }
    }
    state.passes - before
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub steps_taken: usize,
    pub passes: usize,
    pub completed_components: usize,
    pub total_components: usize,
    /// Completed over total components.
    pub performance: f64,
    /// Passes per step taken.
    pub comm_density: f64,
    pub all_solved: bool,
}

impl SimResult {
    fn from_state(state: &SimState<'_>) -> Self {
        let total = state.total_components();
        let steps = state.step.max(1);
        SimResult {
            steps_taken: state.step,
            passes: state.passes,
            completed_components: state.completed_components,
            total_components: total,
            performance: if total == 0 {
                1.0
            } else {
                state.completed_components as f64 / total as f64
            },
            comm_density: state.passes as f64 / steps as f64,
            all_solved: state.all_complete(),
        }
    }
}

/// Runs tasks through a team until all are done or `max_steps` is reached.
pub fn run_simulation<R: Rng + ?Sized>(
    team: &Team,
    tasks: Vec<Task>,
    params: &ModelParams,
    rng: &mut R,
) -> Result<SimResult> {
    let graph = collaboration_graph(team, params);
    run_with_graph(team, tasks, params, &graph, rng)
}

pub fn run_with_graph<R: Rng + ?Sized>(
    team: &Team,
    tasks: Vec<Task>,
    params: &ModelParams,
    graph: &CollaborationGraph,
    rng: &mut R,
) -> Result<SimResult> {
    if params.max_steps == 0 {
        return Err(Error::InvalidParams("max_steps must be at least 1".into()));
    }
    let mut state = SimState::new(team, tasks)?;
    loop {
        state.assign_phase(rng);
        pass_phase(&mut state, params.passing_scheme, graph, rng);
        state.work_phase();
        state.step += 1;
        if state.all_complete() || state.step >= params.max_steps {
            break;
        }
    }
    Ok(SimResult::from_state(&state))
}
