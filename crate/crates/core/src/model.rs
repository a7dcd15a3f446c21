//! Agents, tasks, teams and model parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, TOLERANCE};

/// How team members' skill vectors are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationMode {
    /// Pure specialists mixed with absolute generalists.
    SpecGen,
    /// Per-agent IFDS drawn from a Gaussian around the team target.
    IfdsDistribution,
    /// Every agent has IFDS equal to the team target.
    UniformIfds,
}

/// When a task holder looks for a collaborator to pass the task to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassingScheme {
    /// Only when the holder can make no progress on the task.
    PassIfStuck,
    /// Every step, to the best idle collaborator if it beats the holder.
    AlwaysPass,
}

impl std::fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GenerationMode::SpecGen => "spec_gen",
            GenerationMode::IfdsDistribution => "ifds_distribution",
            GenerationMode::UniformIfds => "uniform_ifds",
        })
    }
}

impl std::fmt::Display for PassingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PassingScheme::PassIfStuck => "pass_if_stuck",
            PassingScheme::AlwaysPass => "always_pass",
        })
    }
}

impl std::str::FromStr for GenerationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "spec_gen" | "specgen" => Ok(GenerationMode::SpecGen),
            "ifds_distribution" => Ok(GenerationMode::IfdsDistribution),
            "uniform_ifds" => Ok(GenerationMode::UniformIfds),
            _ => Err(Error::InvalidParams(format!(
                "unknown generation mode '{s}' (expected spec_gen, ifds_distribution or uniform_ifds)"
            ))),
        }
    }
}

impl std::str::FromStr for PassingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "pass_if_stuck" => Ok(PassingScheme::PassIfStuck),
            "always_pass" => Ok(PassingScheme::AlwaysPass),
            _ => Err(Error::InvalidParams(format!(
                "unknown passing scheme '{s}' (expected pass_if_stuck or always_pass)"
            ))),
        }
    }
}

/// Full parameter set of the model. `Default` gives the standard values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_functions: usize,
    pub n_agents: usize,
    pub n_tasks: usize,
    /// Total skill strength of every agent.
    pub omega: f64,
    /// Total work requirement of every task.
    pub theta: f64,
    /// Similarity threshold as a fraction of the largest possible
    /// inter-agent distance `omega * sqrt(2)`.
    pub tau: f64,
    /// Randomly place non-dominant skill values (`true`) or lay them out in
    /// increasing function order (`false`).
    pub mix_skills: bool,
    pub generation_mode: GenerationMode,
    /// Width of the per-agent IFDS distribution, from 1 to `n_agents / 2`.
    pub delta: f64,
    pub passing_scheme: PassingScheme,
    pub replicates: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n_functions: 9,
            n_agents: 10,
            n_tasks: 7,
            omega: 10.0,
            theta: 10.0,
            tau: 0.8,
            mix_skills: true,
            generation_mode: GenerationMode::IfdsDistribution,
            delta: 5.0,
            passing_scheme: PassingScheme::PassIfStuck,
            replicates: 10,
            max_steps: 250,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        for (name, v) in [
            ("n_functions", self.n_functions),
            ("n_agents", self.n_agents),
            ("n_tasks", self.n_tasks),
            ("replicates", self.replicates),
            ("max_steps", self.max_steps),
        ] {
            if v < 1 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be non-negative, got {}", self.tau));
        }
        let delta_max = self.max_delta();
        if !(self.delta >= 1.0 && self.delta <= delta_max) {
            return bad(format!("delta must lie in [1, {delta_max}], got {}", self.delta));
        }
        Ok(())
    }

    /// Upper bound of `delta`: half the team size, but never below 1 so that
    /// single-agent teams stay valid.
    pub fn max_delta(&self) -> f64 {
        (self.n_agents as f64 / 2.0).max(1.0)
    }

    /// Largest Euclidean distance between two agents whose skills sum to omega.
    pub fn max_distance(&self) -> f64 {
        self.omega * std::f64::consts::SQRT_2
    }

    /// Absolute distance threshold below which two agents collaborate.
    pub fn distance_threshold(&self) -> f64 {
        self.tau * self.max_distance()
    }
}

/// A team member: a skill-strength vector with a designated strongest skill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: usize,
    skills: Vec<f64>,
    dominant_function: usize,
}

impl Agent {
    /// Builds an agent from a skill vector; ties for the strongest skill
    /// (within [`TOLERANCE`]) are broken uniformly at random.
    pub fn from_skills<R: Rng + ?Sized>(id: usize, skills: Vec<f64>, rng: &mut R) -> Result<Self> {
        check_skills(&skills)?;
        let max = skills.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..skills.len()).filter(|&j| skills[j] >= max - TOLERANCE).collect();
        let dominant_function = if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.random_range(0..tied.len())]
        };
        Ok(Agent {
            id,
            skills,
            dominant_function,
        })
    }

    /// Builds an agent whose strongest skill is known in advance.
    pub fn with_dominant(id: usize, skills: Vec<f64>, dominant_function: usize) -> Result<Self> {
        check_skills(&skills)?;
        if dominant_function >= skills.len() {
            return Err(Error::InvalidAgent(format!(
                "dominant function {dominant_function} out of range for {} skills",
                skills.len()
            )));
        }
        let d = skills[dominant_function];
        if skills.iter().any(|&s| s > d + TOLERANCE) {
            return Err(Error::InvalidAgent(format!(
                "skill {dominant_function} is not the strongest"
            )));
        }
        Ok(Agent {
            id,
            skills,
            dominant_function,
        })
    }

    pub fn skills(&self) -> &[f64] {
        &self.skills
    }

    pub fn dominant_function(&self) -> usize {
        self.dominant_function
    }

    pub fn n_functions(&self) -> usize {
        self.skills.len()
    }

    pub fn total_skill(&self) -> f64 {
        self.skills.iter().sum()
    }
}

fn check_skills(skills: &[f64]) -> Result<()> {
    if skills.is_empty() {
        return Err(Error::InvalidAgent("empty skill vector".into()));
    }
    if let Some(s) = skills.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::InvalidAgent(format!(
            "skill strengths must be finite and non-negative, got {s}"
        )));
    }
    if skills.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidAgent("skill strengths sum to zero".into()));
    }
    Ok(())
}

/// A task: remaining work per function component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: usize,
    requirements: Vec<f64>,
    initial_components: usize,
}

impl Task {
    pub fn new(id: usize, requirements: Vec<f64>) -> Result<Self> {
        if requirements.is_empty() {
            return Err(Error::InvalidTask("empty requirement vector".into()));
        }
        if let Some(r) = requirements.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidTask(format!(
                "requirements must be finite and non-negative, got {r}"
            )));
        }
        let initial_components = requirements.iter().filter(|&&r| r > 0.0).count();
        Ok(Task {
            id,
            requirements,
            initial_components,
        })
    }

    pub fn requirements(&self) -> &[f64] {
        &self.requirements
    }

    pub fn initial_components(&self) -> usize {
        self.initial_components
    }

    pub fn open_components(&self) -> usize {
        self.requirements.iter().filter(|&&r| r > 0.0).count()
    }

    pub fn is_complete(&self) -> bool {
        self.requirements.iter().all(|&r| r <= 0.0)
    }

    pub fn remaining_work(&self) -> f64 {
        self.requirements.iter().sum()
    }

    /// Subtracts `skills` from every open component, clamping at zero.
    /// Components left at or below [`TOLERANCE`] snap to zero. Returns the
    /// number of components completed by this call.
    pub fn apply_skills(&mut self, skills: &[f64]) -> usize {
        let mut completed = 0;
        for (r, &p) in self.requirements.iter_mut().zip(skills) {
            if *r <= 0.0 {
                continue;
            }
            let left = *r - p;
            if left <= TOLERANCE {
                *r = 0.0;
                completed += 1;
            } else {
                *r = left;
            }
        }
        completed
    }
}

/// An ordered collection of agents sharing one skill-vector length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Team {
    agents: Vec<Agent>,
}

impl Team {
    pub fn new(agents: Vec<Agent>) -> Result<Self> {
        if let Some(first) = agents.first() {
            let n = first.n_functions();
            if let Some(a) = agents.iter().find(|a| a.n_functions() != n) {
                return Err(Error::LengthMismatch(n, a.n_functions()));
            }
        }
        Ok(Team { agents })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn n_functions(&self) -> usize {
        self.agents.first().map_or(0, Agent::n_functions)
    }
}
