//! Functional diversity indices and agent similarity.
//!
//! IFDS, DFD and SDI are Blau-type indices `(1 - sum p_j^2) / (1 - 1/N)`
//! over different distributions: one agent's skill proportions, the team's
//! dominant-function counts, and the team's aggregate skill mass.

use crate::model::{Agent, ModelParams, Team};
use crate::{Error, Result};

/// Normalized Blau index of a non-negative weight vector over `n_categories`.
fn blau(weights: impl Iterator<Item = f64> + Clone, n_categories: usize) -> Result<f64> {
    if n_categories < 2 {
        return Err(Error::TooFewFunctions(n_categories));
    }
    let total: f64 = weights.clone().sum();
    if total <= 0.0 {
        return Err(Error::ZeroSkillMass);
    }
    let concentration: f64 = weights.map(|w| (w / total).powi(2)).sum();
    let rho = 1.0 - 1.0 / n_categories as f64;
    Ok(((1.0 - concentration) / rho).clamp(0.0, 1.0))
}

/// Individual functional diversity score of one agent, computed on skill
/// proportions. 0 for a pure specialist, 1 for an absolute generalist.
pub fn ifds(agent: &Agent) -> Result<f64> {
    blau(agent.skills().iter().copied(), agent.n_functions())
}

/// Intrapersonal functional diversity: the team mean of IFDS.
pub fn ifd(team: &Team) -> Result<f64> {
    if team.is_empty() {
        return Err(Error::EmptyTeam);
    }
    let mut sum = 0.0;
    for a in team.agents() {
        sum += ifds(a)?;
    }
    Ok(sum / team.len() as f64)
}

/// Number of agents whose dominant function is `j`, for each function.
pub fn dominant_counts(team: &Team) -> Vec<usize> {
    let mut counts = vec![0; team.n_functions()];
    for a in team.agents() {
        counts[a.dominant_function()] += 1;
    }
    counts
}

/// Dominant function diversity of a counts vector over its functions.
pub fn dfd_from_counts(counts: &[usize]) -> Result<f64> {
    blau(counts.iter().map(|&c| c as f64), counts.len())
}

/// Dominant function diversity of a team.
pub fn dfd(team: &Team) -> Result<f64> {
    if team.is_empty() {
        return Err(Error::EmptyTeam);
    }
    dfd_from_counts(&dominant_counts(team))
}

/// Skill Diversity Index: Blau index of the team's aggregate skill mass per
/// function. Low values mean some functions are barely covered.
pub fn sdi(team: &Team) -> Result<f64> {
    if team.is_empty() {
        return Err(Error::EmptyTeam);
    }
    let n = team.n_functions();
    let mut mass = vec![0.0; n];
    for a in team.agents() {
        for (m, s) in mass.iter_mut().zip(a.skills()) {
            *m += s;
        }
    }
    blau(mass.into_iter(), n)
}

/// Euclidean distance between two raw skill vectors.
pub fn agent_distance(a: &Agent, b: &Agent) -> Result<f64> {
    skill_distance(a.skills(), b.skills())
}

pub fn skill_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

/// Symmetric, irreflexive "may exchange tasks" relation over a team.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollaborationGraph {
    n: usize,
    adjacency: Vec<bool>,
}

impl CollaborationGraph {
    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn connected(&self, m: usize, n: usize) -> bool {
        self.adjacency[m * self.n + n]
    }

    pub fn collaborators(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&n| self.connected(m, n))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&c| c).count() / 2
    }

    /// Collaborating pairs over all unordered pairs; 0 for teams below two.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let pairs = self.n * (self.n - 1) / 2;
        self.edge_count() as f64 / pairs as f64
    }
}

/// Connects agents closer than `tau * omega * sqrt(2)`.
pub fn collaboration_graph(team: &Team, params: &ModelParams) -> CollaborationGraph {
    let n = team.len();
    let threshold = params.distance_threshold();
    let agents = team.agents();
    let mut adjacency = vec![false; n * n];
    for m in 0..n {
        for k in (m + 1)..n {
            // Team construction guarantees equal lengths.
            let d = skill_distance(agents[m].skills(), agents[k].skills()).unwrap_or(f64::INFINITY);
            if d < threshold {
                adjacency[m * n + k] = true;
                adjacency[k * n + m] = true;
            }
        }
    }
    CollaborationGraph { n, adjacency }
}
