//! Task and team generation.
//!
//! Teams are built to realize a requested (IFD, DFD) pair. Dominant
//! functions come from the counts vector whose DFD is closest to the target;
//! per-agent skill vectors follow a discrete half-normal profile whose width
//! is tuned to hit each agent's IFDS target.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Open01};
use serde::{Deserialize, Serialize};

use crate::diversity::{dfd_from_counts, ifd};
use crate::model::{Agent, GenerationMode, ModelParams, Task, Team};
use crate::{Error, Result};

/// IFDS standard deviation per unit of `delta`.
pub const IFDS_SD_PER_DELTA: f64 = 0.05;
/// Achieved team IFD must be this close to the target.
pub const IFD_TOLERANCE: f64 = 1e-3;
/// Per-agent IFDS targets are matched to this precision.
pub const IFDS_TOLERANCE: f64 = 1e-6;
const REBALANCE_ITERATIONS: usize = 100;
const SIGMA_MIN: f64 = 1e-3;
const SIGMA_MAX: f64 = 1e7;

/// Requested team composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamSpec {
    pub target_ifd: f64,
    pub target_dfd: f64,
    pub mode: GenerationMode,
    pub delta: f64,
    pub mix_skills: bool,
}

impl TeamSpec {
    /// Spec for the given targets, taking mode, delta and mixing from `params`.
    pub fn from_params(params: &ModelParams, target_ifd: f64, target_dfd: f64) -> Self {
        TeamSpec {
            target_ifd,
            target_dfd,
            mode: params.generation_mode,
            delta: params.delta,
            mix_skills: params.mix_skills,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("target_ifd", self.target_ifd), ("target_dfd", self.target_dfd)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.delta >= 1.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParams(format!("delta must be >= 1, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Draws a task with i.i.d. uniform component requirements rescaled to sum
/// to `theta`.
pub fn generate_task<R: Rng + ?Sized>(id: usize, params: &ModelParams, rng: &mut R) -> Task {
    let raw: Vec<f64> = (0..params.n_functions).map(|_| Open01.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let requirements = raw.into_iter().map(|r| r * params.theta / total).collect();
    Task::new(id, requirements).expect("positive finite requirements")
}

pub fn generate_tasks<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Vec<Task> {
    (0..params.n_tasks).map(|k| generate_task(k, params, rng)).collect()
}

/// Counts of agents per dominant function (sorted non-increasing, length
/// `n_functions`) whose DFD is closest to `target_dfd`.
///
/// The search walks non-increasing count vectors in ascending lexicographic
/// order with branch-and-bound on the reachable sum of squares, so ties
/// resolve to the lexicographically smallest vector.
pub fn dominant_counts_for_dfd(target_dfd: f64, n_agents: usize, n_functions: usize) -> Result<Vec<usize>> {
    if n_agents == 0 || n_functions == 0 {
        return Err(Error::InvalidParams(
            "dominant counts need at least one agent and one function".into(),
        ));
    }
    if !(0.0..=1.0).contains(&target_dfd) {
        return Err(Error::InvalidParams(format!(
            "target DFD must lie in [0, 1], got {target_dfd}"
        )));
    }
    if n_functions == 1 {
        return Ok(vec![n_agents]);
    }
    let n = n_agents as f64;
    let rho = 1.0 - 1.0 / n_functions as f64;
    // DFD = (1 - S/n^2)/rho, so the error is proportional to |S - S*|.
    let target_sq = n * n * (1.0 - target_dfd * rho);

    let mut search = CountSearch {
        target_sq,
        slots: n_functions,
        prefix: Vec::with_capacity(n_functions),
        best: Vec::new(),
        best_err: f64::INFINITY,
    };
    search.descend(n_agents, n_agents, 0);
    let mut best = search.best;
    best.resize(n_functions, 0);
    Ok(best)
}

struct CountSearch {
    target_sq: f64,
    slots: usize,
    prefix: Vec<usize>,
    best: Vec<usize>,
    best_err: f64,
}

impl CountSearch {
    const EPS: f64 = 1e-9;

    fn descend(&mut self, remaining: usize, cap: usize, sum_sq: usize) {
        if remaining == 0 {
            let err = (sum_sq as f64 - self.target_sq).abs();
            if err < self.best_err - Self::EPS {
                self.best_err = err;
                self.best = self.prefix.clone();
            }
            return;
        }
        let slots = self.slots - self.prefix.len();
        let lo = remaining.div_ceil(slots);
        for part in lo..=cap.min(remaining) {
            let rest = remaining - part;
            let base = sum_sq + part * part;
            let (min_sq, max_sq) = sum_sq_range(rest, slots - 1, part);
            let lower = base as f64 + min_sq as f64;
            let upper = base as f64 + max_sq as f64;
            let bound = (lower - self.target_sq).max(self.target_sq - upper).max(0.0);
            if bound > self.best_err - Self::EPS {
                continue;
            }
            self.prefix.push(part);
            self.descend(rest, part, base);
            self.prefix.pop();
        }
    }
}

/// Smallest and largest sum of squares of `total` split into at most
/// `slots` parts no larger than `cap`.
fn sum_sq_range(total: usize, slots: usize, cap: usize) -> (usize, usize) {
    if total == 0 {
        return (0, 0);
    }
    let q = total / slots;
    let r = total % slots;
    let min = r * (q + 1) * (q + 1) + (slots - r) * q * q;
    let max = (total / cap) * cap * cap + (total % cap).pow(2);
    (min, max)
}

/// Largest DFD reachable with `n_agents` over `n_functions`.
pub fn max_dfd(n_agents: usize, n_functions: usize) -> f64 {
    if n_agents == 0 || n_functions < 2 {
        return 0.0;
    }
    let q = n_agents / n_functions;
    let r = n_agents % n_functions;
    let mut counts = vec![q; n_functions];
    counts.iter_mut().take(r).for_each(|c| *c += 1);
    dfd_from_counts(&counts).unwrap_or(0.0)
}

/// Function labels for the count slots: shuffled when skills are mixed,
/// identity otherwise.
fn function_labels<R: Rng + ?Sized>(n_functions: usize, mix: bool, rng: &mut R) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n_functions).collect();
    if mix {
        labels.shuffle(rng);
    }
    labels
}

fn expand_counts(counts: &[usize], labels: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .zip(labels)
        .flat_map(|(&c, &f)| std::iter::repeat_n(f, c))
        .collect()
}

/// Team of pure specialists (one skill equal to omega) followed by
/// `n_generalists` absolute generalists (all skills omega / N). `counts`
/// gives how many specialists sit in each function slot.
pub fn generate_specgen_team<R: Rng + ?Sized>(
    n_generalists: usize,
    counts: &[usize],
    params: &ModelParams,
    rng: &mut R,
) -> Result<Team> {
    let nf = params.n_functions;
    if n_generalists > params.n_agents {
        return Err(Error::Generation(format!(
            "{n_generalists} generalists exceed a team of {}",
            params.n_agents
        )));
    }
    let n_specialists = params.n_agents - n_generalists;
    if counts.len() != nf || counts.iter().sum::<usize>() != n_specialists {
        return Err(Error::Generation(format!(
            "counts {counts:?} do not place {n_specialists} specialists over {nf} functions"
        )));
    }
    let labels = function_labels(nf, params.mix_skills, rng);
    let mut agents = Vec::with_capacity(params.n_agents);
    for (id, f) in expand_counts(counts, &labels).into_iter().enumerate() {
        let mut skills = vec![0.0; nf];
        skills[f] = params.omega;
        agents.push(Agent::with_dominant(id, skills, f)?);
    }
    for id in n_specialists..params.n_agents {
        let skills = vec![params.omega / nf as f64; nf];
        agents.push(Agent::from_skills(id, skills, rng)?);
    }
    Team::new(agents)
}

/// Discrete half-normal profile `exp(-m^2 / 2 sigma^2)`, m = 0..n, scaled to
/// sum to `omega`. Non-increasing in m.
fn half_normal_profile(sigma: f64, n: usize, omega: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|m| (-((m * m) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v * omega / total).collect()
}

fn profile_ifds(values: &[f64]) -> f64 {
    let total: f64 = values.iter().sum();
    let conc: f64 = values.iter().map(|v| (v / total).powi(2)).sum();
    let rho = 1.0 - 1.0 / values.len() as f64;
    ((1.0 - conc) / rho).clamp(0.0, 1.0)
}

/// Skill vector summing to omega with IFDS equal to `target_ifds`. The
/// largest value goes to `dominant`; the rest are shuffled over the other
/// functions when `mix` is set, or laid out in increasing function order.
pub fn skill_vector_for_ifds<R: Rng + ?Sized>(
    target_ifds: f64,
    dominant: usize,
    mix: bool,
    params: &ModelParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = params.n_functions;
    if n < 2 {
        return Err(Error::TooFewFunctions(n));
    }
    if dominant >= n {
        return Err(Error::Generation(format!("dominant function {dominant} out of range")));
    }
    if !(0.0..=1.0).contains(&target_ifds) {
        return Err(Error::Generation(format!("IFDS target {target_ifds} outside [0, 1]")));
    }

    let profile = if target_ifds <= 0.0 {
        let mut v = vec![0.0; n];
        v[0] = params.omega;
        v
    } else if target_ifds >= 1.0 {
        vec![params.omega / n as f64; n]
    } else {
        let sigma = solve_sigma(target_ifds, n)?;
        half_normal_profile(sigma, n, params.omega)
    };

    let mut rest: Vec<usize> = (0..n).filter(|&j| j != dominant).collect();
    if mix {
        rest.shuffle(rng);
    }
    let mut skills = vec![0.0; n];
    skills[dominant] = profile[0];
    for (&j, &v) in rest.iter().zip(&profile[1..]) {
        skills[j] = v;
    }
    Ok(skills)
}

/// Bisection on log(sigma); IFDS of the profile is increasing in sigma.
fn solve_sigma(target: f64, n: usize) -> Result<f64> {
    let f = |log_sigma: f64| profile_ifds(&half_normal_profile(log_sigma.exp(), n, 1.0));
    let (mut lo, mut hi) = (SIGMA_MIN.ln(), SIGMA_MAX.ln());
    if !(f(lo) <= target && target <= f(hi)) {
        return Err(Error::Generation(format!("cannot bracket IFDS target {target}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - target).abs() <= 1e-13 {
            return Ok(mid.exp());
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    if (f(mid) - target).abs() > IFDS_TOLERANCE {
        return Err(Error::Generation(format!(
            "bisection did not reach IFDS target {target}"
        )));
    }
    Ok(mid.exp())
}

/// Per-agent IFDS targets with mean exactly `target` (to within
/// [`IFD_TOLERANCE`]): Gaussian draws truncated to [0, 1], then shifted and
/// re-clamped until the mean matches.
pub fn ifds_targets<R: Rng + ?Sized>(target: f64, sd: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let normal = Normal::new(target, sd).map_err(|e| Error::Generation(format!("IFDS distribution: {e}")))?;
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            for _ in 0..1000 {
                let x = normal.sample(rng);
                if (0.0..=1.0).contains(&x) {
                    return x;
                }
            }
            target
        })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    for _ in 0..REBALANCE_ITERATIONS {
        let shift = target - mean(&values);
        if shift.abs() <= 1e-12 {
            break;
        }
        values.iter_mut().for_each(|x| *x = (*x + shift).clamp(0.0, 1.0));
    }
    let achieved = mean(&values);
    if (achieved - target).abs() > IFD_TOLERANCE {
        return Err(Error::Generation(format!(
            "IFDS targets average {achieved}, wanted {target}"
        )));
    }
    Ok(values)
}

/// Builds a team realizing `spec`.
///
/// SpecGen teams get `round(target_ifd * n_agents)` generalists and spread
/// their specialists per the DFD target. Other modes draw per-agent IFDS
/// targets (identical ones for [`GenerationMode::UniformIfds`]) and assign
/// dominant functions per [`dominant_counts_for_dfd`]. The achieved DFD can
/// deviate from the counts when near-uniform agents tie on their strongest
/// skill.
pub fn generate_team<R: Rng + ?Sized>(spec: &TeamSpec, params: &ModelParams, rng: &mut R) -> Result<Team> {
    spec.validate()?;
    let n_agents = params.n_agents;
    let nf = params.n_functions;
    let local = ModelParams {
        generation_mode: spec.mode,
        delta: spec.delta,
        mix_skills: spec.mix_skills,
        ..params.clone()
    };

    if spec.mode == GenerationMode::SpecGen {
        let n_generalists = ((spec.target_ifd * n_agents as f64).round() as usize).min(n_agents);
        let n_specialists = n_agents - n_generalists;
        let counts = if n_specialists == 0 {
            vec![0; nf]
        } else {
            dominant_counts_for_dfd(spec.target_dfd, n_specialists, nf)?
        };
        return generate_specgen_team(n_generalists, &counts, &local, rng);
    }

    let targets = match spec.mode {
        GenerationMode::UniformIfds => vec![spec.target_ifd; n_agents],
        _ => ifds_targets(spec.target_ifd, IFDS_SD_PER_DELTA * spec.delta, n_agents, rng)?,
    };
    let counts = dominant_counts_for_dfd(spec.target_dfd, n_agents, nf)?;
    let labels = function_labels(nf, spec.mix_skills, rng);
    let dominants = expand_counts(&counts, &labels);

    let mut agents = Vec::with_capacity(n_agents);
    for (id, (&t, &dom)) in targets.iter().zip(&dominants).enumerate() {
        let skills = skill_vector_for_ifds(t, dom, spec.mix_skills, &local, rng)?;
        agents.push(Agent::from_skills(id, skills, rng)?);
    }
    let team = Team::new(agents)?;
    let achieved = ifd(&team)?;
    if (achieved - spec.target_ifd).abs() > IFD_TOLERANCE {
        return Err(Error::Generation(format!(
            "team IFD {achieved} misses target {}",
            spec.target_ifd
        )));
    }
    Ok(team)
}
