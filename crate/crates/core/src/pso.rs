//! Particle-swarm refinement of an evaluated NSGA-II population.
//!
//! Every population member becomes a particle. The swarm follows its personal
//! bests and the head of the non-dominated archive, and every new position is
//! merged into the archive.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::HeadingVector;
use crate::metrics::{hypervolume2d, lexicographic};
use crate::moea::{dominates, nondominated_sort, reference_from, GenerationLog, Individual, Problem};
use crate::rng::{stream, Rng, DOMAIN_PSO_PARTICLE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    /// Refinement generations.
    pub g_max: usize,
    pub c1: f64,
    pub c2: f64,
    /// Inertia at the first generation.
    pub w1: f64,
    /// Inertia at the last generation.
    pub w2: f64,
    /// Initial velocity bound as a fraction of the heading range.
    pub rho: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self { g_max: 100, c1: 1.5, c2: 1.5, w1: 0.9, w2: 0.4, rho: 0.1 }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let coeffs = [self.c1, self.c2, self.w1, self.w2, self.rho];
        if coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Config("PSO coefficients must be finite and >= 0".into()));
        }
        if self.w1 < self.w2 {
            return Err(Error::Config(format!("inertia must decay: w1={} < w2={}", self.w1, self.w2)));
        }
        Ok(())
    }
}

/// Linearly decaying inertia weight at generation `rho` of `g_max`.
pub fn inertia(rho: usize, w1: f64, w2: f64, g_max: usize) -> f64 {
    w1 - rho as f64 * (w1 - w2) / g_max.max(1) as f64
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: HeadingVector,
    pub velocity: Vec<f64>,
    pub best: Individual,
    rng: Rng,
}

impl Particle {
    fn new(member: &Individual, vmax: f64, rng: Rng) -> Self {
        let mut rng = rng;
        let velocity = (0..member.genes.len())
            .map(|_| if vmax > 0.0 { rng.random_range(-vmax..=vmax) } else { 0.0 })
            .collect();
        Self { position: member.genes.clone(), velocity, best: member.clone(), rng }
    }

    fn step(&mut self, w: f64, cfg: &PsoConfig, leader: &[f64], [lo, hi]: [f64; 2]) {
        for (j, p) in self.position.iter_mut().enumerate() {
            let r1: f64 = self.rng.random();
            let r2: f64 = self.rng.random();
            let v = w * self.velocity[j] + cfg.c1 * r1 * (self.best.genes[j] - *p) + cfg.c2 * r2 * (leader[j] - *p);
            self.velocity[j] = v;
            *p = (*p + v).clamp(lo, hi);
        }
    }

    /// Replaces the personal best when the new point dominates it, or with
    /// probability one half when neither dominates the other.
    fn update_best(&mut self, candidate: &Individual) {
        if dominates(&self.best.fitness, &candidate.fitness) {
            return;
        }
        if dominates(&candidate.fitness, &self.best.fitness) || self.rng.random_bool(0.5) {
            self.best = candidate.clone();
        }
    }
}

/// Mutually non-dominated set ordered by `(f1, f2)` with no duplicate gene
/// vectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Archive {
    members: Vec<Individual>,
}

impl Archive {
    /// Rank-0 members of `population`.
    pub fn from_population(population: &[Individual]) -> Self {
        let mut archive = Self::default();
        archive.merge(population.iter().cloned());
        archive
    }

    /// Adds candidates, then keeps only the first front. Among identical gene
    /// vectors the earliest one survives, so existing members win ties.
    pub fn merge<I: IntoIterator<Item = Individual>>(&mut self, candidates: I) {
        let mut pool = std::mem::take(&mut self.members);
        for c in candidates {
            if !pool.iter().any(|m| m.genes == c.genes) {
                pool.push(c);
            }
        }
        let fits: Vec<[f64; 2]> = pool.iter().map(|m| m.fitness).collect();
        let rank = nondominated_sort(&fits);
        let mut kept: Vec<Individual> = pool
            .into_iter()
            .zip(rank)
            .filter(|(_, r)| *r == 0)
            .map(|(mut m, _)| {
                m.rank = 0;
                m
            })
            .collect();
        kept.sort_by(|a, b| lexicographic(&a.fitness, &b.fitness));
        self.members = kept;
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The lexicographic head, used as the global leader.
    pub fn head(&self) -> Option<&Individual> {
        self.members.first()
    }

    pub fn feasible(&self) -> impl Iterator<Item = &Individual> {
        self.members.iter().filter(|m| m.eval.feasible)
    }

    pub fn fitnesses(&self) -> Vec<[f64; 2]> {
        self.members.iter().map(|m| m.fitness).collect()
    }

    pub fn hypervolume(&self, reference: [f64; 2]) -> f64 {
        hypervolume2d(&self.fitnesses(), reference)
    }

    fn log_entry(&self, generation: usize, reference: [f64; 2]) -> GenerationLog {
        let fits = self.fitnesses();
        GenerationLog {
            generation,
            best_f1: fits.iter().map(|f| f[0]).fold(f64::INFINITY, f64::min),
            best_f2: fits.iter().map(|f| f[1]).fold(f64::INFINITY, f64::min),
            front_size: fits.len(),
            hypervolume: hypervolume2d(&fits, reference),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsoOutput {
    pub archive: Archive,
    /// Archive state before refinement and after each generation.
    pub log: Vec<GenerationLog>,
    pub reference: [f64; 2],
    pub evaluations: usize,
}

/// Refines `population` for `config.g_max` generations. Each particle draws
/// from its own stream derived from `seed`.
pub fn refine(population: &[Individual], config: &PsoConfig, problem: &Problem<'_>, seed: u64) -> Result<PsoOutput> {
    refine_with_reference(population, config, problem, seed, None)
}

/// As [`refine`], with an explicit reference point for the hypervolume trace.
pub fn refine_with_reference(
    population: &[Individual],
    config: &PsoConfig,
    problem: &Problem<'_>,
    seed: u64,
    reference: Option<[f64; 2]>,
) -> Result<PsoOutput> {
    if population.is_empty() {
        return Err(Error::Config("PSO needs a non-empty population".into()));
    }
    config.validate()?;
    let bounds = problem.scenario.phi_bounds;
    let vmax = config.rho * (bounds[1] - bounds[0]);

    let mut archive = Archive::from_population(population);
    let reference = reference.unwrap_or_else(|| reference_from(&archive.fitnesses()));
    let mut log = vec![archive.log_entry(0, reference)];
    let mut particles: Vec<Particle> = population
        .iter()
        .enumerate()
        .map(|(i, m)| Particle::new(m, vmax, stream(seed, DOMAIN_PSO_PARTICLE, i as u64)))
        .collect();
    let mut evaluations = 0;

    for rho in 1..=config.g_max {
        let w = inertia(rho, config.w1, config.w2, config.g_max);
        let leader = archive.head().expect("archive is never empty").genes.clone();
        for p in &mut particles {
            p.step(w, config, &leader, bounds);
        }
        let evaluated = problem.evaluate_all(particles.iter().map(|p| p.position.clone()).collect());
        evaluations += evaluated.len();
        for (p, ind) in particles.iter_mut().zip(&evaluated) {
            p.update_best(ind);
        }
        archive.merge(evaluated);
        log.push(archive.log_entry(rho, reference));
    }

    Ok(PsoOutput { archive, log, reference, evaluations })
}

impl PsoOutput {
    pub fn hv_trace(&self) -> Vec<f64> {
        self.log.iter().map(|l| l.hypervolume).collect()
    }
}
