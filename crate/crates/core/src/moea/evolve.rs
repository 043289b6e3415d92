use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operators::{init_population, mutate, sbx};
use super::sort::sort_population;
use super::{Individual, MoeaConfig, Problem};
use crate::error::Result;
use crate::kinematics::{smooth, HeadingVector};
use crate::metrics::hypervolume2d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_f1: f64,
    pub best_f2: f64,
    pub front_size: usize,
    pub hypervolume: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveOutput {
    /// Final population sorted by (rank, crowding).
    pub population: Vec<Individual>,
    pub log: Vec<GenerationLog>,
    /// Reference point used for the logged hypervolume.
    pub reference: [f64; 2],
    pub evaluations: usize,
    /// Active gene count after the last generation.
    pub active_dims: usize,
}

/// Componentwise worst point of `points`, pushed out by 10%.
pub fn reference_from(points: &[[f64; 2]]) -> [f64; 2] {
    let mut r = [f64::NEG_INFINITY; 2];
    for p in points {
        r[0] = r[0].max(p[0]);
        r[1] = r[1].max(p[1]);
    }
    r.map(|v| if v > 0.0 { 1.1 * v } else { v + 0.1 * v.abs().max(1.0) })
}

fn first_front(pop: &[Individual]) -> Vec<[f64; 2]> {
    pop.iter().filter(|i| i.rank == 0).map(|i| i.fitness).collect()
}

fn log_entry(generation: usize, pop: &[Individual], reference: [f64; 2]) -> GenerationLog {
    let front = first_front(pop);
    GenerationLog {
        generation,
        best_f1: pop.iter().map(|i| i.fitness[0]).fold(f64::INFINITY, f64::min),
        best_f2: pop.iter().map(|i| i.fitness[1]).fold(f64::INFINITY, f64::min),
        front_size: front.len(),
        hypervolume: hypervolume2d(&front, reference),
    }
}

/// Genes that still influence the first front: its longest sailing time plus
/// a margin, capped at the vector length.
fn active_dimension(pop: &[Individual], margin: usize, len: usize) -> usize {
    let longest = pop.iter().filter(|i| i.rank == 0).map(|i| i.m2_ceil()).max().unwrap_or(len);
    (longest + margin).clamp(1, len)
}

/// Runs the NSGA-II stage for exactly `config.g_max` generations.
pub fn evolve<R: Rng>(config: &MoeaConfig, problem: &Problem<'_>, rng: &mut R) -> Result<EvolveOutput> {
    config.validate()?;
    let scenario = problem.scenario;
    let bounds = scenario.phi_bounds;
    let len = scenario.slots();

    let mut pop = problem.evaluate_all(init_population(config, scenario, rng));
    let mut evaluations = pop.len();
    sort_population(&mut pop);
    let reference = reference_from(&first_front(&pop));
    let mut log = vec![log_entry(0, &pop, reference)];
    let mut active = active_dimension(&pop, config.truncation_margin, len);

    for generation in 1..=config.g_max {
        let pool = &pop[..config.pd.min(pop.len())];
        let mut offspring: Vec<HeadingVector> = Vec::with_capacity(config.pc + config.pm);

        while offspring.len() < config.pc {
            let pair = sample(rng, pool.len(), 2);
            let (a, b) = (&pool[pair.index(0)], &pool[pair.index(1)]);
            let (ca, cb) = sbx(&a.genes, &b.genes, config.eta_c, bounds, active, rng);
            offspring.push(ca);
            if offspring.len() < config.pc {
                offspring.push(cb);
            }
        }

        let picks: Vec<usize> = if config.pm <= pool.len() {
            sample(rng, pool.len(), config.pm).into_vec()
        } else {
            (0..config.pm).map(|_| rng.random_range(0..pool.len())).collect()
        };
        for k in picks {
            let parent = &pool[k];
            let mut genes = parent.genes.clone();
            smooth(&mut genes[..active], scenario.dphi_max, bounds);
            offspring.push(mutate(&genes, config.eta_m, parent.m2_ceil(), bounds, active, rng));
        }

        evaluations += offspring.len();
        pop.extend(problem.evaluate_all(offspring));
        sort_population(&mut pop);
        pop.truncate(config.n_p);
        // re-rank so crowding reflects the surviving population
        sort_population(&mut pop);
        active = active_dimension(&pop, config.truncation_margin, len);
        log.push(log_entry(generation, &pop, reference));
    }

    Ok(EvolveOutput { population: pop, log, reference, evaluations, active_dims: active })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgm::{synthesize_duct_map, DuctModelParams, GridSpec};
    use crate::evaluator::MapGain;
    use crate::rng::{stream, DOMAIN_MOEA};
    use crate::scenario::Scenario;

    fn small_case() -> (Scenario, crate::cgm::ChannelGainMap) {
        let s = Scenario { d_bits: 2e10, t_max: 2400.0, ..Scenario::case(1).unwrap() }.with_sub_slot(5.0);
        let s = Scenario { a: crate::geom::Point3::new(-20e3, 20e3, 0.0), b: crate::geom::Point3::new(10e3, 25e3, 0.0), ..s };
        let map = synthesize_duct_map(&DuctModelParams::default(), GridSpec::default(), 10e9).unwrap();
        (s, map)
    }

    #[test]
    fn zero_generations_returns_initial_population() {
        let (s, map) = small_case();
        let gain = MapGain::new(&map, &s);
        let problem = Problem::new(&s, &gain, 1e3).unwrap();
        let cfg = MoeaConfig { g_max: 0, ..MoeaConfig::with_population(20, 0) };
        let out = evolve(&cfg, &problem, &mut stream(1, DOMAIN_MOEA, 0)).unwrap();
        assert_eq!(out.population.len(), 20);
        assert_eq!(out.evaluations, 20);
        assert_eq!(out.log.len(), 1);
    }

    #[test]
    fn population_size_constant_and_front_hv_monotone() {
        let (s, map) = small_case();
        let gain = MapGain::new(&map, &s);
        let problem = Problem::new(&s, &gain, 1e3).unwrap();
        let cfg = MoeaConfig::with_population(24, 15);
        let out = evolve(&cfg, &problem, &mut stream(2, DOMAIN_MOEA, 0)).unwrap();
        assert_eq!(out.population.len(), 24);
        assert_eq!(out.log.len(), 16);
        for w in out.log.windows(2) {
            assert!(w[1].hypervolume >= w[0].hypervolume, "{:?}", w);
        }
        assert_eq!(out.evaluations, 24 + 15 * (24 + 4));
        assert!(out.active_dims <= s.slots());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let (s, map) = small_case();
        let gain = MapGain::new(&map, &s);
        let cfg = MoeaConfig::with_population(16, 5);
        let p1 = Problem::new(&s, &gain, 1e3).unwrap().with_threads(1).unwrap();
        let p4 = Problem::new(&s, &gain, 1e3).unwrap().with_threads(4).unwrap();
        let a = evolve(&cfg, &p1, &mut stream(9, DOMAIN_MOEA, 0)).unwrap();
        let b = evolve(&cfg, &p4, &mut stream(9, DOMAIN_MOEA, 0)).unwrap();
        assert_eq!(a.population, b.population);
    }
}
