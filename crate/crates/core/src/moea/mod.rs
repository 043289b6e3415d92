//! NSGA-II stage: initialization, non-dominated sorting, crowding, operators
//! and the generational loop with dimension truncation.

mod evolve;
mod operators;
mod sort;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use evolve::{evolve, reference_from, EvolveOutput, GenerationLog};
pub use operators::{init_population, mutate, polynomial_mutation, sbx, sbx_beta, sbx_pair};
pub use sort::{crowding, dominates, nondominated_sort, rank_and_crowd, sort_population};

use crate::error::{Error, Result};
use crate::evaluator::{evaluate_objectives, fitness, EvalResult, GainModel, DEFAULT_IOTA};
use crate::kinematics::HeadingVector;
use crate::scenario::Scenario;

/// An evaluated candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genes: HeadingVector,
    pub fitness: [f64; 2],
    pub eval: EvalResult,
    /// Non-domination level, 0 for the first front.
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn m2_ceil(&self) -> usize {
        (self.eval.m2_tilde.ceil() as usize).max(1)
    }
}

/// Deserialized settings; pool sizes left out follow the population size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MoeaConfigFile")]
pub struct MoeaConfig {
    /// Population size.
    pub n_p: usize,
    /// Generations.
    pub g_max: usize,
    /// Mating pool size.
    pub pd: usize,
    /// Crossover offspring per generation.
    pub pc: usize,
    /// Mutants per generation.
    pub pm: usize,
    pub eta_c: f64,
    pub eta_m: f64,
    /// Penalty coefficient for steering violations.
    pub iota: f64,
    pub seed: u64,
    /// Slots kept active beyond the first front's longest sailing time.
    pub truncation_margin: usize,
}

#[derive(Deserialize)]
struct MoeaConfigFile {
    n_p: Option<usize>,
    g_max: Option<usize>,
    pd: Option<usize>,
    pc: Option<usize>,
    pm: Option<usize>,
    eta_c: Option<f64>,
    eta_m: Option<f64>,
    iota: Option<f64>,
    seed: Option<u64>,
    truncation_margin: Option<usize>,
}

impl From<MoeaConfigFile> for MoeaConfig {
    fn from(f: MoeaConfigFile) -> Self {
        let d = MoeaConfig::with_population(f.n_p.unwrap_or(100), f.g_max.unwrap_or(200));
        Self {
            pd: f.pd.unwrap_or(d.pd),
            pc: f.pc.unwrap_or(d.pc),
            pm: f.pm.unwrap_or(d.pm),
            eta_c: f.eta_c.unwrap_or(d.eta_c),
            eta_m: f.eta_m.unwrap_or(d.eta_m),
            iota: f.iota.unwrap_or(d.iota),
            seed: f.seed.unwrap_or(d.seed),
            truncation_margin: f.truncation_margin.unwrap_or(d.truncation_margin),
            ..d
        }
    }
}

impl Default for MoeaConfig {
    fn default() -> Self {
        Self::with_population(100, 200)
    }
}

impl MoeaConfig {
    /// Defaults scaled to a population size: `pd = n_p/2`, `pc = n_p`,
    /// `pm = n_p/5`.
    pub fn with_population(n_p: usize, g_max: usize) -> Self {
        Self {
            n_p,
            g_max,
            pd: n_p / 2,
            pc: n_p,
            pm: n_p / 5,
            eta_c: 20.0,
            eta_m: 20.0,
            iota: DEFAULT_IOTA,
            seed: 0,
            truncation_margin: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_p < 2 {
            return Err(Error::Config("population size must be >= 2".into()));
        }
        if self.pd < 2 || self.pd > self.n_p {
            return Err(Error::Config(format!("pool size pd={} must lie in [2, n_p]", self.pd)));
        }
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) {
            return Err(Error::Config("distribution indices must be > 0".into()));
        }
        if self.iota.is_nan() || self.iota <= 0.0 {
            return Err(Error::Config("penalty coefficient must be > 0".into()));
        }
        Ok(())
    }

    /// Offspring evaluated per generation.
    pub fn evaluations_per_generation(&self) -> usize {
        self.pc + self.pm
    }
}

/// Scenario, channel model and penalty bundled for evaluation, plus an
/// optional dedicated thread pool.
pub struct Problem<'a> {
    pub scenario: &'a Scenario,
    pub gain: &'a dyn GainModel,
    pub iota: f64,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl<'a> Problem<'a> {
    pub fn new(scenario: &'a Scenario, gain: &'a dyn GainModel, iota: f64) -> Result<Self> {
        scenario.validate()?;
        Ok(Self { scenario, gain, iota, pool: None })
    }

    /// Caps evaluation at `threads` workers.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    pub fn with_pool(mut self, pool: Option<Arc<rayon::ThreadPool>>) -> Self {
        self.pool = pool;
        self
    }

    pub fn pool(&self) -> Option<Arc<rayon::ThreadPool>> {
        self.pool.clone()
    }

    pub fn evaluate(&self, genes: HeadingVector) -> Individual {
        let eval = evaluate_objectives(&genes, self.scenario, self.gain)
            .expect("scenario validated when the problem was built");
        let (f1, f2) = fitness(&eval, self.scenario, self.iota);
        Individual { genes, fitness: [f1, f2], eval, rank: 0, crowding: 0.0 }
    }

    /// Evaluates in parallel; output order matches input order.
    pub fn evaluate_all(&self, batch: Vec<HeadingVector>) -> Vec<Individual> {
        let run = || batch.into_par_iter().map(|g| self.evaluate(g)).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}
