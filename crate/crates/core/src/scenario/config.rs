use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::error::Result;
use crate::moea::MoeaConfig;
use crate::pso::PsoConfig;

/// Optimizer settings for one planning run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub moea: MoeaConfig,
    pub pso: PsoConfig,
    /// Worker threads for evaluation; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl PlannerConfig {
    /// Population, generation and refinement budget in one call.
    pub fn with_budget(n_p: usize, g_max: usize, pso_g_max: usize) -> Self {
        Self {
            moea: MoeaConfig::with_population(n_p, g_max),
            pso: PsoConfig { g_max: pso_g_max, ..PsoConfig::default() },
            threads: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.moea.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.moea.seed
    }

    pub fn validate(&self) -> Result<()> {
        self.moea.validate()?;
        self.pso.validate()
    }
}

/// On-disk JSON layout: a scenario and its planner settings. Every field is
/// optional and falls back to the defaults.
///
/// ```json
/// {
///   "scenario": { "a": {"x": -50000, "y": 50000, "z": 0}, "b": {"x": 70000, "y": 70000, "z": 0} },
///   "planner": { "moea": { "n_p": 60, "g_max": 80 }, "pso": { "g_max": 40 } }
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub planner: PlannerConfig,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        file.scenario.validate()?;
        file.planner.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
