use crate::error::{PlanError, Result};
use crate::space::{distance, polyline_length, Config};
use crate::world::Scenario;

/// An ordered sequence of configurations with its cached Euclidean length.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSolution {
    configs: Vec<Config>,
    length: f64,
}

impl PathSolution {
    pub fn new(configs: Vec<Config>) -> Result<Self> {
        if configs.len() < 2 {
            return Err(PlanError::Contract(format!(
                "path needs at least 2 vertices, got {}",
                configs.len()
            )));
        }
        let dim = configs[0].dim();
        if let Some(bad) = configs.iter().find(|c| c.dim() != dim) {
            return Err(PlanError::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        let length = polyline_length(&configs);
        Ok(PathSolution { configs, length })
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn into_configs(self) -> Vec<Config> {
        self.configs
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn first(&self) -> &Config {
        &self.configs[0]
    }

    pub fn last(&self) -> &Config {
        &self.configs[self.configs.len() - 1]
    }

    pub fn reversed(&self) -> PathSolution {
        let configs: Vec<Config> = self.configs.iter().rev().cloned().collect();
        let length = polyline_length(&configs);
        PathSolution { configs, length }
    }

    /// Every segment passes the scenario's motion check.
    pub fn is_motion_valid(&self, scenario: &Scenario) -> bool {
        self.configs
            .windows(2)
            .all(|w| scenario.motion_valid(&w[0], &w[1]))
    }

    /// Starts at the scenario start and ends at one of its goals, both
    /// within `tol`.
    pub fn connects(&self, scenario: &Scenario, tol: f64) -> bool {
        distance(self.first(), scenario.start()) <= tol
            && scenario
                .goals()
                .iter()
                .any(|g| distance(self.last(), g) <= tol)
    }
}
