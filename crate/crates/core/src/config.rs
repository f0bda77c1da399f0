//! The benchmark configuration file (TOML) and the solver registry
//! built from it. Every section is optional and falls back to the
//! built-in defaults; CLI flags override file values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IkError, Result};
use crate::genetic::{GeneticSolver, GeneticSolverConfig};
use crate::newton::{JacobianSolverConfig, NewtonRestartSolver, NewtonSolver};
use crate::race::{RaceConfig, RaceSolver};
use crate::solve::SolverRegistry;
use crate::sqp::{SqpConfig, SqpSolver};
use crate::workspace::sha256_hex;

/// Solver sections of the config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSuiteConfig {
    pub newton: JacobianSolverConfig,
    pub sqp: SqpConfig,
    pub genetic: GeneticSolverConfig,
}

impl SolverSuiteConfig {
    pub fn validate(&self) -> Result<()> {
        self.newton.validate()?;
        self.sqp.validate()?;
        self.genetic.validate()
    }

    /// Build the full registry: newton, newton-rr, sqp, race, genetic.
    pub fn registry(&self) -> SolverRegistry {
        SolverRegistry::new(vec![
            Box::new(NewtonSolver {
                config: self.newton.clone(),
            }),
            Box::new(NewtonRestartSolver {
                config: self.newton.clone(),
            }),
            Box::new(SqpSolver {
                config: self.sqp.clone(),
            }),
            Box::new(RaceSolver {
                config: RaceConfig {
                    newton: self.newton.clone(),
                    sqp: self.sqp.clone(),
                },
            }),
            Box::new(GeneticSolver {
                config: self.genetic.clone(),
            }),
        ])
    }

    /// Digest of the suite configuration, recorded in dataset headers.
    pub fn digest(&self) -> String {
        sha256_hex(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

/// General run knobs shared by the CLI subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Per-solve wall-clock budget, seconds.
    pub budget: f64,
    pub rng_seed: u64,
    /// Generation-capped, wall-clock-free mode for reproducible runs.
    pub deterministic: bool,
    /// Worker threads for sample-level parallelism.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            budget: 1.0,
            rng_seed: 42,
            deterministic: false,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Root of the TOML config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FileConfig {
    pub run: RunConfig,
    pub newton: JacobianSolverConfig,
    pub sqp: SqpConfig,
    pub genetic: GeneticSolverConfig,
    pub sampling: crate::workspace::SamplingOptions,
}

impl FileConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| IkError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    pub fn suite(&self) -> SolverSuiteConfig {
        SolverSuiteConfig {
            newton: self.newton.clone(),
            sqp: self.sqp.clone(),
            genetic: self.genetic.clone(),
        }
    }

    /// JSON echo of the effective configuration, embedded in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
