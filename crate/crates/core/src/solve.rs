//! Shared solver surface: results, budgets, cancellation and the
//! name-based solver registry.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::chain::{JointConfig, KinematicChain};
use crate::error::{IkError, Result};
use crate::pose::{Pose, PoseError};

/// Wall-clock budget for a single solve.
///
/// In deterministic mode wall-clock never influences control flow —
/// solvers terminate on iteration, restart or generation caps instead —
/// so identical inputs give identical outputs regardless of machine load.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    limit: Option<Duration>,
    deterministic: bool,
}

impl Budget {
    /// Wall-clock budget in seconds.
    pub fn seconds(s: f64) -> Self {
        Self {
            limit: Some(Duration::from_secs_f64(s)),
            deterministic: false,
        }
    }

    /// No wall-clock limit; iteration caps only.
    pub fn unlimited() -> Self {
        Self {
            limit: None,
            deterministic: false,
        }
    }

    /// Reproducible mode: no wall-clock control flow at all.
    pub fn deterministic() -> Self {
        Self {
            limit: None,
            deterministic: true,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn limit(&self) -> Option<Duration> {
        self.limit
    }
}

/// Cooperative cancellation flag shared between race branches.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Per-solve stop state derived from a [`Budget`] plus a cancel token.
#[derive(Debug, Clone)]
pub struct StopWatch {
    start: Instant,
    deadline: Option<Instant>,
    cancel: CancelToken,
}

impl StopWatch {
    pub fn start(budget: &Budget, cancel: CancelToken) -> Self {
        let start = Instant::now();
        Self {
            start,
            deadline: if budget.deterministic {
                None
            } else {
                budget.limit.map(|d| start + d)
            },
            cancel,
        }
    }

    /// True once the deadline passed or the solve was cancelled.
    /// Checked at iteration boundaries only; steps are never interrupted.
    pub fn expired(&self) -> bool {
        self.cancel.is_cancelled()
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Why a solver stopped iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Solver-internal tolerances satisfied.
    Tolerance,
    /// Error decrease stayed below the stall threshold.
    Stalled,
    /// Iteration / restart / generation cap reached.
    IterationCap,
    /// Wall-clock budget expired or the solve was cancelled.
    Budget,
}

/// Which predicate produced the `success` flag of a [`SolveResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessCriterion {
    /// Position < 10 mm and summed orientation error < 20 degrees.
    GraspSuccess,
    /// The solver's own convergence tolerances.
    SolverTolerance,
}

/// Outcome of one IK solve. The solution is always clamped feasible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver_name: String,
    pub solution: JointConfig,
    pub error: PoseError,
    pub success: bool,
    pub success_criterion: SuccessCriterion,
    pub termination: Termination,
    pub iterations: u64,
    /// Wall-clock seconds spent in the solve.
    pub elapsed: f64,
}

/// Common interface all solvers expose to the registry and benchmark.
///
/// `rng_seed` drives any randomness inside the solver; deterministic
/// solvers ignore it. Implementations are stateless between calls and
/// safe to invoke concurrently.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        seed: &JointConfig,
        rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult>;
}

/// Name-indexed solver collection; the CLI and benchmark select from it.
pub struct SolverRegistry {
    solvers: Vec<Box<dyn Solver>>,
}

impl SolverRegistry {
    pub fn new(solvers: Vec<Box<dyn Solver>>) -> Self {
        Self { solvers }
    }

    pub fn get(&self, name: &str) -> Result<&dyn Solver> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| IkError::UnknownSolver {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }
}

/// Scalar used for best-iterate tracking and stall detection: the norm
/// of the 6-vector twist error (position difference stacked with the
/// rotation vector of the relative rotation).
pub fn twist_error_norm(current: &Pose, target: &Pose) -> f64 {
    let dp = target.position - current.position;
    let rot = (target.orientation * current.orientation.inverse()).scaled_axis();
    (dp.norm_squared() + rot.norm_squared()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_budget_never_expires() {
        let watch = StopWatch::start(&Budget::deterministic(), CancelToken::new());
        assert!(!watch.expired());
    }

    #[test]
    fn cancel_token_expires_watch() {
        let token = CancelToken::new();
        let watch = StopWatch::start(&Budget::unlimited(), token.clone());
        assert!(!watch.expired());
        token.cancel();
        assert!(watch.expired());
    }

    #[test]
    fn zero_budget_expires_immediately() {
        let watch = StopWatch::start(&Budget::seconds(0.0), CancelToken::new());
        assert!(watch.expired());
    }
}
