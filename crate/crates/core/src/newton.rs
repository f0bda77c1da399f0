//! Damped Newton-Raphson pseudo-inverse Jacobian IK, plus a
//! random-restart wrapper that records local optima and reseeds away
//! from them.
//!
//! Joint limits are enforced by clamping after each step. That is the
//! classic weakness of this family near active limits — the SQP solver
//! handles bounds natively — and the benchmark exists to show it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{JointConfig, KinematicChain};
use crate::error::{IkError, Result};
use crate::pose::{is_grasp_success, pose_error, Pose};
use crate::solve::{
    twist_error_norm, Budget, CancelToken, SolveResult, Solver, StopWatch, SuccessCriterion,
    Termination,
};

/// Stall window: iterations in a row with progress below the threshold.
const STALL_WINDOW: u32 = 5;
/// Bounded number of reseed draws before the distance constraint is waived.
const MAX_RESEED_DRAWS: u32 = 100;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct JacobianSolverConfig {
    pub max_iterations: u32,
    /// Damped least-squares lambda; 0 recovers the plain pseudo-inverse.
    pub damping_lambda: f64,
    /// Fraction of the Newton step applied per iteration, in (0, 1].
    pub step_scale: f64,
    /// Termination tolerance on position error, meters.
    pub position_tolerance: f64,
    /// Termination tolerance on summed RPY orientation error, degrees.
    pub orientation_tolerance: f64,
    /// Minimum twist-error decrease per iteration; below it for
    /// [`STALL_WINDOW`] consecutive iterations the solve is stalled.
    pub stall_threshold: f64,
    /// Minimum L-infinity distance (radians) a restart seed must keep
    /// from every recorded local optimum.
    pub restart_perturbation_sigma: f64,
    /// Restart cap; the binding limit in deterministic mode.
    pub max_restarts: u32,
}

impl Default for JacobianSolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            damping_lambda: 0.05,
            step_scale: 1.0,
            position_tolerance: 1e-5,
            orientation_tolerance: 0.05,
            stall_threshold: 1e-9,
            restart_perturbation_sigma: 0.3,
            max_restarts: 100,
        }
    }
}

impl JacobianSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(IkError::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if self.damping_lambda < 0.0 {
            return Err(IkError::InvalidConfig("damping_lambda must be >= 0".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(IkError::InvalidConfig("step_scale must be in (0, 1]".into()));
        }
        if self.position_tolerance <= 0.0 || self.orientation_tolerance <= 0.0 {
            return Err(IkError::InvalidConfig("tolerances must be > 0".into()));
        }
        Ok(())
    }
}

struct BestTracker {
    q: JointConfig,
    twist: f64,
}

impl BestTracker {
    fn observe(&mut self, q: &JointConfig, twist: f64) {
        if twist < self.twist {
            self.twist = twist;
            self.q = q.clone();
        }
    }
}

/// One damped Newton-Raphson descent from `seed`.
///
/// Iterates `q <- clamp(q + step_scale * J+ * e)` with the damped
/// pseudo-inverse `J+ = J^T (J J^T + lambda^2 I)^-1` and returns the best
/// iterate seen. The seed is clamped into the limits on entry.
pub fn solve_newton_raphson(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &JacobianSolverConfig,
    budget: &Budget,
) -> Result<SolveResult> {
    solve_newton_raphson_cancellable(chain, target, seed, cfg, budget, &CancelToken::new())
}

pub fn solve_newton_raphson_cancellable(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &JacobianSolverConfig,
    budget: &Budget,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let watch = StopWatch::start(budget, cancel.clone());
    let descent = newton_descent(chain, target, seed, cfg, &watch)?;
    Ok(finish(
        chain,
        target,
        "newton",
        descent.best.q,
        descent.iterations,
        descent.termination,
        &watch,
    ))
}

struct Descent {
    best: BestTracker,
    /// Final iterate, wherever the descent stopped (used as the recorded
    /// local optimum by the restart wrapper).
    last: JointConfig,
    iterations: u64,
    termination: Termination,
}

fn newton_descent(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &JacobianSolverConfig,
    watch: &StopWatch,
) -> Result<Descent> {
    let mut q = chain.clamp_to_limits(seed)?;
    let mut pose = chain.forward_kinematics(&q)?;
    let mut twist = twist_error_norm(&pose, target);
    let mut best = BestTracker {
        q: q.clone(),
        twist,
    };
    let mut stall_count = 0u32;
    let mut iterations = 0u64;

    let termination = loop {
        if within_tolerance(&pose, target, cfg) {
            break Termination::Tolerance;
        }
        if iterations >= u64::from(cfg.max_iterations) {
            break Termination::IterationCap;
        }
        if watch.expired() {
            break Termination::Budget;
        }

        let jac = chain.geometric_jacobian(&q)?;
        let error = twist_error_vector(&pose, target);
        let step = match damped_pseudo_inverse_step(&jac, &error, cfg.damping_lambda) {
            Some(step) => step,
            None => break Termination::Stalled, // singular even with damping
        };
        for (value, delta) in q.values.iter_mut().zip(step.iter()) {
            *value += cfg.step_scale * delta;
        }
        q = chain.clamp_to_limits(&q)?;
        pose = chain.forward_kinematics(&q)?;
        let new_twist = twist_error_norm(&pose, target);
        iterations += 1;

        if twist - new_twist < cfg.stall_threshold {
            stall_count += 1;
            if stall_count >= STALL_WINDOW {
                best.observe(&q, new_twist);
                break Termination::Stalled;
            }
        } else {
            stall_count = 0;
        }
        twist = new_twist;
        best.observe(&q, new_twist);
    };

    Ok(Descent {
        best,
        last: q,
        iterations,
        termination,
    })
}

fn within_tolerance(pose: &Pose, target: &Pose, cfg: &JacobianSolverConfig) -> bool {
    let err = pose_error(pose, target);
    err.position_error < cfg.position_tolerance
        && err.orientation_error_sum < cfg.orientation_tolerance
}

/// 6-vector twist error: position difference stacked with the rotation
/// vector of the relative rotation (smooth, unlike the RPY-sum metric).
fn twist_error_vector(current: &Pose, target: &Pose) -> DVector<f64> {
    let dp = target.position - current.position;
    let rot = (target.orientation * current.orientation.inverse()).scaled_axis();
    DVector::from_column_slice(&[dp.x, dp.y, dp.z, rot.x, rot.y, rot.z])
}

/// `J^T (J J^T + lambda^2 I)^-1 e`, solved via Cholesky.
fn damped_pseudo_inverse_step(
    jac: &DMatrix<f64>,
    error: &DVector<f64>,
    lambda: f64,
) -> Option<DVector<f64>> {
    let mut jjt = jac * jac.transpose();
    for i in 0..6 {
        jjt[(i, i)] += lambda * lambda;
    }
    let solved = match jjt.clone().cholesky() {
        Some(chol) => chol.solve(error),
        None => jjt.lu().solve(error)?,
    };
    Some(jac.transpose() * solved)
}

fn finish(
    chain: &KinematicChain,
    target: &Pose,
    name: &str,
    solution: JointConfig,
    iterations: u64,
    termination: Termination,
    watch: &StopWatch,
) -> SolveResult {
    let pose = chain
        .forward_kinematics(&solution)
        .expect("solution has chain dimension");
    let error = pose_error(&pose, target);
    SolveResult {
        solver_name: name.to_string(),
        success: is_grasp_success(&error),
        success_criterion: SuccessCriterion::GraspSuccess,
        solution,
        error,
        termination,
        iterations,
        elapsed: watch.elapsed_seconds(),
    }
}

/// Newton-Raphson with restarts: every stalled descent records its end
/// configuration as a local optimum and the next seed is drawn uniformly
/// in the limits, at least `restart_perturbation_sigma` away (L-infinity)
/// from every recorded optimum.
pub fn solve_random_restart<R: Rng>(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &JacobianSolverConfig,
    budget: &Budget,
    rng: &mut R,
) -> Result<SolveResult> {
    solve_random_restart_cancellable(chain, target, seed, cfg, budget, rng, &CancelToken::new())
}

pub fn solve_random_restart_cancellable<R: Rng>(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &JacobianSolverConfig,
    budget: &Budget,
    rng: &mut R,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let watch = StopWatch::start(budget, cancel.clone());
    let mut optima: Vec<JointConfig> = Vec::new();
    let mut seed = chain.clamp_to_limits(seed)?;
    let mut best: Option<BestTracker> = None;
    let mut iterations = 0u64;
    let mut restarts = 0u32;

    let termination = loop {
        let descent = newton_descent(chain, target, &seed, cfg, &watch)?;
        iterations += descent.iterations;
        let improved = descent.best;
        match best.as_mut() {
            Some(b) => b.observe(&improved.q, improved.twist),
            None => best = Some(improved),
        }

        match descent.termination {
            Termination::Tolerance => break Termination::Tolerance,
            Termination::Budget => break Termination::Budget,
            Termination::Stalled | Termination::IterationCap => {
                optima.push(descent.last);
            }
        }
        if watch.expired() {
            break Termination::Budget;
        }
        if restarts >= cfg.max_restarts {
            break Termination::IterationCap;
        }
        restarts += 1;
        seed = draw_restart_seed(chain, &optima, cfg.restart_perturbation_sigma, rng);
    };

    let best = best.expect("at least one descent ran");
    Ok(finish(
        chain,
        target,
        "newton-rr",
        best.q,
        iterations,
        termination,
        &watch,
    ))
}

fn draw_restart_seed<R: Rng>(
    chain: &KinematicChain,
    optima: &[JointConfig],
    sigma: f64,
    rng: &mut R,
) -> JointConfig {
    let mut candidate = chain.random_config(rng);
    for _ in 0..MAX_RESEED_DRAWS {
        let far_enough = optima
            .iter()
            .all(|opt| linf_distance(&candidate.values, &opt.values) >= sigma);
        if far_enough {
            return candidate;
        }
        candidate = chain.random_config(rng);
    }
    candidate
}

fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Registry adapter for the plain Newton-Raphson solver.
pub struct NewtonSolver {
    pub config: JacobianSolverConfig,
}

impl Solver for NewtonSolver {
    fn name(&self) -> &'static str {
        "newton"
    }

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        seed: &JointConfig,
        _rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult> {
        solve_newton_raphson(chain, target, seed, &self.config, budget)
    }
}

/// Registry adapter for the random-restart variant.
pub struct NewtonRestartSolver {
    pub config: JacobianSolverConfig,
}

impl Solver for NewtonRestartSolver {
    fn name(&self) -> &'static str {
        "newton-rr"
    }

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        seed: &JointConfig,
        rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
        solve_random_restart(chain, target, seed, &self.config, budget, &mut rng)
    }
}
