//! Bound-constrained sequential quadratic programming over the squared
//! pose error.
//!
//! Serves two roles: the standalone `sqp` baseline, and the local
//! refinement engine the genetic solver applies to its elites. Box
//! constraints are handled natively through an active set on the joint
//! limits, so solutions can sit exactly on a bound — the case where
//! clamp-based Newton descent degrades.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::{JointConfig, KinematicChain};
use crate::error::{IkError, Result};
use crate::pose::{is_grasp_success, pose_error, Pose};
use crate::solve::{
    Budget, CancelToken, SolveResult, Solver, StopWatch, SuccessCriterion, Termination,
};

/// Rotation angles are capped just below pi where the rotation-vector
/// derivative becomes singular.
const MAX_ROTATION_ANGLE: f64 = std::f64::consts::PI - 1e-6;
/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: u32 = 45;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SqpConfig {
    pub max_iterations: u32,
    /// Convergence threshold on the projected-gradient infinity norm.
    pub gradient_tolerance: f64,
    /// Convergence threshold on the absolute objective decrease.
    pub objective_tolerance: f64,
    /// Position weight, 1/m^2. Default makes 1 cm cost 1.0.
    pub position_weight: f64,
    /// Orientation weight, 1/rad^2. Default makes ~18 degrees cost 1.0.
    pub orientation_weight: f64,
    /// Step for the finite-difference gradient cross-check.
    pub finite_difference_step: f64,
}

impl Default for SqpConfig {
    fn default() -> Self {
        Self {
            max_iterations: 150,
            gradient_tolerance: 1e-9,
            objective_tolerance: 1e-16,
            position_weight: 1e4,
            orientation_weight: 10.0,
            finite_difference_step: 1e-7,
        }
    }
}

impl SqpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.position_weight <= 0.0 || self.orientation_weight <= 0.0 {
            return Err(IkError::InvalidConfig("weights must be > 0".into()));
        }
        if self.gradient_tolerance <= 0.0 || self.objective_tolerance <= 0.0 {
            return Err(IkError::InvalidConfig("tolerances must be > 0".into()));
        }
        if self.max_iterations < 1 {
            return Err(IkError::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Scalarized pose error: `w_p * |dp|^2 + w_o * theta^2` with `theta`
/// the geodesic angle between current and target orientation.
pub fn objective(
    chain: &KinematicChain,
    q: &JointConfig,
    target: &Pose,
    cfg: &SqpConfig,
) -> Result<f64> {
    let pose = chain.forward_kinematics(q)?;
    Ok(objective_of_pose(&pose, target, cfg))
}

pub(crate) fn objective_of_pose(pose: &Pose, target: &Pose, cfg: &SqpConfig) -> f64 {
    let dp = pose.position - target.position;
    let theta = (target.orientation * pose.orientation.inverse())
        .angle()
        .min(MAX_ROTATION_ANGLE);
    cfg.position_weight * dp.norm_squared() + cfg.orientation_weight * theta * theta
}

/// Analytic gradient of [`objective`] via the geometric Jacobian:
/// `g = -2 J^T W e` with `e` the weighted twist error.
pub fn objective_gradient(
    chain: &KinematicChain,
    q: &JointConfig,
    target: &Pose,
    cfg: &SqpConfig,
) -> Result<DVector<f64>> {
    let pose = chain.forward_kinematics(q)?;
    let jac = chain.geometric_jacobian(q)?;
    let dp = target.position - pose.position;
    let rel = target.orientation * pose.orientation.inverse();
    let mut rot = rel.scaled_axis();
    let angle = rot.norm();
    if angle > MAX_ROTATION_ANGLE {
        rot *= MAX_ROTATION_ANGLE / angle;
    }
    let mut weighted = DVector::zeros(6);
    for i in 0..3 {
        weighted[i] = cfg.position_weight * dp[i];
        weighted[i + 3] = cfg.orientation_weight * rot[i];
    }
    Ok(-2.0 * jac.transpose() * weighted)
}

/// Central finite differences of [`objective`], for gradient checks.
pub fn finite_difference_gradient(
    chain: &KinematicChain,
    q: &JointConfig,
    target: &Pose,
    cfg: &SqpConfig,
) -> Result<DVector<f64>> {
    let h = cfg.finite_difference_step;
    let mut g = DVector::zeros(q.len());
    for i in 0..q.len() {
        let mut plus = q.clone();
        let mut minus = q.clone();
        plus.values[i] += h;
        minus.values[i] -= h;
        g[i] = (objective(chain, &plus, target, cfg)? - objective(chain, &minus, target, cfg)?)
            / (2.0 * h);
    }
    Ok(g)
}

struct Minimized {
    q: JointConfig,
    iterations: u64,
    termination: Termination,
}

/// Active-set BFGS descent restricted to the box `lower <= q <= upper`.
///
/// Every iterate satisfies the bounds exactly: steps are capped at the
/// first bound crossing and clamped against floating-point drift.
fn minimize(
    chain: &KinematicChain,
    target: &Pose,
    q0: &JointConfig,
    cfg: &SqpConfig,
    iteration_cap: u32,
    watch: &StopWatch,
) -> Result<Minimized> {
    let n = chain.dof();
    let lower: Vec<f64> = chain.joints().iter().map(|j| j.limit_lower).collect();
    let upper: Vec<f64> = chain.joints().iter().map(|j| j.limit_upper).collect();

    let mut q = chain.clamp_to_limits(q0)?;
    let mut f = objective(chain, &q, target, cfg)?;
    let mut g = objective_gradient(chain, &q, target, cfg)?;
    let mut hessian = DMatrix::<f64>::identity(n, n);
    let mut identity_hessian = true;
    let mut iterations = 0u64;

    let termination = loop {
        if iterations >= u64::from(iteration_cap) {
            break Termination::IterationCap;
        }
        if watch.expired() {
            break Termination::Budget;
        }

        // Projected gradient: zero where the bound blocks descent.
        let at_lower = |i: usize| q.values[i] <= lower[i];
        let at_upper = |i: usize| q.values[i] >= upper[i];
        let mut projected = g.clone();
        for i in 0..n {
            if (at_lower(i) && g[i] > 0.0) || (at_upper(i) && g[i] < 0.0) || lower[i] == upper[i] {
                projected[i] = 0.0;
            }
        }
        if projected.amax() <= cfg.gradient_tolerance {
            break Termination::Tolerance;
        }

        // Quasi-Newton direction on the free variables.
        let free: Vec<usize> = (0..n).filter(|&i| projected[i] != 0.0).collect();
        let mut direction = DVector::zeros(n);
        let solved = solve_free_subsystem(&hessian, &g, &free, &mut direction);
        let descent = direction.dot(&g);
        if !solved || descent >= 0.0 {
            hessian = DMatrix::identity(n, n);
            identity_hessian = true;
            direction.fill(0.0);
            for &i in &free {
                direction[i] = -g[i];
            }
        }
        // Zero any component that would immediately leave the box.
        for i in 0..n {
            if (at_lower(i) && direction[i] < 0.0) || (at_upper(i) && direction[i] > 0.0) {
                direction[i] = 0.0;
            }
        }
        let descent = direction.dot(&g);
        if descent >= 0.0 {
            break Termination::Tolerance; // KKT point on the box
        }

        // Largest step that stays in the box.
        let mut alpha_max = f64::INFINITY;
        for i in 0..n {
            if direction[i] > 0.0 {
                alpha_max = alpha_max.min((upper[i] - q.values[i]) / direction[i]);
            } else if direction[i] < 0.0 {
                alpha_max = alpha_max.min((lower[i] - q.values[i]) / direction[i]);
            }
        }

        // Backtracking Armijo line search.
        let mut alpha = alpha_max.min(1.0);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial = q.clone();
            for i in 0..n {
                trial.values[i] = (trial.values[i] + alpha * direction[i])
                    .clamp(lower[i], upper[i]);
            }
            let f_trial = objective(chain, &trial, target, cfg)?;
            if f_trial <= f + ARMIJO_C1 * alpha * descent {
                accepted = Some((trial, f_trial));
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;

        let Some((q_new, f_new)) = accepted else {
            if identity_hessian {
                break Termination::Tolerance; // no descent at fp resolution
            }
            hessian = DMatrix::identity(n, n);
            identity_hessian = true;
            continue;
        };

        let g_new = objective_gradient(chain, &q_new, target, cfg)?;
        let s = DVector::from_iterator(n, q_new.values.iter().zip(&q.values).map(|(a, b)| a - b));
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            // Damped BFGS update of the Hessian approximation.
            let bs = &hessian * &s;
            let sbs = s.dot(&bs);
            if sbs > 0.0 {
                hessian -= &bs * bs.transpose() / sbs;
            }
            hessian += &y * y.transpose() / sy;
            identity_hessian = false;
        } else {
            hessian = DMatrix::identity(n, n);
            identity_hessian = true;
        }

        let decreased = f - f_new;
        q = q_new;
        f = f_new;
        g = g_new;
        if decreased.abs() < cfg.objective_tolerance {
            break Termination::Tolerance;
        }
    };

    Ok(Minimized {
        q,
        iterations,
        termination,
    })
}

fn solve_free_subsystem(
    hessian: &DMatrix<f64>,
    g: &DVector<f64>,
    free: &[usize],
    direction: &mut DVector<f64>,
) -> bool {
    if free.is_empty() {
        return false;
    }
    let m = free.len();
    let mut sub = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for (a, &i) in free.iter().enumerate() {
        rhs[a] = -g[i];
        for (b, &j) in free.iter().enumerate() {
            sub[(a, b)] = hessian[(i, j)];
        }
    }
    match sub.cholesky() {
        Some(chol) => {
            let d = chol.solve(&rhs);
            for (a, &i) in free.iter().enumerate() {
                direction[i] = d[a];
            }
            true
        }
        None => false,
    }
}

/// Full SQP solve from a feasible seed. The returned configuration
/// satisfies the joint limits exactly, never merely clamped after the
/// fact.
pub fn solve_sqp(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &SqpConfig,
    budget: &Budget,
) -> Result<SolveResult> {
    solve_sqp_cancellable(chain, target, seed, cfg, budget, &CancelToken::new())
}

pub fn solve_sqp_cancellable(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &SqpConfig,
    budget: &Budget,
    cancel: &CancelToken,
) -> Result<SolveResult> {
    cfg.validate()?;
    let watch = StopWatch::start(budget, cancel.clone());
    let minimized = minimize(chain, target, seed, cfg, cfg.max_iterations, &watch)?;
    let pose = chain.forward_kinematics(&minimized.q)?;
    let error = pose_error(&pose, target);
    Ok(SolveResult {
        solver_name: "sqp".to_string(),
        success: is_grasp_success(&error),
        success_criterion: SuccessCriterion::GraspSuccess,
        solution: minimized.q,
        error,
        termination: minimized.termination,
        iterations: minimized.iterations,
        elapsed: watch.elapsed_seconds(),
    })
}

/// Iteration-capped refinement used on genetic elites. Never worsens:
/// the line search only accepts strict decreases, so the result's
/// objective is at most `objective(q0)`.
pub fn refine_local(
    chain: &KinematicChain,
    target: &Pose,
    q0: &JointConfig,
    cfg: &SqpConfig,
    step_budget: u32,
) -> Result<JointConfig> {
    let watch = StopWatch::start(&Budget::deterministic(), CancelToken::new());
    let minimized = minimize(chain, target, q0, cfg, step_budget, &watch)?;
    Ok(minimized.q)
}

/// Registry adapter.
pub struct SqpSolver {
    pub config: SqpConfig,
}

impl Solver for SqpSolver {
    fn name(&self) -> &'static str {
        "sqp"
    }

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        seed: &JointConfig,
        _rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult> {
        solve_sqp(chain, target, seed, &self.config, budget)
    }
}
