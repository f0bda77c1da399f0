//! Two-solver race: random-restart Newton and SQP run in parallel; the
//! first branch whose result passes the grasp-success predicate wins and
//! the other is cancelled at its next iteration boundary.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{JointConfig, KinematicChain};
use crate::error::Result;
use crate::newton::{solve_random_restart_cancellable, JacobianSolverConfig};
use crate::pose::Pose;
use crate::solve::{Budget, CancelToken, SolveResult, Solver};
use crate::sqp::{objective_of_pose, solve_sqp_cancellable, SqpConfig};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RaceConfig {
    pub newton: JacobianSolverConfig,
    pub sqp: SqpConfig,
}

/// Race the two sub-solvers under a shared budget.
///
/// In deterministic mode there is no wall clock to decide "first", so
/// both branches run to completion sequentially and the winner is picked
/// by a fixed rule: success beats failure, then lower objective.
pub fn solve_race(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &RaceConfig,
    budget: &Budget,
    rng_seed: u64,
) -> Result<SolveResult> {
    if budget.is_deterministic() {
        solve_race_sequential(chain, target, seed, cfg, budget, rng_seed)
    } else {
        solve_race_parallel(chain, target, seed, cfg, budget, rng_seed)
    }
}

fn solve_race_parallel(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &RaceConfig,
    budget: &Budget,
    rng_seed: u64,
) -> Result<SolveResult> {
    let cancel_newton = CancelToken::new();
    let cancel_sqp = CancelToken::new();
    let arrivals = AtomicUsize::new(0);

    let (newton_result, sqp_result) = std::thread::scope(|scope| {
        let newton_handle = {
            let cancel_self = cancel_newton.clone();
            let cancel_other = cancel_sqp.clone();
            let arrivals = &arrivals;
            scope.spawn(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                let result = solve_random_restart_cancellable(
                    chain,
                    target,
                    seed,
                    &cfg.newton,
                    budget,
                    &mut rng,
                    &cancel_self,
                );
                let order = arrivals.fetch_add(1, Ordering::SeqCst);
                if result.as_ref().is_ok_and(|r| r.success) {
                    cancel_other.cancel();
                }
                (result, order)
            })
        };
        let sqp_handle = {
            let cancel_self = cancel_sqp.clone();
            let cancel_other = cancel_newton.clone();
            let arrivals = &arrivals;
            scope.spawn(move || {
                let result =
                    solve_sqp_cancellable(chain, target, seed, &cfg.sqp, budget, &cancel_self);
                let order = arrivals.fetch_add(1, Ordering::SeqCst);
                if result.as_ref().is_ok_and(|r| r.success) {
                    cancel_other.cancel();
                }
                (result, order)
            })
        };
        (
            newton_handle.join().expect("newton branch must not panic"),
            sqp_handle.join().expect("sqp branch must not panic"),
        )
    });

    let (newton_result, newton_order) = newton_result;
    let (sqp_result, sqp_order) = sqp_result;
    let newton_result = newton_result?;
    let sqp_result = sqp_result?;

    Ok(match (newton_result.success, sqp_result.success) {
        (true, false) => newton_result,
        (false, true) => sqp_result,
        (true, true) => {
            if newton_order < sqp_order {
                newton_result
            } else {
                sqp_result
            }
        }
        (false, false) => lower_objective(chain, target, cfg, newton_result, sqp_result)?,
    })
}

fn solve_race_sequential(
    chain: &KinematicChain,
    target: &Pose,
    seed: &JointConfig,
    cfg: &RaceConfig,
    budget: &Budget,
    rng_seed: u64,
) -> Result<SolveResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let sqp_result = solve_sqp_cancellable(
        chain,
        target,
        seed,
        &cfg.sqp,
        budget,
        &CancelToken::new(),
    )?;
    if sqp_result.success {
        return Ok(sqp_result);
    }
    let newton_result = solve_random_restart_cancellable(
        chain,
        target,
        seed,
        &cfg.newton,
        budget,
        &mut rng,
        &CancelToken::new(),
    )?;
    if newton_result.success {
        return Ok(newton_result);
    }
    lower_objective(chain, target, cfg, newton_result, sqp_result)
}

/// Neither branch succeeded: return whichever ended at the lower
/// scalarized objective.
fn lower_objective(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &RaceConfig,
    newton_result: SolveResult,
    sqp_result: SolveResult,
) -> Result<SolveResult> {
    let newton_pose = chain.forward_kinematics(&newton_result.solution)?;
    let sqp_pose = chain.forward_kinematics(&sqp_result.solution)?;
    let newton_objective = objective_of_pose(&newton_pose, target, &cfg.sqp);
    let sqp_objective = objective_of_pose(&sqp_pose, target, &cfg.sqp);
    Ok(if newton_objective < sqp_objective {
        newton_result
    } else {
        sqp_result
    })
}

/// Registry adapter.
pub struct RaceSolver {
    pub config: RaceConfig,
}

impl Solver for RaceSolver {
    fn name(&self) -> &'static str {
        "race"
    }

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        seed: &JointConfig,
        rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult> {
        solve_race(chain, target, seed, &self.config, budget, rng_seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::parse_chain;

    fn planar_two_link(elbow_limit: f64) -> KinematicChain {
        parse_chain(
            &format!(
                r#"{{
                "name": "planar2",
                "joints": [
                    {{"name": "shoulder", "origin": {{"xyz": [0,0,0], "rpy": [0,0,0]}},
                     "axis": [0,0,1], "limits": {{"lower": -3.141592653589793, "upper": 3.141592653589793}}}},
                    {{"name": "elbow", "origin": {{"xyz": [0.5,0,0], "rpy": [0,0,0]}},
                     "axis": [0,0,1], "limits": {{"lower": {}, "upper": {}}}}}
                ],
                "tool_offset": {{"xyz": [0.5,0,0], "rpy": [0,0,0]}}
            }}"#,
                -elbow_limit, elbow_limit
            ),
            "inline",
        )
        .unwrap()
    }

    #[test]
    fn trivial_target_wins_fast() {
        let chain = planar_two_link(3.0);
        let truth: JointConfig = vec![0.4, 0.7].into();
        let target = chain.forward_kinematics(&truth).unwrap();
        let start = std::time::Instant::now();
        let result = solve_race(
            &chain,
            &target,
            &chain.mid_config(),
            &RaceConfig::default(),
            &Budget::seconds(1.0),
            7,
        )
        .unwrap();
        assert!(result.success);
        assert!(start.elapsed().as_secs_f64() < 0.9, "race should win early");
    }

    #[test]
    fn boundary_target_won_by_sqp() {
        // Elbow must sit exactly on its +2 limit; the clamp-based branch
        // tends to stall there while SQP converges.
        let chain = planar_two_link(2.0);
        let truth: JointConfig = vec![0.7, 2.0].into();
        let target = chain.forward_kinematics(&truth).unwrap();
        let result = solve_race(
            &chain,
            &target,
            &chain.mid_config(),
            &RaceConfig::default(),
            &Budget::deterministic(),
            7,
        )
        .unwrap();
        assert!(result.success);
        assert_eq!(result.solver_name, "sqp");
    }

    #[test]
    fn both_failing_returns_lower_objective() {
        let chain = planar_two_link(3.0);
        let target = Pose::from_xyz_rpy([1.8, 0.0, 0.0], [0.0, 0.0, 0.0]);
        let result = solve_race(
            &chain,
            &target,
            &chain.mid_config(),
            &RaceConfig::default(),
            &Budget::seconds(0.3),
            7,
        )
        .unwrap();
        assert!(!result.success);
        assert!(result.error.position_error >= 0.8 - 1e-6);
    }

    #[test]
    fn deterministic_race_reproducible() {
        let chain = planar_two_link(3.0);
        let target = Pose::from_xyz_rpy([0.4, 0.5, 0.0], [0.0, 0.0, 1.2]);
        let run = || {
            solve_race(
                &chain,
                &target,
                &chain.mid_config(),
                &RaceConfig::default(),
                &Budget::deterministic(),
                99,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.solver_name, b.solver_name);
        assert_eq!(a.solution, b.solution);
    }
}
