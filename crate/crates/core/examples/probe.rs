// Scratch probe for tuning the bundled chain (not shipped behavior).
use std::time::Instant;

use redik_core::genetic::{solve_genetic, GeneticSolverConfig};
use redik_core::solve::Budget;
use redik_core::workspace::{sample_workspace, SamplingOptions, SceneSpec};
use redik_core::{load_chain, SolverSuiteConfig};

fn main() {
    let chain = load_chain("assets/chains/humanoid8.json").unwrap();
    let scene = SceneSpec::load("assets/chains/humanoid8.scene.json").unwrap();
    println!("dof={} reach={:.3}", chain.dof(), chain.total_translation());
    let zero = redik_core::JointConfig::new(vec![0.0; 8]);
    let fk = chain.forward_kinematics(&zero).unwrap();
    println!("zero pose: {:?} angle {:.3}", fk.position, fk.orientation.angle());
    let mid = chain.mid_config();
    let fkm = chain.forward_kinematics(&mid).unwrap();
    println!("mid pose:  {:?}", fkm.position);

    // Time one deterministic genetic solve (for generation budget calibration).
    let gcfg = GeneticSolverConfig {
        islands: 1,
        deterministic_generations: 40,
        early_exit: false,
        ..Default::default()
    };
    let target = scene.grasp_pose_for(0.45, -0.4).unwrap();
    let t0 = Instant::now();
    let r = solve_genetic(&chain, &target, &gcfg, &Budget::deterministic()).unwrap();
    println!(
        "genetic 40 gens: {:.3}s err=({:.4} m, {:.2} deg) success={}",
        t0.elapsed().as_secs_f64(),
        r.error.position_error,
        r.error.orientation_error_sum,
        r.success
    );

    // Coverage probe: N attempts at a wall budget, per DoF condition.
    let suite = SolverSuiteConfig::default();
    let registry = suite.registry();
    let solver = registry.get("genetic").unwrap();
    let attempts: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(120);
    let budget_s: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.2);
    for frozen in [vec![(6, 0.0), (7, 0.0)], vec![(7, 0.0)], vec![]] {
        let dof = 8 - frozen.len();
        let restricted = chain.with_frozen_joints(&frozen).unwrap();
        let opts = SamplingOptions {
            attempt_ceiling: attempts,
            ..Default::default()
        };
        let t0 = Instant::now();
        let out = sample_workspace(
            &restricted,
            &scene,
            usize::MAX / 2,
            solver,
            &Budget::seconds(budget_s),
            7,
            &opts,
        );
        match out {
            Ok(set) => println!(
                "dof={dof}: accepted {}/{} = {:.1}% in {:.1}s",
                set.accepted_count(),
                set.samples.len(),
                100.0 * set.accepted_count() as f64 / set.samples.len() as f64,
                t0.elapsed().as_secs_f64()
            ),
            Err(e) => println!("dof={dof}: {e}"),
        }
    }
}
