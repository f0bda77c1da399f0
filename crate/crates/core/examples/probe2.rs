// Scratch: scan wrist-limit variants for clean DoF-coverage gaps.
use redik_core::chain::{parse_chain, KinematicChain};
use redik_core::solve::Budget;
use redik_core::workspace::{sample_workspace, SamplingOptions, SceneSpec};
use redik_core::SolverSuiteConfig;

fn chain_with(wrist_pitch: f64, hand_flex: f64, hand_abduct: f64) -> KinematicChain {
    parse_chain(
        &format!(
            r#"{{
  "name": "v",
  "joints": [
    {{"name": "shoulder_yaw", "origin": {{"xyz": [0.0, -0.25, 1.05], "rpy": [0,0,0]}}, "axis": [0,0,1], "limits": {{"lower": -2.2, "upper": 1.2}}}},
    {{"name": "shoulder_pitch", "origin": {{"xyz": [0,0,0], "rpy": [0,0,0]}}, "axis": [0,1,0], "limits": {{"lower": -1.0, "upper": 1.9}}}},
    {{"name": "shoulder_roll", "origin": {{"xyz": [0,0,0], "rpy": [0,0,0]}}, "axis": [1,0,0], "limits": {{"lower": -1.6, "upper": 1.6}}}},
    {{"name": "elbow_flex", "origin": {{"xyz": [0.34,0,0], "rpy": [0,0,0]}}, "axis": [0,1,0], "limits": {{"lower": -2.4, "upper": 0.05}}}},
    {{"name": "forearm_roll", "origin": {{"xyz": [0.3,0,0], "rpy": [0,0,0]}}, "axis": [1,0,0], "limits": {{"lower": -1.6, "upper": 1.6}}}},
    {{"name": "wrist_pitch", "origin": {{"xyz": [0.08,0,0], "rpy": [0,0,0]}}, "axis": [0,1,0], "limits": {{"lower": -{wp}, "upper": {wp}}}}},
    {{"name": "hand_flex", "origin": {{"xyz": [0.05,0,0], "rpy": [0,0,0]}}, "axis": [0,1,0], "limits": {{"lower": -{hf}, "upper": {hf}}}}},
    {{"name": "hand_abduct", "origin": {{"xyz": [0,0,0], "rpy": [0,0,0]}}, "axis": [0,0,1], "limits": {{"lower": -{ha}, "upper": {ha}}}}}
  ],
  "tool_offset": {{"xyz": [0.16, 0.0, 0.0], "rpy": [0,0,0]}}
}}"#,
            wp = wrist_pitch,
            hf = hand_flex,
            ha = hand_abduct
        ),
        "inline",
    )
    .unwrap()
}

fn main() {
    let scene = SceneSpec::load("assets/chains/humanoid8.scene.json").unwrap();
    let suite = SolverSuiteConfig::default();
    let registry = suite.registry();
    let solver = registry.get("genetic").unwrap();
    let attempts: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let budget: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.15);

    for (wp, hf, ha) in [(0.5, 0.8, 0.6)] {
        let chain = chain_with(wp, hf, ha);
        print!("wp={wp} hf={hf} ha={ha}: ");
        for frozen in [vec![(6usize, 0.0), (7, 0.0)], vec![(6, 0.0)], vec![(7, 0.0)], vec![]] {
            let dof = 8 - frozen.len();
            let restricted = chain.with_frozen_joints(&frozen).unwrap();
            let opts = SamplingOptions {
                attempt_ceiling: attempts,
                ..Default::default()
            };
            match sample_workspace(
                &restricted,
                &scene,
                usize::MAX / 2,
                solver,
                &Budget::seconds(budget),
                7,
                &opts,
            ) {
                Ok(set) => print!(
                    "dof{dof}={:.1}% ",
                    100.0 * set.accepted_count() as f64 / set.samples.len() as f64
                ),
                Err(_) => print!("dof{dof}=0% "),
            }
        }
        println!();
    }
}
