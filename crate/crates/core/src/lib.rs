//! Constrained inverse kinematics for redundant, joint-limited chains.
//!
//! The crate bundles four solver families behind one interface — damped
//! Newton-Raphson (plain and random-restart), box-constrained SQP, a
//! niched-island genetic solver with SQP elite refinement, and a
//! two-solver race — plus workspace sampling and a benchmark harness
//! that scores them all with a shared grasp-success criterion.

pub mod chain;
pub mod config;
pub mod error;
pub mod genetic;
pub mod newton;
pub mod pose;
pub mod race;
pub mod reference;
pub mod report;
pub mod solve;
pub mod sqp;
pub mod workspace;

pub use chain::{load_chain, parse_chain, JointConfig, JointSpec, KinematicChain, TransformSpec};
pub use error::{IkError, Result};
pub use genetic::{GeneticSolverConfig, IslandConfig};
pub use newton::JacobianSolverConfig;
pub use pose::{
    geodesic_angle, is_grasp_success, pose_error, pose_error_with_metric, OrientationMetric,
    Pose, PoseError, GRASP_ORIENTATION_TOL_DEG, GRASP_POSITION_TOL,
};
pub use config::{FileConfig, RunConfig, SolverSuiteConfig};
pub use report::{run_benchmark, BenchmarkReport};
pub use solve::{Budget, SolveResult, Solver, SolverRegistry};
pub use sqp::SqpConfig;
pub use workspace::{
    emit_coverage_map, load_dataset, sample_workspace, save_dataset, CoverageGrid, SamplingOptions,
    SceneSpec, WorkspaceRegion, WorkspaceSample,
};
