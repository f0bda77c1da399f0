//! Kinematic chains: ordered revolute joints with box limits, forward
//! kinematics and the geometric Jacobian.

use std::path::Path;

use nalgebra::{DMatrix, Isometry3, Translation3, UnitQuaternion, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{IkError, Result};
use crate::pose::Pose;

const UNIT_TOL: f64 = 1e-9;

/// One revolute joint: a fixed transform from the parent frame to the
/// joint frame, a rotation axis in the joint frame, and box limits.
#[derive(Debug, Clone)]
pub struct JointSpec {
    pub name: String,
    /// Rigid transform from the parent frame to this joint's frame.
    pub origin: Isometry3<f64>,
    /// Unit rotation axis in the joint frame.
    pub axis: Vector3<f64>,
    pub limit_lower: f64,
    pub limit_upper: f64,
}

impl JointSpec {
    fn validate(&self) -> Result<()> {
        if (self.axis.norm() - 1.0).abs() > UNIT_TOL {
            return Err(IkError::Validation {
                joint: self.name.clone(),
                detail: format!("axis has norm {:.9}, expected 1", self.axis.norm()),
            });
        }
        if self.limit_lower > self.limit_upper {
            return Err(IkError::Validation {
                joint: self.name.clone(),
                detail: format!(
                    "limit_lower {} > limit_upper {}",
                    self.limit_lower, self.limit_upper
                ),
            });
        }
        let qn = self.origin.rotation.into_inner().norm();
        if (qn - 1.0).abs() > UNIT_TOL {
            return Err(IkError::Validation {
                joint: self.name.clone(),
                detail: format!("origin quaternion has norm {qn:.9}, expected 1"),
            });
        }
        Ok(())
    }
}

/// An ordered chain of revolute joints plus a tool offset.
///
/// Immutable after construction; all operations are pure functions, so a
/// chain can be shared freely across solver threads.
#[derive(Debug, Clone)]
pub struct KinematicChain {
    name: String,
    joints: Vec<JointSpec>,
    tool_offset: Isometry3<f64>,
}

/// A joint-space configuration: one value in radians per joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub values: Vec<f64>,
}

impl JointConfig {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for JointConfig {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl KinematicChain {
    /// Build a chain, validating every joint and the chain invariants.
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec>,
        tool_offset: Isometry3<f64>,
    ) -> Result<Self> {
        let chain = Self {
            name: name.into(),
            joints,
            tool_offset,
        };
        chain.validate()?;
        Ok(chain)
    }

    fn validate(&self) -> Result<()> {
        if self.joints.is_empty() {
            return Err(IkError::Validation {
                joint: "<chain>".into(),
                detail: "chain has no joints".into(),
            });
        }
        for joint in &self.joints {
            joint.validate()?;
        }
        let reach = self.total_translation();
        if !(reach.is_finite() && reach > 0.0) {
            return Err(IkError::Validation {
                joint: "<chain>".into(),
                detail: format!("total translation {reach} must be finite and > 0"),
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn tool_offset(&self) -> &Isometry3<f64> {
        &self.tool_offset
    }

    /// Sum of translation magnitudes along the chain, tool offset included.
    pub fn total_translation(&self) -> f64 {
        self.joints
            .iter()
            .map(|j| j.origin.translation.vector.norm())
            .sum::<f64>()
            + self.tool_offset.translation.vector.norm()
    }

    fn check_len(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dof() {
            return Err(IkError::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        Ok(())
    }

    /// End-effector pose in the base frame for a joint configuration.
    ///
    /// Feasibility is not required; solvers probe infeasible interiors
    /// before clamping.
    pub fn forward_kinematics(&self, q: &JointConfig) -> Result<Pose> {
        self.check_len(&q.values)?;
        let mut transform = Isometry3::identity();
        for (joint, &angle) in self.joints.iter().zip(&q.values) {
            transform *= joint.origin;
            transform *= Isometry3::from_parts(
                Translation3::identity(),
                UnitQuaternion::new(joint.axis * angle),
            );
        }
        transform *= self.tool_offset;
        Ok(Pose::from_isometry(&transform))
    }

    /// World-frame joint origins, joint axes and end-effector position.
    ///
    /// The axis and origin of joint i are taken before its own rotation
    /// (rotation about the axis leaves the axis fixed).
    pub fn joint_frames(&self, q: &JointConfig) -> Result<JointFrames> {
        self.check_len(&q.values)?;
        let mut transform = Isometry3::identity();
        let mut origins = Vec::with_capacity(self.dof());
        let mut axes = Vec::with_capacity(self.dof());
        for (joint, &angle) in self.joints.iter().zip(&q.values) {
            transform *= joint.origin;
            origins.push(transform.translation.vector);
            axes.push(transform.rotation * joint.axis);
            transform *= Isometry3::from_parts(
                Translation3::identity(),
                UnitQuaternion::new(joint.axis * angle),
            );
        }
        transform *= self.tool_offset;
        Ok(JointFrames {
            origins,
            axes,
            ee: Pose::from_isometry(&transform),
        })
    }

    /// Geometric Jacobian, 6 x DoF. Rows 0..3 are linear velocity per unit
    /// joint rate, rows 3..6 angular; column i is
    /// `(z_i x (p_ee - p_i), z_i)`.
    pub fn geometric_jacobian(&self, q: &JointConfig) -> Result<DMatrix<f64>> {
        let frames = self.joint_frames(q)?;
        let mut jac = DMatrix::zeros(6, self.dof());
        for i in 0..self.dof() {
            let z = frames.axes[i];
            let linear = z.cross(&(frames.ee.position - frames.origins[i]));
            for r in 0..3 {
                jac[(r, i)] = linear[r];
                jac[(r + 3, i)] = z[r];
            }
        }
        Ok(jac)
    }

    /// Clamp each joint value into its limits. Idempotent.
    pub fn clamp_to_limits(&self, q: &JointConfig) -> Result<JointConfig> {
        self.check_len(&q.values)?;
        Ok(JointConfig::new(
            self.joints
                .iter()
                .zip(&q.values)
                .map(|(j, &v)| v.clamp(j.limit_lower, j.limit_upper))
                .collect(),
        ))
    }

    /// True if every value lies within its joint's limits.
    pub fn is_feasible(&self, q: &JointConfig) -> bool {
        q.len() == self.dof()
            && self
                .joints
                .iter()
                .zip(&q.values)
                .all(|(j, &v)| v >= j.limit_lower && v <= j.limit_upper)
    }

    /// Mid-range configuration, the default solver seed.
    pub fn mid_config(&self) -> JointConfig {
        JointConfig::new(
            self.joints
                .iter()
                .map(|j| 0.5 * (j.limit_lower + j.limit_upper))
                .collect(),
        )
    }

    /// Uniform random configuration within the joint limits.
    pub fn random_config<R: Rng>(&self, rng: &mut R) -> JointConfig {
        JointConfig::new(
            self.joints
                .iter()
                .map(|j| {
                    if j.limit_upper > j.limit_lower {
                        rng.gen_range(j.limit_lower..=j.limit_upper)
                    } else {
                        j.limit_lower
                    }
                })
                .collect(),
        )
    }

    /// Copy of the chain with the given joints frozen at a fixed value
    /// (zero-width limits). Used for reduced-DoF ablations.
    pub fn with_frozen_joints(&self, frozen: &[(usize, f64)]) -> Result<Self> {
        let mut joints = self.joints.clone();
        for &(idx, value) in frozen {
            let joint = joints.get_mut(idx).ok_or(IkError::DimensionMismatch {
                expected: self.dof(),
                got: idx,
            })?;
            joint.limit_lower = value;
            joint.limit_upper = value;
        }
        Self::new(format!("{}~{}frozen", self.name, frozen.len()), joints, self.tool_offset)
    }
}

/// World-frame joint origins and axes plus the end-effector pose.
pub struct JointFrames {
    pub origins: Vec<Vector3<f64>>,
    pub axes: Vec<Vector3<f64>>,
    pub ee: Pose,
}

/// Generate a random valid chain: `dof` revolute joints with random
/// origins, random unit axes and random asymmetric limits.
///
/// Used for fuzzing solvers and cross-checking kinematics routes.
pub fn random_chain<R: Rng>(rng: &mut R, dof: usize) -> KinematicChain {
    let joints = (0..dof)
        .map(|i| {
            let axis = loop {
                let v = Vector3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let n = v.norm();
                if n > 0.1 {
                    break v / n;
                }
            };
            let lower = rng.gen_range(-3.0..-0.2);
            let upper = rng.gen_range(0.2..3.0);
            JointSpec {
                name: format!("j{i}"),
                origin: Isometry3::from_parts(
                    Translation3::new(
                        rng.gen_range(-0.3..0.3),
                        rng.gen_range(-0.3..0.3),
                        rng.gen_range(-0.3..0.3),
                    ),
                    UnitQuaternion::from_euler_angles(
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-1.5..1.5),
                        rng.gen_range(-3.0..3.0),
                    ),
                ),
                axis,
                limit_lower: lower,
                limit_upper: upper,
            }
        })
        .collect();
    KinematicChain::new(
        format!("random-{dof}dof"),
        joints,
        Isometry3::translation(
            rng.gen_range(0.05..0.2),
            rng.gen_range(-0.05..0.05),
            rng.gen_range(-0.05..0.05),
        ),
    )
    .expect("generated chain is valid by construction")
}

// ---------------------------------------------------------------------------
// Chain-spec file format
// ---------------------------------------------------------------------------

/// On-disk transform: translation plus roll/pitch/yaw (intrinsic ZYX).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformSpec {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
}

impl TransformSpec {
    pub fn to_isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::new(self.xyz[0], self.xyz[1], self.xyz[2]),
            UnitQuaternion::from_euler_angles(self.rpy[0], self.rpy[1], self.rpy[2]),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LimitsSpec {
    lower: f64,
    upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JointFileSpec {
    name: String,
    origin: TransformSpec,
    axis: [f64; 3],
    limits: LimitsSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainFileSpec {
    name: String,
    joints: Vec<JointFileSpec>,
    tool_offset: TransformSpec,
}

/// Load and validate a chain from its JSON spec file.
pub fn load_chain(path: impl AsRef<Path>) -> Result<KinematicChain> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_chain(&text, &path.display().to_string())
}

/// Parse a chain from JSON text; `source` names the input in errors.
pub fn parse_chain(text: &str, source: &str) -> Result<KinematicChain> {
    let spec: ChainFileSpec = serde_json::from_str(text).map_err(|e| IkError::Parse {
        path: source.to_string(),
        detail: e.to_string(),
    })?;
    let joints = spec
        .joints
        .into_iter()
        .map(|j| JointSpec {
            name: j.name,
            origin: j.origin.to_isometry(),
            axis: Vector3::new(j.axis[0], j.axis[1], j.axis[2]),
            limit_lower: j.limits.lower,
            limit_upper: j.limits.upper,
        })
        .collect();
    KinematicChain::new(spec.name, joints, spec.tool_offset.to_isometry())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Single revolute joint about z at the origin, 1 m tool along x.
    fn one_joint_chain() -> KinematicChain {
        KinematicChain::new(
            "one",
            vec![JointSpec {
                name: "j1".into(),
                origin: Isometry3::identity(),
                axis: Vector3::z(),
                limit_lower: -PI,
                limit_upper: PI,
            }],
            Isometry3::translation(1.0, 0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn fk_zero_configuration() {
        let chain = one_joint_chain();
        let pose = chain.forward_kinematics(&vec![0.0].into()).unwrap();
        assert_relative_eq!(pose.position.x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(pose.position.y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pose.orientation.angle(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fk_quarter_turn() {
        let chain = one_joint_chain();
        let pose = chain.forward_kinematics(&vec![FRAC_PI_2].into()).unwrap();
        assert_relative_eq!(pose.position.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pose.position.y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fk_dimension_mismatch() {
        let chain = one_joint_chain();
        let err = chain.forward_kinematics(&vec![0.0, 0.0].into()).unwrap_err();
        assert!(matches!(
            err,
            IkError::DimensionMismatch {
                expected: 1,
                got: 2
            }
        ));
    }

    #[test]
    fn fk_is_deterministic() {
        let chain = one_joint_chain();
        let q: JointConfig = vec![0.7431].into();
        let a = chain.forward_kinematics(&q).unwrap();
        let b = chain.forward_kinematics(&q).unwrap();
        assert_eq!(a.position, b.position);
        assert_eq!(
            a.orientation.into_inner().coords,
            b.orientation.into_inner().coords
        );
    }

    #[test]
    fn jacobian_single_joint_textbook() {
        let chain = one_joint_chain();
        let jac = chain.geometric_jacobian(&vec![0.0].into()).unwrap();
        // tip at (1,0,0), axis z: linear column (0,1,0), angular (0,0,1)
        assert_relative_eq!(jac[(0, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(jac[(1, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(jac[(2, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(jac[(3, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(jac[(4, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(jac[(5, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobian_coaxial_angular_columns() {
        // Three coaxial z joints: every angular column is (0,0,1).
        let joint = |name: &str, x: f64| JointSpec {
            name: name.into(),
            origin: Isometry3::translation(x, 0.0, 0.0),
            axis: Vector3::z(),
            limit_lower: -PI,
            limit_upper: PI,
        };
        let chain = KinematicChain::new(
            "coaxial",
            vec![joint("a", 0.0), joint("b", 0.3), joint("c", 0.3)],
            Isometry3::translation(0.2, 0.0, 0.0),
        )
        .unwrap();
        let jac = chain
            .geometric_jacobian(&vec![0.4, -0.9, 1.3].into())
            .unwrap();
        for i in 0..3 {
            assert_relative_eq!(jac[(3, i)], 0.0, epsilon = 1e-12);
            assert_relative_eq!(jac[(4, i)], 0.0, epsilon = 1e-12);
            assert_relative_eq!(jac[(5, i)], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn clamp_saturates_and_is_idempotent() {
        let chain = one_joint_chain();
        let clamped = chain.clamp_to_limits(&vec![4.0].into()).unwrap();
        assert_eq!(clamped.values[0], PI);
        let again = chain.clamp_to_limits(&clamped).unwrap();
        assert_eq!(again, clamped);
        let fine = chain.clamp_to_limits(&vec![0.5].into()).unwrap();
        assert_eq!(fine.values[0], 0.5);
    }

    const VALID_SPEC: &str = r#"{
        "name": "two",
        "joints": [
            {"name": "a", "origin": {"xyz": [0,0,0], "rpy": [0,0,0]},
             "axis": [0,0,1], "limits": {"lower": -3.14, "upper": 3.14}},
            {"name": "b", "origin": {"xyz": [0.5,0,0], "rpy": [0,0,0]},
             "axis": [0,0,1], "limits": {"lower": -3.14, "upper": 3.14}}
        ],
        "tool_offset": {"xyz": [0.5,0,0], "rpy": [0,0,0]}
    }"#;

    #[test]
    fn parse_valid_spec() {
        let chain = parse_chain(VALID_SPEC, "inline").unwrap();
        assert_eq!(chain.dof(), 2);
        assert_eq!(chain.name(), "two");
        assert_relative_eq!(chain.total_translation(), 1.0);
    }

    #[test]
    fn inverted_limits_rejected_with_joint_name() {
        let bad = VALID_SPEC.replace(
            r#""limits": {"lower": -3.14, "upper": 3.14}},"#,
            r#""limits": {"lower": 3.14, "upper": -3.14}},"#,
        );
        let err = parse_chain(&bad, "inline").unwrap_err();
        match err {
            IkError::Validation { joint, .. } => assert_eq!(joint, "a"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn non_unit_axis_rejected() {
        let bad = VALID_SPEC.replacen("[0,0,1]", "[0,0,2]", 1);
        let err = parse_chain(&bad, "inline").unwrap_err();
        match err {
            IkError::Validation { joint, detail } => {
                assert_eq!(joint, "a");
                assert!(detail.contains("axis"));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_parse_error() {
        let err = parse_chain("{ not json", "inline").unwrap_err();
        assert!(matches!(err, IkError::Parse { .. }));
    }

    #[test]
    fn frozen_joints_have_zero_width_limits() {
        let chain = parse_chain(VALID_SPEC, "inline").unwrap();
        let frozen = chain.with_frozen_joints(&[(1, 0.25)]).unwrap();
        assert_eq!(frozen.joints()[1].limit_lower, 0.25);
        assert_eq!(frozen.joints()[1].limit_upper, 0.25);
        assert!(frozen.is_feasible(&vec![0.0, 0.25].into()));
        assert!(!frozen.is_feasible(&vec![0.0, 0.3].into()));
    }

    #[test]
    fn random_config_respects_limits() {
        use rand::SeedableRng;
        let chain = parse_chain(VALID_SPEC, "inline").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = chain.random_config(&mut rng);
            assert!(chain.is_feasible(&q));
        }
    }
}
