//! Poses and pose-error metrics.
//!
//! A [`Pose`] is a position plus a unit quaternion. Orientation error is
//! reported as the sum of absolute roll/pitch/yaw components of the
//! relative rotation, in degrees; the single geodesic angle is available
//! through [`OrientationMetric::Geodesic`] for sensitivity studies.

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// Position error below which a grasp counts as successful (strict `<`).
pub const GRASP_POSITION_TOL: f64 = 0.010;
/// Summed RPY orientation error in degrees below which a grasp counts
/// as successful (strict `<`).
pub const GRASP_ORIENTATION_TOL_DEG: f64 = 20.0;

/// A rigid pose: position in meters plus a unit quaternion.
///
/// The quaternion is canonicalized to `w >= 0` on construction so that
/// the two representations of the same rotation compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation: canonicalize(orientation),
        }
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), UnitQuaternion::identity())
    }

    pub fn from_isometry(iso: &Isometry3<f64>) -> Self {
        Self::new(iso.translation.vector, iso.rotation)
    }

    pub fn to_isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(Translation3::from(self.position), self.orientation)
    }

    /// Pose from xyz plus roll/pitch/yaw in radians (intrinsic ZYX,
    /// i.e. `Rz(yaw) * Ry(pitch) * Rx(roll)`).
    pub fn from_xyz_rpy(xyz: [f64; 3], rpy: [f64; 3]) -> Self {
        Self::new(
            Vector3::new(xyz[0], xyz[1], xyz[2]),
            UnitQuaternion::from_euler_angles(rpy[0], rpy[1], rpy[2]),
        )
    }
}

/// Flip the quaternion sign so that w >= 0.
fn canonicalize(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    if q.w < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

/// Error between two poses: Euclidean position distance plus summed
/// absolute RPY differences of the relative rotation, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseError {
    /// Euclidean distance between positions, meters.
    pub position_error: f64,
    /// Sum of |roll| + |pitch| + |yaw| of the relative rotation, degrees.
    pub orientation_error_sum: f64,
}

/// Which scalar orientation metric to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationMetric {
    /// Sum of absolute roll/pitch/yaw components, degrees.
    #[default]
    RpySum,
    /// Single geodesic rotation angle, degrees.
    Geodesic,
}

/// Wrap an angle in degrees into (-180, 180].
fn wrap_deg(a: f64) -> f64 {
    let mut w = a % 360.0;
    if w <= -180.0 {
        w += 360.0;
    } else if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// Pose error between `current` and `target` using the default RPY-sum
/// orientation metric.
pub fn pose_error(current: &Pose, target: &Pose) -> PoseError {
    pose_error_with_metric(current, target, OrientationMetric::RpySum)
}

/// Pose error with an explicit orientation metric.
pub fn pose_error_with_metric(
    current: &Pose,
    target: &Pose,
    metric: OrientationMetric,
) -> PoseError {
    let position_error = (current.position - target.position).norm();
    let rel = target.orientation.inverse() * current.orientation;
    let orientation_error_sum = match metric {
        OrientationMetric::RpySum => {
            let (roll, pitch, yaw) = rel.euler_angles();
            wrap_deg(roll.to_degrees()).abs()
                + wrap_deg(pitch.to_degrees()).abs()
                + wrap_deg(yaw.to_degrees()).abs()
        }
        OrientationMetric::Geodesic => rel.angle().to_degrees(),
    };
    PoseError {
        position_error,
        orientation_error_sum,
    }
}

/// Geodesic angle between two orientations, radians, in [0, pi].
pub fn geodesic_angle(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    (a.inverse() * b).angle()
}

/// Grasp-success predicate: position error < 10 mm AND summed
/// orientation error < 20 degrees, both strict.
pub fn is_grasp_success(err: &PoseError) -> bool {
    err.position_error < GRASP_POSITION_TOL
        && err.orientation_error_sum < GRASP_ORIENTATION_TOL_DEG
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identical_poses_have_zero_error() {
        let p = Pose::from_xyz_rpy([0.3, -0.2, 0.8], [0.1, -0.4, 1.2]);
        let e = pose_error(&p, &p);
        assert_eq!(e.position_error, 0.0);
        assert_relative_eq!(e.orientation_error_sum, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn pure_translation_error() {
        let a = Pose::from_xyz_rpy([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]);
        let b = Pose::from_xyz_rpy([0.005, 0.0, 0.0], [0.0, 0.0, 0.0]);
        let e = pose_error(&a, &b);
        assert_relative_eq!(e.position_error, 0.005, epsilon = 1e-12);
        assert_relative_eq!(e.orientation_error_sum, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn single_axis_rotation_error() {
        let a = Pose::from_xyz_rpy([0.0, 0.0, 0.0], [20f64.to_radians(), 0.0, 0.0]);
        let b = Pose::identity();
        let e = pose_error(&a, &b);
        assert_relative_eq!(e.position_error, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.orientation_error_sum, 20.0, epsilon = 1e-9);
    }

    #[test]
    fn grasp_success_boundaries() {
        let ok = PoseError {
            position_error: 0.009,
            orientation_error_sum: 19.9,
        };
        let at_pos = PoseError {
            position_error: 0.010,
            orientation_error_sum: 0.0,
        };
        let at_orient = PoseError {
            position_error: 0.0,
            orientation_error_sum: 20.0,
        };
        assert!(is_grasp_success(&ok));
        assert!(!is_grasp_success(&at_pos));
        assert!(!is_grasp_success(&at_orient));
    }

    #[test]
    fn position_error_is_symmetric() {
        let a = Pose::from_xyz_rpy([0.1, 0.2, 0.3], [0.0, 0.5, 0.0]);
        let b = Pose::from_xyz_rpy([-0.4, 0.0, 0.9], [0.3, 0.0, -0.2]);
        assert_eq!(
            pose_error(&a, &b).position_error,
            pose_error(&b, &a).position_error
        );
    }

    #[test]
    fn quaternion_sign_does_not_change_error() {
        let q = UnitQuaternion::from_euler_angles(0.3, -0.7, 1.1);
        let negated = UnitQuaternion::new_unchecked(-q.into_inner());
        let a = Pose::new(Vector3::new(0.1, 0.0, 0.0), q);
        let b = Pose::new(Vector3::new(0.1, 0.0, 0.0), negated);
        let target = Pose::from_xyz_rpy([0.0, 0.0, 0.0], [0.2, 0.1, -0.3]);
        let ea = pose_error(&a, &target);
        let eb = pose_error(&b, &target);
        assert_relative_eq!(
            ea.orientation_error_sum,
            eb.orientation_error_sum,
            epsilon = 1e-9
        );
    }

    #[test]
    fn canonicalization_makes_w_nonnegative() {
        let q = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), 3.0);
        let flipped = UnitQuaternion::new_unchecked(-q.into_inner());
        let p = Pose::new(Vector3::zeros(), flipped);
        assert!(p.orientation.w >= 0.0);
    }

    #[test]
    fn geodesic_metric_reports_single_angle() {
        let a = Pose::from_xyz_rpy([0.0; 3], [FRAC_PI_2, 0.0, 0.0]);
        let b = Pose::identity();
        let e = pose_error_with_metric(&a, &b, OrientationMetric::Geodesic);
        assert_relative_eq!(e.orientation_error_sum, 90.0, epsilon = 1e-9);
    }

    #[test]
    fn wrap_deg_half_open_interval() {
        assert_relative_eq!(wrap_deg(180.0), 180.0);
        assert_relative_eq!(wrap_deg(-180.0), 180.0);
        assert_relative_eq!(wrap_deg(190.0), -170.0);
        assert_relative_eq!(wrap_deg(-190.0), 170.0);
        assert_relative_eq!(wrap_deg(360.0), 0.0);
    }
}
