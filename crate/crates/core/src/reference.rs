//! Independent reference implementations used to verify the production
//! code paths.
//!
//! Everything here is deliberately written against raw 4x4 homogeneous
//! matrices and scalar formulas, sharing no math with the quaternion-based
//! kinematics in [`crate::chain`], so the two routes can check each other.

use crate::chain::{JointConfig, KinematicChain};

/// Row-major 4x4 homogeneous transform.
pub type Mat4 = [[f64; 4]; 4];

pub fn mat4_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Rotation about a unit axis by `angle`, Rodrigues' formula.
pub fn mat4_axis_angle(axis: [f64; 3], angle: f64) -> Mat4 {
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    let c = angle.cos();
    let s = angle.sin();
    let t = 1.0 - c;
    let mut m = mat4_identity();
    m[0][0] = t * x * x + c;
    m[0][1] = t * x * y - s * z;
    m[0][2] = t * x * z + s * y;
    m[1][0] = t * x * y + s * z;
    m[1][1] = t * y * y + c;
    m[1][2] = t * y * z - s * x;
    m[2][0] = t * x * z - s * y;
    m[2][1] = t * y * z + s * x;
    m[2][2] = t * z * z + c;
    m
}

/// Translation matrix.
pub fn mat4_translation(t: [f64; 3]) -> Mat4 {
    let mut m = mat4_identity();
    m[0][3] = t[0];
    m[1][3] = t[1];
    m[2][3] = t[2];
    m
}

/// Rotation from roll/pitch/yaw as `Rz(yaw) * Ry(pitch) * Rx(roll)`.
pub fn mat4_rpy(roll: f64, pitch: f64, yaw: f64) -> Mat4 {
    let rz = mat4_axis_angle([0.0, 0.0, 1.0], yaw);
    let ry = mat4_axis_angle([0.0, 1.0, 0.0], pitch);
    let rx = mat4_axis_angle([1.0, 0.0, 0.0], roll);
    mat4_mul(&mat4_mul(&rz, &ry), &rx)
}

/// Quaternion (w, x, y, z) from the rotation block, Shepperd's method,
/// sign-canonicalized to w >= 0.
pub fn mat4_to_quaternion(m: &Mat4) -> [f64; 4] {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let (w, x, y, z);
    if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (m[2][1] - m[1][2]) / s;
        y = (m[0][2] - m[2][0]) / s;
        z = (m[1][0] - m[0][1]) / s;
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
        w = (m[2][1] - m[1][2]) / s;
        x = 0.25 * s;
        y = (m[0][1] + m[1][0]) / s;
        z = (m[0][2] + m[2][0]) / s;
    } else if m[1][1] > m[2][2] {
        let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
        w = (m[0][2] - m[2][0]) / s;
        x = (m[0][1] + m[1][0]) / s;
        y = 0.25 * s;
        z = (m[1][2] + m[2][1]) / s;
    } else {
        let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
        w = (m[1][0] - m[0][1]) / s;
        x = (m[0][2] + m[2][0]) / s;
        y = (m[1][2] + m[2][1]) / s;
        z = 0.25 * s;
    }
    if w < 0.0 {
        [-w, -x, -y, -z]
    } else {
        [w, x, y, z]
    }
}

/// Forward kinematics by stepwise homogeneous-matrix multiplication.
///
/// Returns the end-effector position and quaternion (w, x, y, z).
pub fn fk_homogeneous(chain: &KinematicChain, q: &JointConfig) -> ([f64; 3], [f64; 4]) {
    assert_eq!(q.len(), chain.dof(), "joint vector length");
    let mut t = mat4_identity();
    for (joint, &angle) in chain.joints().iter().zip(&q.values) {
        let tr = joint.origin.translation.vector;
        let rot = joint.origin.rotation.to_rotation_matrix();
        let mut origin = mat4_translation([tr.x, tr.y, tr.z]);
        for i in 0..3 {
            for j in 0..3 {
                origin[i][j] = rot[(i, j)];
            }
        }
        t = mat4_mul(&t, &origin);
        t = mat4_mul(
            &t,
            &mat4_axis_angle([joint.axis.x, joint.axis.y, joint.axis.z], angle),
        );
    }
    let tr = chain.tool_offset().translation.vector;
    let rot = chain.tool_offset().rotation.to_rotation_matrix();
    let mut tool = mat4_translation([tr.x, tr.y, tr.z]);
    for i in 0..3 {
        for j in 0..3 {
            tool[i][j] = rot[(i, j)];
        }
    }
    t = mat4_mul(&t, &tool);
    (
        [t[0][3], t[1][3], t[2][3]],
        mat4_to_quaternion(&t),
    )
}

/// Central finite differences of the full pose: linear rows from position
/// differences, angular rows from the rotation-vector of the relative
/// rotation across the step.
pub fn finite_difference_jacobian(
    chain: &KinematicChain,
    q: &JointConfig,
    h: f64,
) -> nalgebra::DMatrix<f64> {
    let n = chain.dof();
    let mut jac = nalgebra::DMatrix::zeros(6, n);
    for i in 0..n {
        let mut plus = q.clone();
        let mut minus = q.clone();
        plus.values[i] += h;
        minus.values[i] -= h;
        let fp = chain.forward_kinematics(&plus).unwrap();
        let fm = chain.forward_kinematics(&minus).unwrap();
        let dp = (fp.position - fm.position) / (2.0 * h);
        let rel = fp.orientation * fm.orientation.inverse();
        let w = rel.scaled_axis() / (2.0 * h);
        for r in 0..3 {
            jac[(r, i)] = dp[r];
            jac[(r + 3, i)] = w[r];
        }
    }
    jac
}

/// All closed-form solutions of the planar two-link arm (both joints
/// about z, links `l1` and `l2` along x) reaching position (x, y).
///
/// Returns zero, one or two (q1, q2) pairs.
pub fn two_link_ik(l1: f64, l2: f64, x: f64, y: f64) -> Vec<(f64, f64)> {
    let r2 = x * x + y * y;
    let cos_q2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if cos_q2.abs() > 1.0 + 1e-12 {
        return Vec::new();
    }
    let cos_q2 = cos_q2.clamp(-1.0, 1.0);
    let q2 = cos_q2.acos();
    let mut out = Vec::new();
    for elbow in [q2, -q2] {
        let k1 = l1 + l2 * elbow.cos();
        let k2 = l2 * elbow.sin();
        let q1 = y.atan2(x) - k2.atan2(k1);
        out.push((q1, elbow));
        if q2.abs() < 1e-12 {
            break; // straight arm: both branches coincide
        }
    }
    out
}
