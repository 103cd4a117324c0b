//! Shared fixtures and an independent forward kinematics oracle.
//!
//! The oracle computes every tracked frame with plain 4x4 matrix
//! arithmetic on raw arrays, touching none of the library's pose or
//! propagation code, so agreement is meaningful evidence.
#![allow(dead_code)]

use chainsim::chain_model::{Axis, GimbalOrder};
use chainsim::kinematics::{FrameState, Pose};

/// Reference chain with all six links driven: types P R R R P R.
pub fn dense_reference_table() -> Vec<Vec<f64>> {
    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
    vec![
        vec![FRAC_PI_2, 0.89, 0.0, 0.14, 2.0],
        vec![FRAC_PI_2, 0.83, FRAC_PI_2, 0.29, 1.0],
        vec![FRAC_PI_2, 0.88, 0.0, 0.22, 1.0],
        vec![FRAC_PI_2, 0.85, FRAC_PI_2, 0.24, 1.0],
        vec![0.0, 0.86, FRAC_PI_2, 0.13, 2.0],
        vec![0.0, 0.89, 0.0, 0.23, 1.0],
        vec![FRAC_PI_2, 0.89, FRAC_PI_2, 0.12, 1.0],
        vec![-FRAC_PI_2, 0.86, 0.0, 0.29, 1.0],
    ]
}

/// Reference chain with two empty links: types P E P P R R.
pub fn sparse_reference_table() -> Vec<Vec<f64>> {
    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
    vec![
        vec![0.0, 0.84, 0.0, 0.17, 2.0],
        vec![0.0, 0.82, FRAC_PI_2, 0.26, 0.0],
        vec![FRAC_PI_2, 0.82, FRAC_PI_2, 0.21, 2.0],
        vec![0.0, 0.85, -FRAC_PI_2, 0.23, 2.0],
        vec![FRAC_PI_2, 0.83, -FRAC_PI_2, 0.26, 1.0],
        vec![0.0, 0.87, 0.0, 0.12, 1.0],
        vec![FRAC_PI_2, 0.88, FRAC_PI_2, 0.27, 1.0],
        vec![-FRAC_PI_2, 0.85, FRAC_PI_2, 0.20, 1.0],
    ]
}

/// Oscillation settings paired with the reference chains in the
/// pipeline tests: moderate amplitudes, mixed frequencies and phases.
pub fn reference_joint_table() -> Vec<Vec<f64>> {
    vec![
        vec![0.50, 0.12, 0.05, 1.30, 0.40],
        vec![0.35, 0.20, -0.10, 0.80, 1.10],
        vec![0.60, 0.15, 0.00, 1.70, 2.00],
        vec![0.25, 0.25, 0.20, 0.60, 0.70],
        vec![0.45, 0.10, -0.05, 1.10, 1.60],
        vec![0.55, 0.18, 0.10, 0.90, 2.40],
        vec![0.30, 0.10, 0.00, 1.00, 0.00],
        vec![0.40, 0.20, 0.00, 0.50, 0.30],
    ]
}

pub fn reference_base_table() -> Vec<Vec<f64>> {
    vec![
        vec![0.20, 0.00, 1.10, 0.30],
        vec![0.25, 0.10, 0.70, 1.20],
    ]
}

pub type M4 = [[f64; 4]; 4];

pub fn m4_identity() -> M4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn m4_mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for (k, b_row) in b.iter().enumerate() {
                acc += a[i][k] * b_row[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn m4_rot_x(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn m4_rot_y(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [
        [c, 0.0, s, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-s, 0.0, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn m4_rot_z(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [
        [c, -s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn m4_trans(x: f64, y: f64, z: f64) -> M4 {
    [
        [1.0, 0.0, 0.0, x],
        [0.0, 1.0, 0.0, y],
        [0.0, 0.0, 1.0, z],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// Entering a parameter frame: world axes seen from the frame.
pub fn m4_world_to_frame() -> M4 {
    [
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// Leaving a parameter frame: the inverse of `m4_world_to_frame`.
pub fn m4_frame_to_world() -> M4 {
    [
        [0.0, 0.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

fn m4_rot_axis(axis: Axis, t: f64) -> M4 {
    match axis {
        Axis::X => m4_rot_x(t),
        Axis::Y => m4_rot_y(t),
        Axis::Z => m4_rot_z(t),
    }
}

/// Geometry of the sensor placement, mirroring the library defaults.
#[derive(Clone, Copy)]
pub struct OracleGeometry {
    pub mid_fraction: f64,
    pub end_fraction: f64,
    pub lateral_offset: f64,
}

impl Default for OracleGeometry {
    fn default() -> Self {
        OracleGeometry {
            mid_fraction: 0.5,
            end_fraction: 0.9,
            lateral_offset: 0.05,
        }
    }
}

/// Poses of every tracked frame for a frozen configuration, computed
/// from the raw table with homogeneous matrices in one pass.
///
/// `base` holds the three base translations then the three gimbal
/// angles keyed by axis (x, y, z). `joints` holds one value per link,
/// ignored for empty links.
pub fn oracle_frames(
    dh: &[Vec<f64>],
    base: &[f64; 6],
    order: GimbalOrder,
    joints: &[f64; 6],
    geometry: OracleGeometry,
) -> Vec<(String, M4)> {
    assert_eq!(dh.len(), 8);
    let mut frames = Vec::new();

    let mut t = m4_trans(base[0], base[1], base[2]);
    for axis in order.axes() {
        let angle = match axis {
            Axis::X => base[3],
            Axis::Y => base[4],
            Axis::Z => base[5],
        };
        t = m4_mul(&t, &m4_rot_axis(axis, angle));
    }
    frames.push(("base_imu".to_string(), t));

    for link in 1..=6 {
        let row = &dh[link - 1];
        let (alpha, a, theta, d, kind) = (row[0], row[1], row[2], row[3], row[4]);
        if kind == 0.0 {
            continue;
        }
        t = m4_mul(&t, &m4_world_to_frame());
        t = m4_mul(&t, &m4_rot_x(alpha));
        if kind == 1.0 {
            t = m4_mul(&t, &m4_trans(0.0, 0.0, d));
            t = m4_mul(&t, &m4_rot_z(joints[link - 1]));
        } else {
            t = m4_mul(&t, &m4_rot_z(theta));
            t = m4_mul(&t, &m4_trans(0.0, 0.0, joints[link - 1]));
        }
        let mid = m4_mul(
            &t,
            &m4_trans(geometry.mid_fraction * a, geometry.lateral_offset, 0.0),
        );
        frames.push((format!("link{link}_imu_mid"), mid));
        t = m4_mul(&t, &m4_trans(a, 0.0, 0.0));
        let end = m4_mul(
            &t,
            &m4_trans(
                (geometry.end_fraction - 1.0) * a,
                -geometry.lateral_offset,
                0.0,
            ),
        );
        frames.push((format!("link{link}_imu_end"), end));
        t = m4_mul(&t, &m4_frame_to_world());
    }

    let tool_a = dh[6][1];
    t = m4_mul(&t, &m4_trans(0.0, 0.0, tool_a / 2.0));
    t = m4_mul(&t, &m4_trans(0.0, 0.0, tool_a / 2.0));
    t = m4_mul(&t, &m4_world_to_frame());
    frames.push(("tool_imu".to_string(), t));
    frames.push(("tooltip".to_string(), t));

    frames
}

/// Largest entry difference between a pose and a homogeneous matrix.
pub fn pose_vs_matrix(pose: &Pose, m: &M4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((pose.rotation[(i, j)] - m[i][j]).abs());
        }
        worst = worst.max((pose.translation[i] - m[i][3]).abs());
    }
    worst
}

/// Largest difference across all six fields of two frame states.
pub fn max_state_diff(a: &FrameState, b: &FrameState) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a.rotation[(i, j)] - b.rotation[(i, j)]).abs());
        }
    }
    worst
        .max((a.position - b.position).norm())
        .max((a.angular_velocity - b.angular_velocity).norm())
        .max((a.linear_velocity - b.linear_velocity).norm())
        .max((a.angular_acceleration - b.angular_acceleration).norm())
        .max((a.linear_acceleration - b.linear_acceleration).norm())
}
