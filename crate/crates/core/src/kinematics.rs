//! Pose and rigid body state propagation along a compiled chain.
//!
//! All states are resolved in the world frame. Propagation is exact:
//! joint rates enter through closed form velocity and acceleration
//! updates, never through numerical differentiation. A finite
//! difference oracle is provided for cross checking.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::chain_model::{Attachment, Axis, ChainPlan, ElementaryTransform, FrameName, LinkType};
use crate::error::{Error, Result};
use crate::trajectory::{joint_motion, BaseAxes, JointOscTable, MotionSample};

/// Rotation plus translation. Composition acts left to right: the
/// composed pose applies `self` first, then `next` in self's frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn rot_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Pose {
            rotation: Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
            translation: Vector3::zeros(),
        }
    }

    pub fn rot_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Pose {
            rotation: Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
            translation: Vector3::zeros(),
        }
    }

    pub fn rot_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Pose {
            rotation: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            translation: Vector3::zeros(),
        }
    }

    pub fn rot_axis(axis: Axis, angle: f64) -> Self {
        match axis {
            Axis::X => Pose::rot_x(angle),
            Axis::Y => Pose::rot_y(angle),
            Axis::Z => Pose::rot_z(angle),
        }
    }

    pub fn translation_xyz(x: f64, y: f64, z: f64) -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vector3::new(x, y, z),
        }
    }

    /// Change of basis entering a link's parameter frame. Exact in
    /// floating point: every entry is 0 or +-1.
    pub fn world_to_dh() -> Self {
        Pose {
            rotation: Matrix3::new(0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0),
            translation: Vector3::zeros(),
        }
    }

    /// Inverse of `world_to_dh`.
    pub fn dh_to_world() -> Self {
        Pose {
            rotation: Matrix3::new(0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0),
            translation: Vector3::zeros(),
        }
    }

    pub fn compose(&self, next: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * next.rotation,
            translation: self.translation + self.rotation * next.translation,
        }
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut out = Matrix4::identity();
        out.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        out.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        out
    }
}

/// How far a matrix is from being a proper rotation.
pub fn orthonormality_defect(r: &Matrix3<f64>) -> f64 {
    let gram = r * r.transpose() - Matrix3::identity();
    gram.norm() + (r.determinant() - 1.0).abs()
}

/// Full second order state of a frame, world resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameState {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
    pub linear_velocity: Vector3<f64>,
    pub angular_acceleration: Vector3<f64>,
    pub linear_acceleration: Vector3<f64>,
}

impl FrameState {
    pub fn at_rest() -> Self {
        FrameState {
            rotation: Matrix3::identity(),
            position: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
            linear_velocity: Vector3::zeros(),
            angular_acceleration: Vector3::zeros(),
            linear_acceleration: Vector3::zeros(),
        }
    }

    pub fn pose(&self) -> Pose {
        Pose {
            rotation: self.rotation,
            translation: self.position,
        }
    }
}

/// Rigid step with no own motion. The lever arm picks up the usual
/// omega cross and centripetal terms.
pub fn propagate_const(state: &FrameState, pose: &Pose) -> FrameState {
    let r = state.rotation * pose.translation;
    let w = state.angular_velocity;
    FrameState {
        rotation: state.rotation * pose.rotation,
        position: state.position + r,
        angular_velocity: w,
        linear_velocity: state.linear_velocity + w.cross(&r),
        angular_acceleration: state.angular_acceleration,
        linear_acceleration: state.linear_acceleration
            + state.angular_acceleration.cross(&r)
            + w.cross(&w.cross(&r)),
    }
}

/// Rotation about a frame local axis with the given joint motion.
pub fn propagate_revolute_axis(state: &FrameState, axis: Axis, m: &MotionSample) -> FrameState {
    let u = state.rotation * axis.unit();
    let w = state.angular_velocity;
    FrameState {
        rotation: state.rotation * Pose::rot_axis(axis, m.q).rotation,
        position: state.position,
        angular_velocity: w + m.qd * u,
        linear_velocity: state.linear_velocity,
        angular_acceleration: state.angular_acceleration + m.qdd * u + w.cross(&(m.qd * u)),
        linear_acceleration: state.linear_acceleration,
    }
}

/// Translation along a frame local axis. The 2 omega cross v term is
/// the Coriolis contribution of sliding inside a rotating frame.
pub fn propagate_prismatic_axis(state: &FrameState, axis: Axis, m: &MotionSample) -> FrameState {
    let u = state.rotation * axis.unit();
    let r = m.q * u;
    let w = state.angular_velocity;
    FrameState {
        rotation: state.rotation,
        position: state.position + r,
        angular_velocity: w,
        linear_velocity: state.linear_velocity + m.qd * u + w.cross(&r),
        angular_acceleration: state.angular_acceleration,
        linear_acceleration: state.linear_acceleration
            + m.qdd * u
            + 2.0 * w.cross(&(m.qd * u))
            + state.angular_acceleration.cross(&r)
            + w.cross(&w.cross(&r)),
    }
}

pub fn propagate_revolute(state: &FrameState, m: &MotionSample) -> FrameState {
    propagate_revolute_axis(state, Axis::Z, m)
}

pub fn propagate_prismatic(state: &FrameState, m: &MotionSample) -> FrameState {
    propagate_prismatic_axis(state, Axis::Z, m)
}

/// Insertion ordered frame -> value map. Lookup is linear; the chain
/// never carries more than fifteen frames.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMap<T> {
    entries: Vec<(FrameName, T)>,
}

impl<T> FrameMap<T> {
    pub fn new(entries: Vec<(FrameName, T)>) -> Self {
        FrameMap { entries }
    }

    pub fn get(&self, frame: FrameName) -> Option<&T> {
        self.entries
            .iter()
            .find(|(name, _)| *name == frame)
            .map(|(_, value)| value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FrameName, T)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frames(&self) -> Vec<FrameName> {
        self.entries.iter().map(|(name, _)| *name).collect()
    }
}

/// Sample index of the base coordinate bound to a rotation axis. The
/// binding is by axis name, independent of gimbal application order.
fn base_rotation_index(axis: Axis) -> usize {
    match axis {
        Axis::X => 3,
        Axis::Y => 4,
        Axis::Z => 5,
    }
}

fn slot_motion(
    plan: &ChainPlan,
    joints: &JointOscTable,
    link: usize,
    expected: LinkType,
    t: f64,
) -> Result<MotionSample> {
    let slot = plan.joint_slots.get(&link).ok_or_else(|| Error::InconsistentPlan {
        details: format!("joint element for link {link} has no slot"),
    })?;
    if slot.kind != expected {
        return Err(Error::InconsistentPlan {
            details: format!(
                "link {link} slot is {:?} but the element expects {:?}",
                slot.kind, expected
            ),
        });
    }
    joint_motion(joints, link, expected, t)
}

/// Walks the element list, yielding one value per attachment by
/// applying `step` through the elements and `snapshot` at attachment
/// points. Output order matches `plan.attachments`.
fn walk_chain<S, T>(
    plan: &ChainPlan,
    initial: S,
    mut step: impl FnMut(&S, &ElementaryTransform) -> Result<S>,
    mut snapshot: impl FnMut(&S, &Attachment) -> T,
) -> Result<FrameMap<T>> {
    let n = plan.elements.len();
    for att in &plan.attachments {
        if att.position > n {
            return Err(Error::InconsistentPlan {
                details: format!(
                    "attachment {} at position {} but the chain has {} elements",
                    att.frame, att.position, n
                ),
            });
        }
    }

    let mut results: Vec<Option<T>> = plan.attachments.iter().map(|_| None).collect();
    let mut state = initial;
    for applied in 0..=n {
        if applied > 0 {
            let element = &plan.elements[applied - 1];
            state = step(&state, &element.transform)?;
        }
        for (slot, att) in results.iter_mut().zip(&plan.attachments) {
            if att.position == applied && slot.is_none() {
                *slot = Some(snapshot(&state, att));
            }
        }
    }

    let entries = plan
        .attachments
        .iter()
        .zip(results)
        .map(|(att, value)| (att.frame, value.expect("every attachment visited")))
        .collect();
    Ok(FrameMap::new(entries))
}

/// Full second order state of every attached frame at time t.
pub fn evaluate_chain(
    plan: &ChainPlan,
    joints: &JointOscTable,
    base: &BaseAxes,
    t: f64,
) -> Result<FrameMap<FrameState>> {
    let base_samples = base.sample(t);
    walk_chain(
        plan,
        FrameState::at_rest(),
        |state, transform| match transform {
            ElementaryTransform::JointRotZ(link) => {
                let m = slot_motion(plan, joints, *link, LinkType::Revolute, t)?;
                Ok(propagate_revolute(state, &m))
            }
            ElementaryTransform::JointTransZ(link) => {
                let m = slot_motion(plan, joints, *link, LinkType::Prismatic, t)?;
                Ok(propagate_prismatic(state, &m))
            }
            ElementaryTransform::BaseCartesian => {
                let mut s = *state;
                for (i, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
                    s = propagate_prismatic_axis(&s, axis, &base_samples[i]);
                }
                Ok(s)
            }
            ElementaryTransform::BaseGimbal => {
                let mut s = *state;
                for axis in plan.gimbal_order.axes() {
                    s = propagate_revolute_axis(&s, axis, &base_samples[base_rotation_index(axis)]);
                }
                Ok(s)
            }
            constant => Ok(propagate_const(
                state,
                &constant.const_pose().expect("constant element"),
            )),
        },
        |state, att| propagate_const(state, &att.offset),
    )
}

/// A chain configuration frozen at one instant: six base coordinates
/// and one value per driven joint.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenConfig {
    pub base: [f64; 6],
    pub joints: BTreeMap<usize, f64>,
}

impl FrozenConfig {
    pub fn zeros(plan: &ChainPlan) -> Self {
        FrozenConfig {
            base: [0.0; 6],
            joints: plan.joint_slots.keys().map(|&k| (k, 0.0)).collect(),
        }
    }

    pub fn from_trajectories(
        plan: &ChainPlan,
        joints: &JointOscTable,
        base: &BaseAxes,
        t: f64,
    ) -> Result<Self> {
        let base_samples = base.sample(t);
        let mut base_q = [0.0; 6];
        for (i, m) in base_samples.iter().enumerate() {
            base_q[i] = m.q;
        }
        let mut joint_q = BTreeMap::new();
        for (&link, slot) in &plan.joint_slots {
            joint_q.insert(link, joint_motion(joints, link, slot.kind, t)?.q);
        }
        Ok(FrozenConfig {
            base: base_q,
            joints: joint_q,
        })
    }
}

/// Pose of every attached frame for a frozen configuration.
pub fn fk_pose(plan: &ChainPlan, config: &FrozenConfig) -> Result<FrameMap<Pose>> {
    let joint_value = |link: usize| -> Result<f64> {
        config
            .joints
            .get(&link)
            .copied()
            .ok_or(Error::MissingJointValue { link })
    };
    walk_chain(
        plan,
        Pose::identity(),
        |pose, transform| {
            let step = match transform {
                ElementaryTransform::JointRotZ(link) => Pose::rot_z(joint_value(*link)?),
                ElementaryTransform::JointTransZ(link) => {
                    Pose::translation_xyz(0.0, 0.0, joint_value(*link)?)
                }
                ElementaryTransform::BaseCartesian => {
                    Pose::translation_xyz(config.base[0], config.base[1], config.base[2])
                }
                ElementaryTransform::BaseGimbal => {
                    let mut g = Pose::identity();
                    for axis in plan.gimbal_order.axes() {
                        g = g.compose(&Pose::rot_axis(
                            axis,
                            config.base[base_rotation_index(axis)],
                        ));
                    }
                    g
                }
                constant => constant.const_pose().expect("constant element"),
            };
            Ok(pose.compose(&step))
        },
        |pose, att| pose.compose(&att.offset),
    )
}

/// Velocity and acceleration estimates obtained numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub angular_velocity: Vector3<f64>,
    pub linear_velocity: Vector3<f64>,
    pub angular_acceleration: Vector3<f64>,
    pub linear_acceleration: Vector3<f64>,
}

fn angular_velocity_estimate(
    r_plus: &Matrix3<f64>,
    r_minus: &Matrix3<f64>,
    r_center: &Matrix3<f64>,
    h: f64,
) -> Vector3<f64> {
    let rdot = (r_plus - r_minus) / (2.0 * h);
    let m = rdot * r_center.transpose();
    // Symmetrize away the discretization error before reading off the
    // skew components.
    let s = (m - m.transpose()) * 0.5;
    Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)])
}

/// Five point finite difference rates for every attached frame,
/// independent of the analytic propagation path.
pub fn finite_difference_oracle(
    plan: &ChainPlan,
    joints: &JointOscTable,
    base: &BaseAxes,
    t: f64,
    h: f64,
) -> Result<FrameMap<RateEstimate>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let poses_at = |time: f64| -> Result<FrameMap<Pose>> {
        let frozen = FrozenConfig::from_trajectories(plan, joints, base, time)?;
        fk_pose(plan, &frozen)
    };
    let pm2 = poses_at(t - 2.0 * h)?;
    let pm1 = poses_at(t - h)?;
    let p0 = poses_at(t)?;
    let pp1 = poses_at(t + h)?;
    let pp2 = poses_at(t + 2.0 * h)?;

    let mut entries = Vec::with_capacity(p0.len());
    for (i, (frame, pose0)) in p0.iter().enumerate() {
        let at = |map: &FrameMap<Pose>| -> Pose {
            let (name, pose) = &map.entries[i];
            debug_assert_eq!(name, frame);
            *pose
        };
        let (m2, m1, c, p1, p2) = (at(&pm2), at(&pm1), *pose0, at(&pp1), at(&pp2));

        let linear_velocity = (p1.translation - m1.translation) / (2.0 * h);
        let linear_acceleration =
            (p1.translation - 2.0 * c.translation + m1.translation) / (h * h);
        let w_center = angular_velocity_estimate(&p1.rotation, &m1.rotation, &c.rotation, h);
        let w_plus = angular_velocity_estimate(&p2.rotation, &c.rotation, &p1.rotation, h);
        let w_minus = angular_velocity_estimate(&c.rotation, &m2.rotation, &m1.rotation, h);
        let angular_acceleration = (w_plus - w_minus) / (2.0 * h);

        entries.push((
            *frame,
            RateEstimate {
                angular_velocity: w_center,
                linear_velocity,
                angular_acceleration,
                linear_acceleration,
            },
        ));
    }
    Ok(FrameMap::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_model::{compile_chain, parse_dh_table, ChainConfig, JointSlot};
    use crate::trajectory::{parse_base_table, parse_joint_table, BaseOscTable};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn mixed_table() -> crate::chain_model::DHTable {
        let raw = vec![
            vec![FRAC_PI_2, 0.89, 0.0, 0.14, 2.0],
            vec![FRAC_PI_2, 0.83, FRAC_PI_2, 0.29, 1.0],
            vec![0.0, 0.88, 0.0, 0.22, 1.0],
            vec![FRAC_PI_2, 0.85, FRAC_PI_2, 0.24, 1.0],
            vec![0.0, 0.86, FRAC_PI_2, 0.13, 2.0],
            vec![-FRAC_PI_2, 0.89, 0.0, 0.23, 1.0],
            vec![FRAC_PI_2, 0.2, FRAC_PI_2, 0.12, 1.0],
            vec![0.0, 0.86, 0.0, 0.29, 1.0],
        ];
        parse_dh_table(&raw).unwrap()
    }

    fn busy_joints() -> JointOscTable {
        let mut raw = Vec::new();
        for i in 0..8 {
            let k = i as f64;
            raw.push(vec![
                0.3 + 0.05 * k,
                0.1 + 0.02 * k,
                if i % 2 == 0 { 0.1 } else { -0.1 },
                0.5 + 0.3 * k,
                0.2 * k,
            ]);
        }
        parse_joint_table(&raw).unwrap()
    }

    fn busy_base() -> BaseAxes {
        let table = parse_base_table(&vec![
            vec![0.15, 0.05, 1.1, 0.3],
            vec![0.2, -0.1, 0.8, 1.0],
        ])
        .unwrap();
        BaseAxes::from_shared(&table)
    }

    #[test]
    fn const_step_on_spinning_frame() {
        let w = 2.0;
        let mut state = FrameState::at_rest();
        state.angular_velocity = Vector3::new(0.0, 0.0, w);
        let out = propagate_const(&state, &Pose::translation_xyz(0.5, 0.0, 0.0));
        assert_eq!(out.position, Vector3::new(0.5, 0.0, 0.0));
        // v = w x r, a = w x (w x r)
        assert!((out.linear_velocity - Vector3::new(0.0, w * 0.5, 0.0)).norm() < 1e-14);
        assert!((out.linear_acceleration - Vector3::new(-w * w * 0.5, 0.0, 0.0)).norm() < 1e-14);
        assert_eq!(out.angular_velocity, state.angular_velocity);
    }

    #[test]
    fn revolute_step_accumulates_rates() {
        let state = FrameState::at_rest();
        let m = MotionSample {
            q: 0.3,
            qd: 1.5,
            qdd: -0.4,
        };
        let out = propagate_revolute(&state, &m);
        assert!((out.angular_velocity - Vector3::new(0.0, 0.0, 1.5)).norm() < 1e-14);
        assert!((out.angular_acceleration - Vector3::new(0.0, 0.0, -0.4)).norm() < 1e-14);
        assert_eq!(out.position, Vector3::zeros());

        // A second joint on a tilted axis picks up the gyroscopic term
        // w x (qd u).
        let tilted = propagate_revolute_axis(
            &out,
            Axis::X,
            &MotionSample {
                q: 0.0,
                qd: 2.0,
                qdd: 0.0,
            },
        );
        let u = out.rotation * Vector3::x();
        let expected = out.angular_acceleration + out.angular_velocity.cross(&(2.0 * u));
        assert!((tilted.angular_acceleration - expected).norm() < 1e-14);
    }

    #[test]
    fn prismatic_step_has_coriolis_term() {
        let w = 1.2;
        let mut state = FrameState::at_rest();
        state.angular_velocity = Vector3::new(0.0, 0.0, w);
        let m = MotionSample {
            q: 0.4,
            qd: 0.9,
            qdd: 0.2,
        };
        let out = propagate_prismatic_axis(&state, Axis::X, &m);
        let expected_v = Vector3::new(0.9, w * 0.4, 0.0);
        assert!((out.linear_velocity - expected_v).norm() < 1e-14);
        let expected_a = Vector3::new(0.2, 0.0, 0.0)
            + 2.0 * Vector3::new(0.0, 0.0, w).cross(&Vector3::new(0.9, 0.0, 0.0))
            + Vector3::new(0.0, 0.0, w).cross(&Vector3::new(0.0, 0.0, w).cross(&Vector3::new(0.4, 0.0, 0.0)));
        assert!((out.linear_acceleration - expected_a).norm() < 1e-14);
    }

    #[test]
    fn rot_y_maps_axes() {
        let r = Pose::rot_y(FRAC_PI_2).rotation;
        assert!((r * Vector3::x() - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert!((r * Vector3::z() - Vector3::x()).norm() < 1e-15);
    }

    #[test]
    fn homogeneous_matches_composition() {
        let a = Pose::rot_x(0.4).compose(&Pose::translation_xyz(0.1, 0.2, 0.3));
        let b = Pose::rot_z(-1.1).compose(&Pose::translation_xyz(0.5, 0.0, 0.2));
        let composed = a.compose(&b);
        let product = a.to_homogeneous() * b.to_homogeneous();
        assert!((composed.to_homogeneous() - product).norm() < 1e-13);
    }

    #[test]
    fn evaluate_matches_frozen_fk() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let joints = busy_joints();
        let base = busy_base();
        for &t in &[0.0, 0.41, 1.73] {
            let states = evaluate_chain(&plan, &joints, &base, t).unwrap();
            let frozen = FrozenConfig::from_trajectories(&plan, &joints, &base, t).unwrap();
            let poses = fk_pose(&plan, &frozen).unwrap();
            assert_eq!(states.frames(), poses.frames());
            for (name, state) in states.iter() {
                let pose = poses.get(*name).unwrap();
                assert!(
                    (state.rotation - pose.rotation).norm() < 1e-12,
                    "rotation mismatch at {name}"
                );
                assert!(
                    (state.position - pose.translation).norm() < 1e-12,
                    "position mismatch at {name}"
                );
            }
        }
    }

    #[test]
    fn analytic_rates_match_finite_differences() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let joints = busy_joints();
        let base = busy_base();
        let h = 1e-4;
        for &t in &[0.3, 1.1] {
            let states = evaluate_chain(&plan, &joints, &base, t).unwrap();
            let numeric = finite_difference_oracle(&plan, &joints, &base, t, h).unwrap();
            for (name, state) in states.iter() {
                let est = numeric.get(*name).unwrap();
                assert!(
                    (state.linear_velocity - est.linear_velocity).norm() < 1e-5,
                    "linear velocity mismatch at {name} t={t}"
                );
                assert!(
                    (state.angular_velocity - est.angular_velocity).norm() < 1e-5,
                    "angular velocity mismatch at {name} t={t}"
                );
                assert!(
                    (state.linear_acceleration - est.linear_acceleration).norm() < 1e-3,
                    "linear acceleration mismatch at {name} t={t}"
                );
                assert!(
                    (state.angular_acceleration - est.angular_acceleration).norm() < 1e-3,
                    "angular acceleration mismatch at {name} t={t}"
                );
            }
        }
    }

    #[test]
    fn still_chain_has_zero_rates() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let joints =
            parse_joint_table(&vec![vec![0.0, 0.0, 0.3, 0.0, 0.0]; 8]).unwrap();
        let base = BaseAxes::from_shared(&BaseOscTable::default());
        let early = evaluate_chain(&plan, &joints, &base, 0.0).unwrap();
        let late = evaluate_chain(&plan, &joints, &base, 5.0).unwrap();
        for ((name, a), (_, b)) in early.iter().zip(late.iter()) {
            assert!(a.angular_velocity.norm() < 1e-15, "moving {name}");
            assert!(a.linear_velocity.norm() < 1e-15);
            assert!(a.linear_acceleration.norm() < 1e-15);
            assert!((a.position - b.position).norm() < 1e-12);
        }
    }

    #[test]
    fn rotations_stay_orthonormal() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let joints = busy_joints();
        let base = busy_base();
        for &t in &[0.0, 0.7, 2.9, 11.4] {
            let states = evaluate_chain(&plan, &joints, &base, t).unwrap();
            for (name, state) in states.iter() {
                assert!(
                    orthonormality_defect(&state.rotation) < 1e-12,
                    "defect at {name} t={t}"
                );
            }
        }
    }

    #[test]
    fn fk_requires_joint_values() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let mut config = FrozenConfig::zeros(&plan);
        config.joints.remove(&3);
        assert!(matches!(
            fk_pose(&plan, &config).unwrap_err(),
            Error::MissingJointValue { link: 3 }
        ));
    }

    #[test]
    fn inconsistent_plan_is_caught() {
        let table = mixed_table();
        let mut plan = compile_chain(&table, &ChainConfig::default()).unwrap();
        // Claim link 2 is prismatic while its element says revolute.
        plan.joint_slots.insert(
            2,
            JointSlot {
                kind: LinkType::Prismatic,
                rail_length: Some(0.1),
            },
        );
        let err = evaluate_chain(&plan, &busy_joints(), &busy_base(), 0.0).unwrap_err();
        assert!(matches!(err, Error::InconsistentPlan { .. }));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn gimbal_order_changes_pose_not_binding() {
        let table = mixed_table();
        let joints = busy_joints();
        let base = busy_base();
        let xyz = compile_chain(
            &table,
            &ChainConfig {
                gimbal_order: crate::chain_model::GimbalOrder::Xyz,
                ..ChainConfig::default()
            },
        )
        .unwrap();
        let zyx = compile_chain(
            &table,
            &ChainConfig {
                gimbal_order: crate::chain_model::GimbalOrder::Zyx,
                ..ChainConfig::default()
            },
        )
        .unwrap();
        let a = evaluate_chain(&xyz, &joints, &base, 0.6).unwrap();
        let b = evaluate_chain(&zyx, &joints, &base, 0.6).unwrap();
        let ra = a.get(FrameName::BaseImu).unwrap().rotation;
        let rb = b.get(FrameName::BaseImu).unwrap().rotation;
        assert!((ra - rb).norm() > 1e-3);

        // With a single active rotation axis the order cannot matter.
        let mut axes = busy_base();
        axes.axes[3] = Default::default();
        axes.axes[4] = Default::default();
        let a = evaluate_chain(&xyz, &joints, &axes, 0.6).unwrap();
        let b = evaluate_chain(&zyx, &joints, &axes, 0.6).unwrap();
        let ra = a.get(FrameName::BaseImu).unwrap().rotation;
        let rb = b.get(FrameName::BaseImu).unwrap().rotation;
        assert!((ra - rb).norm() < 1e-12);
    }

    #[test]
    fn frozen_config_tracks_trajectories() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let joints = busy_joints();
        let base = busy_base();
        let frozen = FrozenConfig::from_trajectories(&plan, &joints, &base, 0.9).unwrap();
        assert_eq!(frozen.joints.len(), plan.joint_count());
        let m = joint_motion(&joints, 2, LinkType::Revolute, 0.9).unwrap();
        assert!((frozen.joints[&2] - m.q).abs() < 1e-15);

        let zeros = FrozenConfig::zeros(&plan);
        assert!(zeros.base.iter().all(|&b| b == 0.0));
        assert!(zeros.joints.values().all(|&q| q == 0.0));
    }

    #[test]
    fn oracle_rejects_bad_step() {
        let plan = compile_chain(&mixed_table(), &ChainConfig::default()).unwrap();
        let err =
            finite_difference_oracle(&plan, &busy_joints(), &busy_base(), 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn world_dh_basis_is_a_rotation() {
        for pose in [Pose::world_to_dh(), Pose::dh_to_world()] {
            assert!(orthonormality_defect(&pose.rotation) < 1e-15);
        }
        // The basis change is RotY(-pi/2) then RotX(pi/2).
        let built = Pose::rot_y(-PI / 2.0).compose(&Pose::rot_x(PI / 2.0));
        assert!((built.rotation - Pose::world_to_dh().rotation).norm() < 1e-15);
    }
}
