//! Forward kinematics and point Jacobians over the kinematic tree.

use super::{JointKind, ModelDef, ModelError, State};
use crate::spatial::{Pose, UnitQuat, Vec3};
use nalgebra::{DVector, Matrix3xX};

/// Local joint motion for the current joint coordinates.
fn joint_motion(kind: JointKind, axis: &Vec3, q: &[f64]) -> Pose {
    match kind {
        JointKind::Free => Pose::new(
            UnitQuat::new(q[3], q[4], q[5], q[6]),
            Vec3::new(q[0], q[1], q[2]),
        ),
        JointKind::Revolute => Pose::new(UnitQuat::from_axis_angle(axis, q[0]), Vec3::zeros()),
        JointKind::Prismatic => Pose::from_translation(axis * q[0]),
        JointKind::Fixed => Pose::IDENTITY,
    }
}

/// World pose of every link. The root link's pose is its free-joint
/// coordinates verbatim.
pub fn forward_kinematics(model: &ModelDef, state: &State) -> Result<Vec<Pose>, ModelError> {
    model.check_state(state)?;
    let layout = model.layout();
    let mut poses = Vec::with_capacity(model.links.len());
    for (i, link) in model.links.iter().enumerate() {
        let jl = layout.joints[i];
        let motion = joint_motion(
            link.joint.kind,
            &link.joint.axis,
            state.q.as_slice().get(jl.q..jl.q + jl.nq).unwrap_or(&[]),
        );
        let local = link.joint_pose.compose(&motion);
        let pose = match link.parent {
            None => local,
            Some(p) => poses[p].compose(&local),
        };
        poses.push(pose);
    }
    Ok(poses)
}

/// One generalized-velocity direction expressed as a world spatial motion
/// vector: angular part plus linear velocity of the point at the world
/// origin.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DofMotion {
    pub ang: Vec3,
    pub lin0: Vec3,
}

impl DofMotion {
    /// Linear velocity this dof induces at world point `p` (unit rate).
    pub fn velocity_at(&self, p: &Vec3) -> Vec3 {
        self.lin0 + self.ang.cross(p)
    }
}

/// World motion directions for every dof, plus the dof index paths from the
/// root to each link.
pub(crate) struct MotionBasis {
    pub dofs: Vec<DofMotion>,
    /// For each link, ascending dof indices on the root-to-link path.
    pub link_dofs: Vec<Vec<usize>>,
}

pub(crate) fn motion_basis(model: &ModelDef, state: &State, poses: &[Pose]) -> MotionBasis {
    let layout = model.layout();
    let mut dofs = vec![DofMotion { ang: Vec3::zeros(), lin0: Vec3::zeros() }; layout.v_dim];
    let mut link_dofs: Vec<Vec<usize>> = Vec::with_capacity(model.links.len());
    for (i, link) in model.links.iter().enumerate() {
        let jl = layout.joints[i];
        let mut path = match link.parent {
            None => Vec::new(),
            Some(p) => link_dofs[p].clone(),
        };
        match link.joint.kind {
            JointKind::Free => {
                let base_pos = Vec3::new(state.q[jl.q], state.q[jl.q + 1], state.q[jl.q + 2]);
                for k in 0..3 {
                    let mut e = Vec3::zeros();
                    e[k] = 1.0;
                    dofs[jl.v + k] = DofMotion { ang: Vec3::zeros(), lin0: e };
                }
                for k in 0..3 {
                    let mut e = Vec3::zeros();
                    e[k] = 1.0;
                    dofs[jl.v + 3 + k] = DofMotion { ang: e, lin0: base_pos.cross(&e) };
                }
            }
            JointKind::Revolute => {
                let axis_w = poses[i].transform_vector(&link.joint.axis);
                let origin = poses[i].pos;
                dofs[jl.v] = DofMotion { ang: axis_w, lin0: origin.cross(&axis_w) };
            }
            JointKind::Prismatic => {
                let axis_w = poses[i].transform_vector(&link.joint.axis);
                dofs[jl.v] = DofMotion { ang: Vec3::zeros(), lin0: axis_w };
            }
            JointKind::Fixed => {}
        }
        for k in 0..jl.nv {
            path.push(jl.v + k);
        }
        link_dofs.push(path);
    }
    MotionBasis { dofs, link_dofs }
}

/// 3 x n_v Jacobian mapping generalized velocities to the world-frame linear
/// velocity of the material point of `link` coinciding with `point` (world
/// frame). Columns for joints off the root-to-link path are zero.
pub fn point_jacobian(
    model: &ModelDef,
    state: &State,
    link: usize,
    point: &Vec3,
) -> Result<Matrix3xX<f64>, ModelError> {
    if link >= model.links.len() {
        return Err(ModelError::UnknownLink(format!("#{link}")));
    }
    let poses = forward_kinematics(model, state)?;
    let basis = motion_basis(model, state, &poses);
    let layout = model.layout();
    let mut jac = Matrix3xX::zeros(layout.v_dim);
    for &dof in &basis.link_dofs[link] {
        let col = basis.dofs[dof].velocity_at(point);
        jac.set_column(dof, &col.into());
    }
    Ok(jac)
}

/// Advances generalized positions along `v * dt` (quaternion via the exact
/// exponential map; no limit handling here).
pub fn advance_positions(model: &ModelDef, q: &DVector<f64>, v: &DVector<f64>, dt: f64) -> DVector<f64> {
    let layout = model.layout();
    let mut out = q.clone();
    for (i, link) in model.links.iter().enumerate() {
        let jl = layout.joints[i];
        match link.joint.kind {
            JointKind::Free => {
                for k in 0..3 {
                    out[jl.q + k] += v[jl.v + k] * dt;
                }
                let rot = UnitQuat::new(q[jl.q + 3], q[jl.q + 4], q[jl.q + 5], q[jl.q + 6]);
                let omega = Vec3::new(v[jl.v + 3], v[jl.v + 4], v[jl.v + 5]);
                let rot = rot.integrated(&omega, dt);
                out[jl.q + 3] = rot.w;
                out[jl.q + 4] = rot.x;
                out[jl.q + 5] = rot.y;
                out[jl.q + 6] = rot.z;
            }
            JointKind::Revolute | JointKind::Prismatic => {
                out[jl.q] += v[jl.v] * dt;
            }
            JointKind::Fixed => {}
        }
    }
    out
}
