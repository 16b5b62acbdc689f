//! Kinematic-tree model definition, model-file parsing, forward kinematics,
//! and contact Jacobians, plus the two built-in gripper models.

mod builders;
mod kinematics;
mod parse;

pub use builders::{build_astrobee_claw, build_astrobee_dexcohand, builtin_model, BUILTIN_MODEL_IDS};
pub use kinematics::{advance_positions, forward_kinematics, point_jacobian};
pub(crate) use kinematics::{motion_basis, DofMotion, MotionBasis};
pub use parse::{parse_model, serialize_model};

use crate::contact::Material;
use crate::spatial::{Pose, SpatialInertia, UnitQuat, Vec3};
use nalgebra::DVector;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
    #[error("state dimensions do not match model (expected q={expected_q}, v={expected_v})")]
    DimensionMismatch { expected_q: usize, expected_v: usize },
    #[error("unknown link `{0}`")]
    UnknownLink(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointKind {
    Free,
    Revolute,
    Prismatic,
    Fixed,
}

impl JointKind {
    pub fn nq(&self) -> usize {
        match self {
            JointKind::Free => 7,
            JointKind::Revolute | JointKind::Prismatic => 1,
            JointKind::Fixed => 0,
        }
    }

    pub fn nv(&self) -> usize {
        match self {
            JointKind::Free => 6,
            JointKind::Revolute | JointKind::Prismatic => 1,
            JointKind::Fixed => 0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            JointKind::Free => "free",
            JointKind::Revolute => "revolute",
            JointKind::Prismatic => "prismatic",
            JointKind::Fixed => "fixed",
        }
    }
}

/// Membership of a joint in an underactuation coupling group: one actuator
/// command drives every member joint, scaled by `ratio`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub group: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointDef {
    pub name: String,
    pub kind: JointKind,
    /// Joint axis in the child link frame (revolute/prismatic).
    pub axis: Vec3,
    /// Position limits (rad or m).
    pub limits: Option<(f64, f64)>,
    /// Passive damping, folded implicitly into the velocity update.
    pub damping: f64,
    pub actuated: bool,
    /// Servo spring gain toward the commanded target (actuated joints).
    pub stiffness: f64,
    /// Servo damping on the joint rate (actuated joints).
    pub servo_damping: f64,
    /// Servo torque saturation.
    pub tau_max: f64,
    pub coupling: Option<Coupling>,
    /// `(open, closed)` command targets used by scenario `gripper` commands.
    pub grip: Option<(f64, f64)>,
}

impl JointDef {
    pub fn new(name: &str, kind: JointKind) -> JointDef {
        JointDef {
            name: name.to_string(),
            kind,
            axis: Vec3::z(),
            limits: None,
            damping: 0.0,
            actuated: false,
            stiffness: 0.0,
            servo_damping: 0.0,
            tau_max: DEFAULT_TAU_MAX,
            coupling: None,
            grip: None,
        }
    }

    pub fn revolute(name: &str, axis: Vec3) -> JointDef {
        JointDef { axis, ..JointDef::new(name, JointKind::Revolute) }
    }
}

/// Default servo saturation for actuated joints that do not specify one.
pub const DEFAULT_TAU_MAX: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Sphere { r: f64 },
    /// Axis along local z.
    Capsule { r: f64, half_len: f64 },
    /// Axis along local z; curved surface only participates in contact.
    Cylinder { r: f64, half_len: f64 },
    Box { hx: f64, hy: f64, hz: f64 },
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Sphere { .. } => "sphere",
            Shape::Capsule { .. } => "capsule",
            Shape::Cylinder { .. } => "cylinder",
            Shape::Box { .. } => "box",
        }
    }

    pub fn sizes_positive(&self) -> bool {
        match *self {
            Shape::Sphere { r } => r > 0.0,
            Shape::Capsule { r, half_len } | Shape::Cylinder { r, half_len } => {
                r > 0.0 && half_len > 0.0
            }
            Shape::Box { hx, hy, hz } => hx > 0.0 && hy > 0.0 && hz > 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeomDef {
    pub shape: Shape,
    pub local_pose: Pose,
    /// Name into the model's material table.
    pub material: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkDef {
    pub name: String,
    /// Parent link index; `None` for the root (world-attached free base).
    pub parent: Option<usize>,
    pub joint: JointDef,
    /// Pose of the joint frame in the parent frame.
    pub joint_pose: Pose,
    /// Inertia in the link frame.
    pub inertia: SpatialInertia,
    pub geoms: Vec<GeomDef>,
}

/// A validated kinematic tree plus world-fixed collision geometry.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelDef {
    pub links: Vec<LinkDef>,
    pub materials: BTreeMap<String, Material>,
    pub static_geoms: Vec<GeomDef>,
}

/// Per-link coordinate offsets into `State::q` / `State::v`.
#[derive(Clone, Copy, Debug)]
pub struct JointLayout {
    pub q: usize,
    pub nq: usize,
    pub v: usize,
    pub nv: usize,
}

#[derive(Clone, Debug)]
pub struct ModelLayout {
    pub q_dim: usize,
    pub v_dim: usize,
    pub joints: Vec<JointLayout>,
}

impl ModelDef {
    pub fn layout(&self) -> ModelLayout {
        let mut joints = Vec::with_capacity(self.links.len());
        let (mut q, mut v) = (0usize, 0usize);
        for link in &self.links {
            let (nq, nv) = (link.joint.kind.nq(), link.joint.kind.nv());
            joints.push(JointLayout { q, nq, v, nv });
            q += nq;
            v += nv;
        }
        ModelLayout { q_dim: q, v_dim: v, joints }
    }

    pub fn link_index(&self, name: &str) -> Option<usize> {
        self.links.iter().position(|l| l.name == name)
    }

    pub fn joint_index(&self, joint_name: &str) -> Option<usize> {
        self.links.iter().position(|l| l.joint.name == joint_name)
    }

    /// Total mass of all links.
    pub fn total_mass(&self) -> f64 {
        self.links.iter().map(|l| l.inertia.mass).sum()
    }

    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.get(name)
    }

    /// Checks every structural invariant; parse and the builders both funnel
    /// through here.
    pub fn validate(&self) -> Result<(), ModelError> {
        let semantic = |msg: String| Err(ModelError::Semantic(msg));
        if self.links.is_empty() {
            return semantic("model has no links".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for link in &self.links {
            if !seen.insert(link.name.as_str()) {
                return semantic(format!("duplicate link name `{}`", link.name));
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            match link.parent {
                None => {
                    if i != 0 {
                        return semantic(format!(
                            "link `{}` has no parent but is not the first link",
                            link.name
                        ));
                    }
                }
                Some(p) => {
                    if p >= i {
                        return semantic(format!(
                            "link `{}` parent index {} is not earlier in the tree",
                            link.name, p
                        ));
                    }
                }
            }
            let j = &link.joint;
            match j.kind {
                JointKind::Free => {
                    if i != 0 {
                        return semantic(format!(
                            "free joint `{}` must be the root link",
                            j.name
                        ));
                    }
                    if link.joint_pose != Pose::IDENTITY {
                        return semantic(
                            "the free base joint must have an identity joint pose".into(),
                        );
                    }
                    if j.damping != 0.0 {
                        return semantic("the free base joint cannot carry damping".into());
                    }
                }
                JointKind::Revolute | JointKind::Prismatic => {
                    if (j.axis.norm() - 1.0).abs() > 1e-9 {
                        return semantic(format!("joint `{}` axis is not unit length", j.name));
                    }
                }
                JointKind::Fixed => {}
            }
            if i == 0 && j.kind != JointKind::Free {
                return semantic("the root link must carry the free joint".into());
            }
            if let Some((lo, hi)) = j.limits {
                if !(lo <= hi) {
                    return semantic(format!("joint `{}` limits are reversed", j.name));
                }
                if let Some((open, closed)) = j.grip {
                    if open < lo || open > hi || closed < lo || closed > hi {
                        return semantic(format!(
                            "joint `{}` grip targets fall outside its limits",
                            j.name
                        ));
                    }
                }
            }
            if !(j.damping >= 0.0) {
                return semantic(format!("joint `{}` damping must be nonnegative", j.name));
            }
            if j.actuated {
                if !(j.stiffness > 0.0) {
                    return semantic(format!(
                        "actuated joint `{}` needs a positive stiffness",
                        j.name
                    ));
                }
                if !(j.tau_max > 0.0) {
                    return semantic(format!(
                        "actuated joint `{}` needs a positive torque limit",
                        j.name
                    ));
                }
            }
            if let Some(c) = &j.coupling {
                if !j.actuated {
                    return semantic(format!(
                        "coupled joint `{}` must be marked actuated",
                        j.name
                    ));
                }
                if c.ratio == 0.0 || !c.ratio.is_finite() {
                    return semantic(format!(
                        "coupled joint `{}` has an invalid ratio",
                        j.name
                    ));
                }
            }
            if !(link.inertia.mass > 0.0) {
                return semantic(format!("link `{}` mass must be positive", link.name));
            }
            if !link.inertia.is_valid() {
                return semantic(format!(
                    "link `{}` rotational inertia is not symmetric positive definite",
                    link.name
                ));
            }
            for g in &link.geoms {
                self.validate_geom(g, &link.name)?;
            }
        }
        let free_count =
            self.links.iter().filter(|l| l.joint.kind == JointKind::Free).count();
        if free_count != 1 {
            return semantic(format!("model must have exactly one free joint, found {free_count}"));
        }
        for g in &self.static_geoms {
            self.validate_geom(g, "world")?;
        }
        for (name, m) in &self.materials {
            m.validate().map_err(|e| ModelError::Semantic(format!("material `{name}`: {e}")))?;
        }
        let mut duplicate_joint = std::collections::BTreeSet::new();
        for link in &self.links {
            if !duplicate_joint.insert(link.joint.name.as_str()) {
                return semantic(format!("duplicate joint name `{}`", link.joint.name));
            }
        }
        Ok(())
    }

    fn validate_geom(&self, g: &GeomDef, owner: &str) -> Result<(), ModelError> {
        if !g.shape.sizes_positive() {
            return Err(ModelError::Semantic(format!(
                "geom on `{owner}` has nonpositive sizes"
            )));
        }
        if !self.materials.contains_key(&g.material) {
            return Err(ModelError::Semantic(format!(
                "geom on `{owner}` references unknown material `{}`",
                g.material
            )));
        }
        Ok(())
    }

    /// Neutral state: base at the origin, all joints at zero (clamped into
    /// limits), zero velocity.
    pub fn neutral_state(&self) -> State {
        let layout = self.layout();
        let mut q = DVector::zeros(layout.q_dim);
        for (i, link) in self.links.iter().enumerate() {
            let jl = layout.joints[i];
            match link.joint.kind {
                JointKind::Free => {
                    q[jl.q + 3] = 1.0; // identity quaternion (w, x, y, z)
                }
                JointKind::Revolute | JointKind::Prismatic => {
                    if let Some((lo, hi)) = link.joint.limits {
                        q[jl.q] = 0.0f64.clamp(lo, hi);
                    }
                }
                JointKind::Fixed => {}
            }
        }
        State { q, v: DVector::zeros(layout.v_dim), t: 0.0 }
    }

    pub fn check_state(&self, state: &State) -> Result<(), ModelError> {
        let layout = self.layout();
        if state.q.len() != layout.q_dim || state.v.len() != layout.v_dim {
            return Err(ModelError::DimensionMismatch {
                expected_q: layout.q_dim,
                expected_v: layout.v_dim,
            });
        }
        Ok(())
    }
}

/// One joint driven by an actuator, scaled by the coupling ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct ActuatorJoint {
    pub link: usize,
    pub ratio: f64,
}

/// An independent command channel: a solo actuated joint or a coupling group.
#[derive(Clone, Debug, PartialEq)]
pub struct ActuatorDef {
    pub name: String,
    pub joints: Vec<ActuatorJoint>,
}

impl ModelDef {
    /// Command channels in deterministic order: solo actuated joints appear
    /// under their joint name, coupling groups under the group name at the
    /// first member's position.
    pub fn actuators(&self) -> Vec<ActuatorDef> {
        let mut out: Vec<ActuatorDef> = Vec::new();
        for (i, link) in self.links.iter().enumerate() {
            if !link.joint.actuated {
                continue;
            }
            match &link.joint.coupling {
                None => out.push(ActuatorDef {
                    name: link.joint.name.clone(),
                    joints: vec![ActuatorJoint { link: i, ratio: 1.0 }],
                }),
                Some(c) => {
                    if let Some(existing) = out.iter_mut().find(|a| a.name == c.group) {
                        existing.joints.push(ActuatorJoint { link: i, ratio: c.ratio });
                    } else {
                        out.push(ActuatorDef {
                            name: c.group.clone(),
                            joints: vec![ActuatorJoint { link: i, ratio: c.ratio }],
                        });
                    }
                }
            }
        }
        out
    }
}

/// Generalized coordinates and velocities.
///
/// The free base contributes 7 position scalars (translation, then unit
/// quaternion w,x,y,z) and 6 velocity scalars (world-frame linear velocity of
/// the base origin, then world-frame angular velocity). Each revolute or
/// prismatic joint contributes one of each.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub q: DVector<f64>,
    pub v: DVector<f64>,
    pub t: f64,
}

impl State {
    /// Base pose read from the leading free-joint coordinates.
    pub fn base_pose(&self) -> Pose {
        Pose::new(
            UnitQuat::new(self.q[3], self.q[4], self.q[5], self.q[6]),
            Vec3::new(self.q[0], self.q[1], self.q[2]),
        )
    }

    pub fn base_lin_vel(&self) -> Vec3 {
        Vec3::new(self.v[0], self.v[1], self.v[2])
    }

    pub fn base_ang_vel(&self) -> Vec3 {
        Vec3::new(self.v[3], self.v[4], self.v[5])
    }
}
