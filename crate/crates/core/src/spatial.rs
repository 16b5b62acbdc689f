//! Spatial algebra primitives: vectors, unit quaternions, rigid transforms,
//! twists, wrenches, and spatial inertias.
//!
//! Conventions used throughout the crate:
//! * `Twist` carries the angular velocity and the linear velocity of the
//!   body-fixed point currently at the reference frame's origin.
//! * `Wrench` carries a torque about the reference frame's origin and a force.
//! * `SpatialInertia` stores mass, center of mass, and rotational inertia
//!   about the center of mass, all expressed in the carrying frame.
//!
//! All units are SI; millimeters appear only in the reporting layer.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Skew-symmetric cross-product matrix: `skew(a) * b == a.cross(b)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Unit quaternion with the scalar part canonicalized to `w >= 0`, so equal
/// rotations compare equal and logged values are reproducible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds a unit quaternion from raw components, renormalizing when the
    /// norm has drifted beyond 1e-12 and canonicalizing the sign.
    ///
    /// Keeping already-unit inputs bit-identical matters: serialized models
    /// round-trip exactly.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> UnitQuat {
        let n2 = w * w + x * x + y * y + z * z;
        assert!(n2.is_finite() && n2 > 0.0, "quaternion norm must be positive and finite");
        let q = if (n2 - 1.0).abs() > 1e-12 {
            let inv = 1.0 / n2.sqrt();
            UnitQuat { w: w * inv, x: x * inv, y: y * inv, z: z * inv }
        } else {
            UnitQuat { w, x, y, z }
        };
        q.canonicalized()
    }

    fn canonicalized(self) -> UnitQuat {
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else if self.x != 0.0 {
            self.x < 0.0
        } else if self.y != 0.0 {
            self.y < 0.0
        } else {
            self.z < 0.0
        };
        if flip {
            UnitQuat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
        } else {
            self
        }
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> UnitQuat {
        let n = axis.norm();
        assert!(n > 0.0, "rotation axis must be nonzero");
        let half = 0.5 * angle;
        let s = half.sin() / n;
        UnitQuat::new(half.cos(), axis.x * s, axis.y * s, axis.z * s)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Hamilton product; `self * rhs` applies `rhs` first.
    pub fn compose(&self, rhs: &UnitQuat) -> UnitQuat {
        let (aw, ax, ay, az) = (self.w, self.x, self.y, self.z);
        let (bw, bx, by, bz) = (rhs.w, rhs.x, rhs.y, rhs.z);
        UnitQuat::new(
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        )
    }

    pub fn inverse(&self) -> UnitQuat {
        UnitQuat { w: self.w, x: -self.x, y: -self.y, z: -self.z }.canonicalized()
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        // v' = v + 2 q_v x (q_v x v + w v)
        let qv = Vec3::new(self.x, self.y, self.z);
        let t = qv.cross(&(qv.cross(v) + self.w * v));
        v + 2.0 * t
    }

    pub fn to_matrix(&self) -> Mat3 {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// Exact exponential-map step: rotate by `omega * dt` (world-frame rate)
    /// composed onto `self`. `omega == 0` returns `self` unchanged.
    pub fn integrated(&self, omega: &Vec3, dt: f64) -> UnitQuat {
        let n = omega.norm();
        if n == 0.0 {
            return *self;
        }
        UnitQuat::from_axis_angle(omega, n * dt).compose(self)
    }

    /// Rotation angle in radians between two orientations.
    pub fn angle_to(&self, other: &UnitQuat) -> f64 {
        let d = self.inverse().compose(other);
        2.0 * d.w.clamp(-1.0, 1.0).acos()
    }
}

/// Integrates an orientation by a world-frame angular velocity over `dt`
/// using the exact axis-angle step.
pub fn integrate_orientation(q: &UnitQuat, omega: &Vec3, dt: f64) -> UnitQuat {
    q.integrated(omega, dt)
}

/// Rigid transform: rotation followed by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rot: UnitQuat,
    pub pos: Vec3,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { rot: UnitQuat::IDENTITY, pos: Vec3::new(0.0, 0.0, 0.0) };

    pub fn new(rot: UnitQuat, pos: Vec3) -> Pose {
        Pose { rot, pos }
    }

    pub fn from_translation(pos: Vec3) -> Pose {
        Pose { rot: UnitQuat::IDENTITY, pos }
    }

    /// `self.compose(b)` applies `b` first, then `self`.
    pub fn compose(&self, b: &Pose) -> Pose {
        Pose { rot: self.rot.compose(&b.rot), pos: self.pos + self.rot.rotate(&b.pos) }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rot.inverse();
        Pose { rot: inv, pos: -inv.rotate(&self.pos) }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.pos + self.rot.rotate(p)
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.rot.rotate(v)
    }
}

/// Spatial velocity: angular rate plus linear velocity of the body point at
/// the reference origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub ang: Vec3,
    pub lin: Vec3,
}

impl Twist {
    pub const ZERO: Twist = Twist { ang: Vec3::new(0.0, 0.0, 0.0), lin: Vec3::new(0.0, 0.0, 0.0) };

    pub fn new(ang: Vec3, lin: Vec3) -> Twist {
        Twist { ang, lin }
    }

    /// Re-expresses the twist in the frame `x` maps into: given this twist in
    /// frame B and `x` = pose of B in A, returns the twist in A (referenced
    /// at A's origin).
    pub fn transformed(&self, x: &Pose) -> Twist {
        let ang = x.rot.rotate(&self.ang);
        let lin = x.rot.rotate(&self.lin) + x.pos.cross(&ang);
        Twist { ang, lin }
    }

    /// Linear velocity of the body-fixed point currently at `p`.
    pub fn velocity_at(&self, p: &Vec3) -> Vec3 {
        self.lin + self.ang.cross(p)
    }

    /// Motion cross product: `self x other`.
    pub fn cross_motion(&self, other: &Twist) -> Twist {
        Twist {
            ang: self.ang.cross(&other.ang),
            lin: self.ang.cross(&other.lin) + self.lin.cross(&other.ang),
        }
    }

    /// Force cross product: `self x* f`.
    pub fn cross_force(&self, f: &Wrench) -> Wrench {
        Wrench {
            torque: self.ang.cross(&f.torque) + self.lin.cross(&f.force),
            force: self.ang.cross(&f.force),
        }
    }
}

/// Spatial force: torque about the reference origin plus a force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wrench {
    pub torque: Vec3,
    pub force: Vec3,
}

impl Wrench {
    pub const ZERO: Wrench =
        Wrench { torque: Vec3::new(0.0, 0.0, 0.0), force: Vec3::new(0.0, 0.0, 0.0) };

    pub fn new(torque: Vec3, force: Vec3) -> Wrench {
        Wrench { torque, force }
    }

    /// Wrench of a pure force acting at point `p`.
    pub fn from_force_at(force: Vec3, p: &Vec3) -> Wrench {
        Wrench { torque: p.cross(&force), force }
    }

    /// Same frame-change convention as [`Twist::transformed`].
    pub fn transformed(&self, x: &Pose) -> Wrench {
        let force = x.rot.rotate(&self.force);
        let torque = x.rot.rotate(&self.torque) + x.pos.cross(&force);
        Wrench { torque, force }
    }
}

/// Power pairing `<wrench, twist>`; invariant under simultaneous frame change.
pub fn power(w: &Wrench, t: &Twist) -> f64 {
    w.torque.dot(&t.ang) + w.force.dot(&t.lin)
}

/// Rigid-body inertia: mass, center of mass, and rotational inertia about the
/// center of mass, expressed in the carrying frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialInertia {
    pub mass: f64,
    pub com: Vec3,
    pub rot_inertia: Mat3,
}

impl SpatialInertia {
    pub fn new(mass: f64, com: Vec3, rot_inertia: Mat3) -> SpatialInertia {
        SpatialInertia { mass, com, rot_inertia }
    }

    /// Point mass convenience (zero rotational inertia about the COM).
    pub fn point_mass(mass: f64, com: Vec3) -> SpatialInertia {
        SpatialInertia { mass, com, rot_inertia: Mat3::zeros() }
    }

    /// Re-expresses the inertia in the frame `x` maps into.
    pub fn transformed(&self, x: &Pose) -> SpatialInertia {
        let r = x.rot.to_matrix();
        SpatialInertia {
            mass: self.mass,
            com: x.transform_point(&self.com),
            rot_inertia: r * self.rot_inertia * r.transpose(),
        }
    }

    /// Rotational inertia about an arbitrary point (parallel-axis shift).
    pub fn rot_inertia_about(&self, p: &Vec3) -> Mat3 {
        let d = self.com - p;
        self.rot_inertia + self.mass * (d.norm_squared() * Mat3::identity() - d * d.transpose())
    }

    /// Kinetic energy of a body with this inertia moving with `t`; the twist
    /// must be referenced at this inertia's frame origin.
    pub fn kinetic_energy(&self, t: &Twist) -> f64 {
        let v_com = t.lin + t.ang.cross(&self.com);
        0.5 * self.mass * v_com.norm_squared() + 0.5 * t.ang.dot(&(self.rot_inertia * t.ang))
    }

    /// Momentum of a body moving with `t`: linear part plus angular momentum
    /// about the reference origin.
    pub fn momentum(&self, t: &Twist) -> Wrench {
        let v_com = t.lin + t.ang.cross(&self.com);
        let lin = self.mass * v_com;
        let ang = self.rot_inertia * t.ang + self.com.cross(&lin);
        Wrench { torque: ang, force: lin }
    }

    /// True when the rotational inertia is symmetric positive definite.
    pub fn is_valid(&self) -> bool {
        if !(self.mass > 0.0) || !self.com.iter().all(|c| c.is_finite()) {
            return false;
        }
        let i = &self.rot_inertia;
        if !i.iter().all(|c| c.is_finite()) {
            return false;
        }
        let sym = (i - i.transpose()).norm() <= 1e-9 * i.norm().max(1.0);
        sym && i.clone_owned().cholesky().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
        Vec3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    fn rand_quat(rng: &mut ChaCha8Rng) -> UnitQuat {
        let axis = loop {
            let a = rand_vec(rng, 1.0);
            if a.norm() > 1e-3 {
                break a;
            }
        };
        UnitQuat::from_axis_angle(&axis, rng.gen_range(-3.0..3.0))
    }

    fn rand_pose(rng: &mut ChaCha8Rng) -> Pose {
        Pose::new(rand_quat(rng), rand_vec(rng, 2.0))
    }

    /// Sign-insensitive component distance between two quaternions.
    fn quat_dist(a: &UnitQuat, b: &UnitQuat) -> f64 {
        let d = ((a.w - b.w).powi(2) + (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
            + (a.z - b.z).powi(2))
        .sqrt();
        let s = ((a.w + b.w).powi(2) + (a.x + b.x).powi(2) + (a.y + b.y).powi(2)
            + (a.z + b.z).powi(2))
        .sqrt();
        d.min(s)
    }

    fn rand_inertia(rng: &mut ChaCha8Rng) -> SpatialInertia {
        let d = Vec3::new(
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.1..2.0),
        );
        let q = rand_quat(rng).to_matrix();
        let i = q * Mat3::from_diagonal(&d) * q.transpose();
        // Symmetrize exactly so Cholesky-based checks are stable.
        let i = 0.5 * (i + i.transpose());
        SpatialInertia::new(rng.gen_range(0.5..20.0), rand_vec(rng, 0.5), i)
    }

    #[test]
    fn compose_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = rand_pose(&mut rng);
        assert_eq!(Pose::IDENTITY.compose(&p), p);
    }

    #[test]
    fn compose_quarter_turn() {
        let rz = Pose::new(
            UnitQuat::from_axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2),
            Vec3::zeros(),
        );
        let t = Pose::from_translation(Vec3::new(1.0, 0.0, 0.0));
        let c = rz.compose(&t);
        assert_relative_eq!(c.pos, Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
        assert_eq!(c.rot, rz.rot);
    }

    #[test]
    fn compose_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = rand_pose(&mut rng);
            let i = p.compose(&p.inverse());
            assert!(i.pos.norm() <= 1e-12);
            assert!(quat_dist(&i.rot, &UnitQuat::IDENTITY) <= 1e-12);
        }
    }

    #[test]
    fn pose_group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (a, b, c) = (rand_pose(&mut rng), rand_pose(&mut rng), rand_pose(&mut rng));
            let ab_c = a.compose(&b).compose(&c);
            let a_bc = a.compose(&b.compose(&c));
            assert!((ab_c.pos - a_bc.pos).norm() <= 1e-12);
            assert!(quat_dist(&ab_c.rot, &a_bc.rot) <= 1e-12);
        }
    }

    #[test]
    fn integrate_zero_rate_is_exact() {
        let q = UnitQuat::from_axis_angle(&Vec3::new(1.0, 2.0, 3.0), 0.7);
        assert_eq!(integrate_orientation(&q, &Vec3::zeros(), 0.5), q);
    }

    #[test]
    fn integrate_matches_axis_angle() {
        let q = integrate_orientation(
            &UnitQuat::IDENTITY,
            &Vec3::new(0.0, 0.0, std::f64::consts::PI),
            0.5,
        );
        let expect = UnitQuat::from_axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert!(q.angle_to(&expect) <= 1e-6);
    }

    #[test]
    fn repeated_integration_stays_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut q = UnitQuat::IDENTITY;
        for _ in 0..1000 {
            let w = rand_vec(&mut rng, 5.0);
            q = integrate_orientation(&q, &w, 1e-2);
        }
        assert!((q.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn quaternion_canonical_sign() {
        let q = UnitQuat::new(-0.5, 0.5, 0.5, 0.5);
        assert!(q.w >= 0.0);
        let flipped = UnitQuat::new(0.5, -0.5, -0.5, -0.5);
        assert_eq!(q.compose(&q.inverse()), UnitQuat::IDENTITY);
        assert_eq!(q, UnitQuat { w: 0.5, x: -0.5, y: -0.5, z: -0.5 });
        assert_eq!(flipped, q);
    }

    #[test]
    fn power_pairing_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let w = Wrench::new(rand_vec(&mut rng, 3.0), rand_vec(&mut rng, 3.0));
            let t = Twist::new(rand_vec(&mut rng, 3.0), rand_vec(&mut rng, 3.0));
            let x = rand_pose(&mut rng);
            let before = power(&w, &t);
            let after = power(&w.transformed(&x), &t.transformed(&x));
            assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
        }
    }

    #[test]
    fn twist_transform_matches_finite_difference() {
        // Move a frame along a twist and check that transformed point
        // velocities match differenced positions.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let x = rand_pose(&mut rng);
            let t_local = Twist::new(rand_vec(&mut rng, 2.0), rand_vec(&mut rng, 2.0));
            let t_world = t_local.transformed(&x);
            let p_local = rand_vec(&mut rng, 1.0);
            let h = 1e-7;
            // Body motion over h expressed in the local frame.
            let dq = if t_local.ang.norm() > 0.0 {
                UnitQuat::from_axis_angle(&t_local.ang, t_local.ang.norm() * h)
            } else {
                UnitQuat::IDENTITY
            };
            let moved = Pose::new(dq, t_local.lin * h).compose(&Pose::from_translation(p_local));
            let before = x.transform_point(&p_local);
            let after = x.transform_point(&moved.pos);
            let fd = (after - before) / h;
            let analytic = t_world.velocity_at(&before);
            assert!((fd - analytic).norm() <= 1e-5 * analytic.norm().max(1.0));
        }
    }

    #[test]
    fn inertia_identity_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let i = rand_inertia(&mut rng);
        assert_eq!(i.transformed(&Pose::IDENTITY), i);
    }

    #[test]
    fn inertia_parallel_axis_oracle() {
        // Translating a body by r shifts its origin-referenced rotational
        // inertia by the parallel-axis term m (|r|^2 I - r r^T).
        let m = 2.5;
        let i = SpatialInertia::point_mass(m, Vec3::zeros());
        let r = Vec3::new(0.3, -0.2, 0.7);
        let moved = i.transformed(&Pose::from_translation(r));
        let gain = moved.rot_inertia_about(&Vec3::zeros()) - i.rot_inertia_about(&Vec3::zeros());
        let expect = m * (r.norm_squared() * Mat3::identity() - r * r.transpose());
        assert_relative_eq!(gain, expect, epsilon = 1e-12);
    }

    #[test]
    fn inertia_energy_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let i = rand_inertia(&mut rng);
            let x = rand_pose(&mut rng);
            let t = Twist::new(rand_vec(&mut rng, 2.0), rand_vec(&mut rng, 2.0));
            let before = i.kinetic_energy(&t);
            let after = i.transformed(&x).kinetic_energy(&t.transformed(&x));
            assert!((before - after).abs() <= 1e-10 * before.abs().max(1.0));
        }
    }

    #[test]
    fn momentum_transform_consistency() {
        // Momentum computed in a transformed frame equals the transformed
        // momentum wrench.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let i = rand_inertia(&mut rng);
            let x = rand_pose(&mut rng);
            let t = Twist::new(rand_vec(&mut rng, 2.0), rand_vec(&mut rng, 2.0));
            let h_local = i.momentum(&t).transformed(&x);
            let h_world = i.transformed(&x).momentum(&t.transformed(&x));
            assert!((h_local.force - h_world.force).norm() <= 1e-10);
            assert!((h_local.torque - h_world.torque).norm() <= 1e-10);
        }
    }
}
