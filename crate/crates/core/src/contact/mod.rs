//! Collision detection against the fixed handrail plus gripper self-pairs,
//! and the per-step velocity-level contact solve with Coulomb friction.

mod detect;
mod solve;

pub use detect::detect_contacts;
pub use solve::{contact_regularization, solve_contacts, SolveOutput};

use crate::spatial::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContactError {
    #[error("unsupported shape pair: {a} vs {b}")]
    UnsupportedShapePair { a: &'static str, b: &'static str },
    #[error("state dimensions do not match model")]
    DimensionMismatch,
}

/// Surface material; contact parameters combine pairwise at detection time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    /// Normal contact stiffness (N/m); feeds the solver regularization.
    pub stiffness: f64,
    /// Normal contact damping (N·s/m).
    pub damping: f64,
    /// Coulomb friction coefficient.
    pub friction: f64,
}

impl Material {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.stiffness > 0.0) || !self.stiffness.is_finite() {
            return Err("material stiffness must be positive".into());
        }
        if !(self.damping >= 0.0) || !self.damping.is_finite() {
            return Err("material damping must be nonnegative".into());
        }
        if !(self.friction >= 0.0) || !self.friction.is_finite() {
            return Err("material friction must be nonnegative".into());
        }
        Ok(())
    }

    /// Pairwise combination: springs in series, dampers in series, geometric
    /// mean friction.
    pub fn combine(&self, other: &Material) -> Material {
        let stiffness = (self.stiffness * other.stiffness) / (self.stiffness + other.stiffness);
        let damping = if self.damping > 0.0 && other.damping > 0.0 {
            (self.damping * other.damping) / (self.damping + other.damping)
        } else {
            self.damping.max(other.damping)
        };
        Material { stiffness, damping, friction: (self.friction * other.friction).sqrt() }
    }
}

/// A detected contact between a link geom and either a world geom or another
/// link geom.
#[derive(Clone, Copy, Debug)]
pub struct ContactPoint {
    /// Contact location, world frame (midway through the overlap).
    pub position: Vec3,
    /// Unit normal, pointing from the paired geom toward `link`.
    pub normal: Vec3,
    /// Penetration depth (m), nonnegative.
    pub depth: f64,
    /// Link carrying the first geom.
    pub link: usize,
    /// Geom index on `link`.
    pub geom: usize,
    /// Paired side: `None` for a world (static) geom, `Some(link)` otherwise.
    pub other_link: Option<usize>,
    /// Combined material of the pair.
    pub material: Material,
}

/// Solved impulse for one contact, expressed in its orthonormal basis.
#[derive(Clone, Copy, Debug)]
pub struct ContactImpulse {
    /// Normal impulse (N·s), nonnegative.
    pub normal: f64,
    /// Tangential impulse components along `t1`, `t2` (N·s).
    pub tangent: [f64; 2],
    /// Orthonormal contact basis (n, t1, t2).
    pub basis: [Vec3; 3],
}

impl ContactImpulse {
    /// World-frame impulse vector.
    pub fn world(&self) -> Vec3 {
        self.basis[0] * self.normal
            + self.basis[1] * self.tangent[0]
            + self.basis[2] * self.tangent[1]
    }
}

/// Contact solver configuration.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Convergence tolerance on the largest impulse change (N·s).
    pub tolerance: f64,
    /// Baumgarte stabilization factor in [0, 1].
    pub baumgarte: f64,
    /// Derive per-contact regularization from the gripper contact compliance.
    pub compliance_regularization: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 50,
            tolerance: 1e-8,
            baumgarte: 0.2,
            compliance_regularization: true,
        }
    }
}

/// Per-step solver diagnostics.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// Largest complementarity residual over contacts at exit.
    pub max_residual: f64,
    pub converged: bool,
}
