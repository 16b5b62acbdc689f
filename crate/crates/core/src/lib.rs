//! Deterministic free-floating-base multibody simulator.

pub mod spatial;

pub use spatial::{Mat3, Pose, SpatialInertia, Twist, UnitQuat, Vec3, Wrench};

/// Engine version stamped into trajectory logs.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
