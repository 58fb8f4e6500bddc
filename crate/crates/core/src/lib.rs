//! Mechanism analysis and harvest simulation for a five-finger rotary avocado gripper.
//!
//! A motor drives an internal ring gear that turns one pinion per finger. Each
//! finger is offset from its pinion center, so rotating the ring swings every
//! finger toward the gripper axis and closes the grasp. The crate covers:
//!
//! - [`model`]: cylinder fruit model, size envelope, viewpoints.
//! - [`mechanism`]: finger drive force, ABO triangle, total grasp moment, aperture.
//! - [`sizing`]: detachment budgets, motor sizing, detach timing, suction comparison.
//! - [`datasets`]: bench force and grasp trial tables, statistics, rotation predictor.
//! - [`harvest`]: the staging/attaching/grasping/detaching state machine and campaigns.
//!
//! All quantities are SI internally (m, kg, N, N·m, rad). Millimetres and degrees
//! appear only at file and CLI boundaries.

pub mod datasets;
pub mod error;
pub mod harvest;
pub mod mechanism;
pub mod model;
pub mod search;
pub mod sizing;

pub use error::{Error, Result};

/// Standard atmospheric pressure [Pa].
pub const STANDARD_ATMOSPHERE_PA: f64 = 101_325.0;

/// Manufacturer default wrist angular speed of the arm used in the grasp trials [rad/s].
pub const DEFAULT_WRIST_SPEED: f64 = 0.326;
