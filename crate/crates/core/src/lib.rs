//! Augmented unit quaternions for rigid-motion algebra, kinematic control
//! and sphere-constrained least squares.

pub mod augmented;
pub mod cli;
pub mod dual;
pub mod error;
pub mod generate;
pub mod io;
pub mod kinematics;
pub mod motion;
pub mod optim;
pub mod quaternion;

pub type Vector3 = nalgebra::Vector3<f64>;
pub type Matrix3 = nalgebra::Matrix3<f64>;
pub type Matrix4 = nalgebra::Matrix4<f64>;

/// Absolute tolerance for algebraic identities.
pub const TOLERANCE: f64 = 1e-12;
