//! Six-dimensional motions `[r, t]` (rotation vector, translation) and the
//! discontinuities of their rotation operator and composition.
//!
//! Motions are lifted to augmented unit quaternions by `r ↦ exp(r/2)`,
//! composed there, and projected back with
//! `q ↦ (2 arccos q0 / ‖q⃗‖) q⃗` (zero when `q0² = 1`). The projection wraps
//! at `q0 = −1`: rotation vectors approaching norm 2π collapse to zero.

use std::f64::consts::{PI, TAU};

use crate::augmented::AugmentedUnitQuaternion;
use crate::error::AlgebraError;
use crate::quaternion::{qexp, UnitQuaternion, VectorQuaternion};
use crate::Vector3;

/// `|q0² − 1|` at or below which the projection takes its zero branch.
pub const ZERO_BRANCH_TOL: f64 = 1e-14;

/// A motion `[r, t]` with `‖r‖ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Motion {
    r: Vector3,
    t: Vector3,
}

impl Motion {
    pub fn new(r: Vector3, t: Vector3) -> Result<Self, AlgebraError> {
        let norm = r.norm();
        if !(norm.is_finite() && norm < TAU) {
            return Err(AlgebraError::OutOfRange { norm });
        }
        Ok(Self { r, t })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn rotation(&self) -> Vector3 {
        self.r
    }

    pub fn translation(&self) -> Vector3 {
        self.t
    }

    pub fn to_auq(&self) -> AugmentedUnitQuaternion {
        AugmentedUnitQuaternion::new(lift(&self.r), self.t)
    }

    pub fn from_auq(x: &AugmentedUnitQuaternion) -> Self {
        Self {
            r: rotvec_from_quat(&x.rotation()),
            t: x.translation(),
        }
    }
}

/// The rotation operator `(2 arccos(q0) / ‖q⃗‖) q⃗`, or zero when `q0² = 1`.
pub fn rotvec_from_quat(q: &UnitQuaternion) -> Vector3 {
    let q0 = q.q0;
    if (q0 * q0 - 1.0).abs() <= ZERO_BRANCH_TOL {
        return Vector3::zeros();
    }
    let angle = 2.0 * q0.clamp(-1.0, 1.0).acos();
    q.qv * (angle / q.qv.norm())
}

fn lift(r: &Vector3) -> UnitQuaternion {
    qexp(&VectorQuaternion::new(0.5 * r))
}

/// `r ↦ exp(r/2)`, defined for `‖r‖ < 2π`.
pub fn quat_from_rotvec(r: &Vector3) -> Result<UnitQuaternion, AlgebraError> {
    let norm = r.norm();
    if !(norm.is_finite() && norm < TAU) {
        return Err(AlgebraError::OutOfRange { norm });
    }
    Ok(lift(r))
}

/// `r ⊕ s`: compose the lifted rotations and project back.
pub fn rot_oplus(r: &Vector3, s: &Vector3) -> Result<Vector3, AlgebraError> {
    Ok(rotvec_from_quat(
        &(quat_from_rotvec(r)? * quat_from_rotvec(s)?),
    ))
}

/// `x ⊙ y`: compose the lifted poses and project back.
pub fn motion_compose(x: &Motion, y: &Motion) -> Motion {
    Motion::from_auq(&(x.to_auq() * y.to_auq()))
}

/// One row of [`discontinuity_report`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpRow {
    pub delta: f64,
    /// `‖R(q_δ) − R(−1̃)‖` where `q_δ` rotates by `2π − δ` about the axis.
    pub rotvec_jump: f64,
    /// `‖(a ⊕ b_δ) − (a ⊕ b_0)‖` for same-axis `a`, `b` with total angle
    /// `2π − δ` against exactly `2π`.
    pub oplus_jump: f64,
}

/// Rotation by `2π − δ` about `axis`, approaching `−1̃` as `δ → 0`.
pub fn near_minus_one(axis: &Vector3, delta: f64) -> UnitQuaternion {
    qexp(&VectorQuaternion::new(
        axis.normalize() * (PI - 0.5 * delta),
    ))
}

/// Jump of the rotation operator between `q_δ` and its limit `−1̃`.
pub fn rotvec_jump(axis: &Vector3, delta: f64) -> f64 {
    let limit =
        UnitQuaternion::new_unchecked(crate::quaternion::Quaternion::new(-1.0, 0.0, 0.0, 0.0));
    (rotvec_from_quat(&near_minus_one(axis, delta)) - rotvec_from_quat(&limit)).norm()
}

/// Jump of `⊕` when two same-axis rotations sum to `2π − δ` versus `2π`.
pub fn oplus_jump(axis: &Vector3, delta: f64) -> Result<f64, AlgebraError> {
    let l = axis.normalize();
    let r = l * PI;
    let near = rot_oplus(&r, &(l * (PI - delta)))?;
    // b = π·l is inside the domain and makes the total exactly 2π.
    let at = rot_oplus(&r, &(l * PI))?;
    Ok((near - at).norm())
}

/// Evaluates both jump probes for every `δ`.
pub fn discontinuity_report(axis: &Vector3, deltas: &[f64]) -> Result<Vec<JumpRow>, AlgebraError> {
    if !(axis.norm().is_finite() && axis.norm() > 0.0) {
        return Err(AlgebraError::ZeroMagnitude);
    }
    deltas
        .iter()
        .map(|&delta| {
            Ok(JumpRow {
                delta,
                rotvec_jump: rotvec_jump(axis, delta),
                oplus_jump: oplus_jump(axis, delta)?,
            })
        })
        .collect()
}
