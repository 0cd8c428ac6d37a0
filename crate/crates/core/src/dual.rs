//! Dual quaternions, kept to what is needed to cross-check augmented
//! quaternion composition: product, conjugate, the two unit constraints and
//! the conversions to and from augmented unit quaternions.

use std::fmt;
use std::ops::Mul;

use crate::augmented::AugmentedUnitQuaternion;
use crate::error::AlgebraError;
use crate::quaternion::{Quaternion, UnitQuaternion};
use crate::TOLERANCE;

/// Scalar slot allowed in a recovered translation quaternion.
const TRANSLATION_SCALAR_TOL: f64 = 1e-10;

/// `[q; q_d]`: standard part and dual part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualQuaternion {
    pub std: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub const fn new(std: Quaternion, dual: Quaternion) -> Self {
        Self { std, dual }
    }

    pub fn identity() -> Self {
        Self::new(Quaternion::identity(), Quaternion::zero())
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self::new(
            Quaternion::new(a[0], a[1], a[2], a[3]),
            Quaternion::new(a[4], a[5], a[6], a[7]),
        )
    }

    pub fn to_array(&self) -> [f64; 8] {
        let [a, b, c, d] = self.std.to_array();
        let [e, f, g, h] = self.dual.to_array();
        [a, b, c, d, e, f, g, h]
    }

    /// `[p q; p q_d + p_d q]`.
    pub fn product(&self, q: &Self) -> Self {
        Self::new(self.std * q.std, self.std * q.dual + self.dual * q.std)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.std.conj(), self.dual.conj())
    }

    /// `q q_d* + q_d q*`, which vanishes for unit dual quaternions.
    pub fn orthogonality_residual(&self) -> Quaternion {
        self.std * self.dual.conj() + self.dual * self.std.conj()
    }

    /// Largest violation of the spherical and orthogonality constraints.
    pub fn constraint_violation(&self) -> f64 {
        let spherical = (self.std.norm() - 1.0).abs();
        let ortho = self
            .orthogonality_residual()
            .to_array()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        spherical.max(ortho)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for DualQuaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl fmt::Display for DualQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.std, self.dual)
    }
}

/// A dual quaternion satisfying `|q| = 1` and `q q_d* + q_d q* = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDualQuaternion(DualQuaternion);

impl UnitDualQuaternion {
    pub fn try_new(q: DualQuaternion) -> Result<Self, AlgebraError> {
        let residual = q.constraint_violation();
        if residual.is_finite() && residual <= TOLERANCE {
            Ok(Self(q))
        } else {
            Err(AlgebraError::ConstraintViolated { residual })
        }
    }

    pub fn identity() -> Self {
        Self(DualQuaternion::identity())
    }

    pub fn get(&self) -> &DualQuaternion {
        &self.0
    }

    /// `[p; p t̃ / 2]` for `x = [p, t]`.
    pub fn from_auq(x: &AugmentedUnitQuaternion) -> Self {
        let p = x.rotation().quaternion();
        Self(DualQuaternion::new(
            p,
            (p * Quaternion::pure(x.translation())).scale(0.5),
        ))
    }

    /// Recovers `x = [p, t]` from `t̃ = 2 p* p_d`.
    pub fn to_auq(&self) -> Result<AugmentedUnitQuaternion, AlgebraError> {
        let p = UnitQuaternion::try_new(self.0.std)?;
        let t = (p.conj().quaternion() * self.0.dual).scale(2.0);
        if t.q0.abs() > TRANSLATION_SCALAR_TOL {
            return Err(AlgebraError::ConstraintViolated {
                residual: t.q0.abs(),
            });
        }
        Ok(AugmentedUnitQuaternion::new(p, t.qv))
    }

    pub fn mul(&self, other: &Self) -> DualQuaternion {
        self.0.product(&other.0)
    }
}

pub fn from_auq(x: &AugmentedUnitQuaternion) -> UnitDualQuaternion {
    UnitDualQuaternion::from_auq(x)
}

/// Validates the unit constraints on `q` before converting.
pub fn to_auq(q: &DualQuaternion) -> Result<AugmentedUnitQuaternion, AlgebraError> {
    UnitDualQuaternion::try_new(*q)?.to_auq()
}
