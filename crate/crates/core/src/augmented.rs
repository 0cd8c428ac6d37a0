//! Augmented quaternions `x = [p, t]`: a quaternion part and a translation
//! part, seven reals in the order `p0 p1 p2 p3 t1 t2 t3`.
//!
//! Multiplication is `x ∘ y = [p q, u + R(q)ᵀ t]` for `x = [p, t]`,
//! `y = [q, u]`. When the quaternion part is unit the element is an
//! augmented unit quaternion (AUQ) and represents a rigid motion acting on
//! points by `v ↦ R(p)(v + t)`: first translate, then rotate. Under that
//! action `x ∘ y` is "y followed by x".

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::AlgebraError;
use crate::quaternion::{qlog, random_unit_from, Quaternion, UnitQuaternion, SINGULAR_MAGNITUDE};
use crate::{Matrix4, Vector3};

/// Scalar-slot magnitude beyond which a conjugated AVQ is rejected.
const AVQ_CLOSURE_TOL: f64 = 1e-10;

/// A general augmented quaternion; a seven-dimensional real vector space
/// under componentwise addition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentedQuaternion {
    pub p: Quaternion,
    pub t: Vector3,
}

pub type Aq = AugmentedQuaternion;

impl AugmentedQuaternion {
    pub const fn new(p: Quaternion, t: Vector3) -> Self {
        Self { p, t }
    }

    /// The zero element `0_A`.
    pub fn zero() -> Self {
        Self::new(Quaternion::zero(), Vector3::zeros())
    }

    /// The identity `e = [1̃, 0]`.
    pub fn identity() -> Self {
        Self::new(Quaternion::identity(), Vector3::zeros())
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self::new(
            Quaternion::new(a[0], a[1], a[2], a[3]),
            Vector3::new(a[4], a[5], a[6]),
        )
    }

    pub fn to_array(&self) -> [f64; 7] {
        let [p0, p1, p2, p3] = self.p.to_array();
        [p0, p1, p2, p3, self.t.x, self.t.y, self.t.z]
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.p.scale(a), a * self.t)
    }

    /// `x ∘ y = [p q, u + R(q)ᵀ t]`.
    pub fn compose(&self, y: &Self) -> Self {
        Self::new(self.p * y.p, y.t + y.p.rot_matrix_t() * self.t)
    }

    /// `x⁻¹ = [p⁻¹, −R(p) t / |p|⁴]`, defined iff `|p| > 0`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let n2 = self.p.norm_squared();
        if n2.sqrt() <= SINGULAR_MAGNITUDE {
            return Err(AlgebraError::NotInvertible);
        }
        let p_inv = self.p.conj().scale(1.0 / n2);
        Ok(Self::new(
            p_inv,
            -(self.p.rot_matrix() * self.t) / (n2 * n2),
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.t.iter().all(|c| c.is_finite())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for AugmentedQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Add for AugmentedQuaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.p + rhs.p, self.t + rhs.t)
    }
}

impl Sub for AugmentedQuaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.p - rhs.p, self.t - rhs.t)
    }
}

impl Neg for AugmentedQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.p, -self.t)
    }
}

impl Mul for AugmentedQuaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl fmt::Display for AugmentedQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.to_array();
        write!(
            f,
            "[{}, {}, {}, {}, {}, {}, {}]",
            a[0], a[1], a[2], a[3], a[4], a[5], a[6]
        )
    }
}

/// An augmented quaternion whose quaternion part is unit: a rigid pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentedUnitQuaternion {
    p: UnitQuaternion,
    t: Vector3,
}

pub type Auq = AugmentedUnitQuaternion;

impl AugmentedUnitQuaternion {
    pub const fn new(p: UnitQuaternion, t: Vector3) -> Self {
        Self { p, t }
    }

    pub fn identity() -> Self {
        Self::new(UnitQuaternion::identity(), Vector3::zeros())
    }

    pub fn from_rotation(p: UnitQuaternion) -> Self {
        Self::new(p, Vector3::zeros())
    }

    pub fn from_translation(t: Vector3) -> Self {
        Self::new(UnitQuaternion::identity(), t)
    }

    /// Renormalizes a quaternion part that drifted by less than 1e-9 and
    /// rejects anything further from the sphere.
    pub fn try_from_aq(x: &AugmentedQuaternion) -> Result<Self, AlgebraError> {
        Ok(Self::new(UnitQuaternion::try_new(x.p)?, x.t))
    }

    pub fn try_from_array(a: [f64; 7]) -> Result<Self, AlgebraError> {
        Self::try_from_aq(&AugmentedQuaternion::from_array(a))
    }

    pub fn to_array(&self) -> [f64; 7] {
        self.aq().to_array()
    }

    pub fn rotation(&self) -> UnitQuaternion {
        self.p
    }

    pub fn translation(&self) -> Vector3 {
        self.t
    }

    pub fn aq(&self) -> AugmentedQuaternion {
        AugmentedQuaternion::new(self.p.quaternion(), self.t)
    }

    pub fn compose(&self, y: &Self) -> Self {
        Self::new(self.p * y.p, y.t + y.p.rot_matrix_t() * self.t)
    }

    /// `x⁻¹ = [p*, −R(p) t]`.
    pub fn inverse(&self) -> Self {
        Self::new(self.p.conj(), -self.p.rotate(&self.t))
    }

    /// Rigid action on a point, `v ↦ R(p)(v + t)`.
    pub fn act_on_point(&self, v: &Vector3) -> Vector3 {
        self.p.rotate(&(v + self.t))
    }

    /// The 4×4 homogeneous transform `[R(p), R(p) t; 0, 1]`.
    pub fn to_homogeneous(&self) -> Matrix4 {
        let r = self.p.rot_matrix();
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(r * self.t));
        m
    }

    /// `[cos θ/2, l sin θ/2, t] ↦ [0, (θ/2) l, t/2]`.
    pub fn log(&self) -> AugmentedVectorQuaternion {
        AugmentedVectorQuaternion::new(qlog(&self.p).v, 0.5 * self.t)
    }

    pub fn is_finite(&self) -> bool {
        self.aq().is_finite()
    }

    /// Random pose: uniform rotation, translation uniform in `[-scale, scale]³`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
        let p = random_unit_from(rng);
        let t = Vector3::from_fn(|_, _| rng.random_range(-scale..=scale));
        Self::new(p, t)
    }
}

impl Default for AugmentedUnitQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for AugmentedUnitQuaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl From<AugmentedUnitQuaternion> for AugmentedQuaternion {
    fn from(x: AugmentedUnitQuaternion) -> Self {
        x.aq()
    }
}

impl fmt::Display for AugmentedUnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.aq().fmt(f)
    }
}

/// `[0, r, t]`: an augmented quaternion with zero scalar slot.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct AugmentedVectorQuaternion {
    pub r: Vector3,
    pub t: Vector3,
}

pub type Avq = AugmentedVectorQuaternion;

impl AugmentedVectorQuaternion {
    pub const fn new(r: Vector3, t: Vector3) -> Self {
        Self { r, t }
    }

    pub fn embed(&self) -> AugmentedQuaternion {
        AugmentedQuaternion::new(Quaternion::pure(self.r), self.t)
    }

    pub fn try_from_aq(x: &AugmentedQuaternion, tol: f64) -> Result<Self, AlgebraError> {
        if x.p.q0.abs() > tol {
            return Err(AlgebraError::NotVector { scalar: x.p.q0 });
        }
        Ok(Self::new(x.p.qv, x.t))
    }
}

/// `x ∘ y ∘ x⁻¹` for invertible `x` and an AVQ `y`; the result stays in the
/// AVQ subspace.
pub fn avq_conjugation(
    x: &AugmentedQuaternion,
    y: &AugmentedVectorQuaternion,
) -> Result<AugmentedVectorQuaternion, AlgebraError> {
    let x_inv = x.inverse()?;
    let z = x.compose(&y.embed()).compose(&x_inv);
    AugmentedVectorQuaternion::try_from_aq(&z, AVQ_CLOSURE_TOL)
        .map_err(|_| AlgebraError::AvqClosureViolation { scalar: z.p.q0 })
}

/// Translation weight `σ > 0` of the augmented magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaNorm(f64);

impl SigmaNorm {
    pub fn new(sigma: f64) -> Result<Self, AlgebraError> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(Self(sigma))
        } else {
            Err(AlgebraError::InvalidSigma(sigma))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `|x|² = |p|² + σ |t|²`.
    pub fn magnitude_squared(&self, x: &AugmentedQuaternion) -> f64 {
        x.p.norm_squared() + self.0 * x.t.norm_squared()
    }

    pub fn magnitude(&self, x: &AugmentedQuaternion) -> f64 {
        self.magnitude_squared(x).sqrt()
    }

    /// Norm of an AQ vector, `sqrt(Σ |x_i|²)`.
    pub fn vector_norm(&self, xs: &[AugmentedQuaternion]) -> f64 {
        xs.iter()
            .map(|x| self.magnitude_squared(x))
            .sum::<f64>()
            .sqrt()
    }
}

impl Default for SigmaNorm {
    fn default() -> Self {
        Self(1.0)
    }
}

pub fn sigma_magnitude(x: &AugmentedQuaternion, sigma: SigmaNorm) -> f64 {
    sigma.magnitude(x)
}
