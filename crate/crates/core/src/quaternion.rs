//! Quaternion arithmetic in scalar-first `[q0, q1, q2, q3]` order.
//!
//! Besides the Hamilton product this module provides the cross-product
//! matrix `T(q)` (with `T(q) p = p × q`), the rotation matrix `R(q)` and its
//! transpose for arbitrary (not necessarily unit) quaternions, and the
//! logarithm / exponential pair on the unit sphere.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::AlgebraError;
use crate::{Matrix3, Vector3, TOLERANCE};

/// Magnitude below which a quaternion is treated as singular.
pub const SINGULAR_MAGNITUDE: f64 = 1e-15;

/// Deviation from unit norm that constructors silently absorb by
/// renormalizing. Anything larger is rejected.
pub const UNIT_DRIFT: f64 = 1e-9;

/// Norm deviation attributable to rounding alone.
const ROUNDOFF: f64 = 4.0 * f64::EPSILON;

/// Vector-part norm below which the logarithm axis is undefined.
const DEGENERATE_AXIS: f64 = 1e-12;

/// A real four-dimensional vector `[q0, qv]` with the Hamilton product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub q0: f64,
    pub qv: Vector3,
}

impl Quaternion {
    pub const fn from_parts(q0: f64, qv: Vector3) -> Self {
        Self { q0, qv }
    }

    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self::from_parts(q0, Vector3::new(q1, q2, q3))
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.q0, self.qv.x, self.qv.y, self.qv.z]
    }

    /// The multiplicative identity `1̃ = [1, 0, 0, 0]`.
    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// The vector quaternion `[0, v]`.
    pub fn pure(v: Vector3) -> Self {
        Self::from_parts(0.0, v)
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.q0, -self.qv)
    }

    pub fn norm_squared(&self) -> f64 {
        self.q0 * self.q0 + self.qv.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.q0 * other.q0 + self.qv.dot(&other.qv)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_parts(a * self.q0, a * self.qv)
    }

    /// `q⁻¹ = q* / |q|²`, defined whenever `|q| > 0`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let n2 = self.norm_squared();
        if n2.sqrt() <= SINGULAR_MAGNITUDE {
            return Err(AlgebraError::ZeroMagnitude);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// A quaternion is a vector quaternion iff `q = -q*`.
    pub fn is_vector(&self, tol: f64) -> bool {
        self.q0.abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.q0.is_finite() && self.qv.iter().all(|c| c.is_finite())
    }

    /// `R(q)ᵀ = 2 q qᵀ + (q0² − qᵀq) I − 2 q0 T(q)ᵀ`.
    ///
    /// No normalization happens here: for a non-unit quaternion the result
    /// is scaled by `|q|²`, and the kinematic model relies on that when the
    /// argument is an angular-velocity vector quaternion.
    pub fn rot_matrix_t(&self) -> Matrix3 {
        let v = &self.qv;
        let q0 = self.q0;
        2.0 * v * v.transpose() + (q0 * q0 - v.norm_squared()) * Matrix3::identity()
            - 2.0 * q0 * cross_matrix(v).transpose()
    }

    /// `R(q)`, the transpose of [`Quaternion::rot_matrix_t`].
    pub fn rot_matrix(&self) -> Matrix3 {
        self.rot_matrix_t().transpose()
    }

    /// `R(q) v`, the vector part of the sandwich `q [0, v] q*`.
    pub fn rotate(&self, v: &Vector3) -> Vector3 {
        self.rot_matrix() * v
    }
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product `[p0 q0 − p·q, p0 q + q0 p + p × q]`.
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::from_parts(
            p.q0 * q.q0 - p.qv.dot(&q.qv),
            p.q0 * q.qv + q.q0 * p.qv + p.qv.cross(&q.qv),
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.q0 + rhs.q0, self.qv + rhs.qv)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.q0 - rhs.q0, self.qv - rhs.qv)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::from_parts(-self.q0, -self.qv)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.to_array();
        write!(f, "[{a}, {b}, {c}, {d}]")
    }
}

/// The cross-product matrix with `T(q) p = p × q = T(p)ᵀ q`.
pub fn cross_matrix(q: &Vector3) -> Matrix3 {
    Matrix3::new(
        0.0, q.z, -q.y, //
        -q.z, 0.0, q.x, //
        q.y, -q.x, 0.0,
    )
}

/// A quaternion with `|q| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self(Quaternion::identity())
    }

    /// Accepts `q` if its norm is within [`UNIT_DRIFT`] of one and
    /// renormalizes it; rejects anything further off the sphere.
    pub fn try_new(q: Quaternion) -> Result<Self, AlgebraError> {
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_DRIFT {
            return Err(AlgebraError::NotUnit { norm: n });
        }
        // Rescaling an already-normalized value would only flip low bits.
        if (n - 1.0).abs() <= ROUNDOFF {
            return Ok(Self(q));
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Projects any non-singular quaternion onto the unit sphere.
    pub fn normalize(q: Quaternion) -> Result<Self, AlgebraError> {
        let n = q.norm();
        if !n.is_finite() || n <= SINGULAR_MAGNITUDE {
            return Err(AlgebraError::ZeroMagnitude);
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Wraps `q` without checking. Callers guarantee unit norm.
    pub const fn new_unchecked(q: Quaternion) -> Self {
        Self(q)
    }

    pub fn from_axis_angle(axis: &Vector3, angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self(Quaternion::from_parts(c, axis.normalize() * s))
    }

    pub fn quaternion(&self) -> Quaternion {
        self.0
    }

    /// The inverse of a unit quaternion is its conjugate.
    pub fn inverse(&self) -> Self {
        Self(self.0.conj())
    }

    pub fn conj(&self) -> Self {
        self.inverse()
    }

    pub fn log(&self) -> VectorQuaternion {
        qlog(self)
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Deref for UnitQuaternion {
    type Target = Quaternion;
    fn deref(&self) -> &Quaternion {
        &self.0
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * rhs.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(q: UnitQuaternion) -> Self {
        q.0
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A quaternion `[0, v]` whose scalar part is identically zero.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct VectorQuaternion {
    pub v: Vector3,
}

impl VectorQuaternion {
    pub const fn new(v: Vector3) -> Self {
        Self { v }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn quaternion(&self) -> Quaternion {
        Quaternion::pure(self.v)
    }

    /// Fails unless the scalar part is within `tol` of zero.
    pub fn try_from_quaternion(q: &Quaternion, tol: f64) -> Result<Self, AlgebraError> {
        if q.is_vector(tol) {
            Ok(Self::new(q.qv))
        } else {
            Err(AlgebraError::NotVector { scalar: q.q0 })
        }
    }
}

/// Logarithm on the unit sphere, `[cos θ, l sin θ] ↦ [0, θ l]`.
///
/// The angle is taken on the short branch `θ = arccos(q0) ∈ [0, π]`, so `q`
/// and `−q` map to logarithms with opposite axes. A vanishing vector part
/// yields the zero vector quaternion.
pub fn qlog(q: &UnitQuaternion) -> VectorQuaternion {
    let n = q.qv.norm();
    if n <= DEGENERATE_AXIS {
        return VectorQuaternion::zero();
    }
    let theta = q.q0.clamp(-1.0, 1.0).acos();
    VectorQuaternion::new(q.qv * (theta / n))
}

/// Exponential `[0, θ l] ↦ [cos θ, l sin θ]`; the zero vector maps to `1̃`.
pub fn qexp(v: &VectorQuaternion) -> UnitQuaternion {
    let theta = v.v.norm();
    if theta == 0.0 {
        return UnitQuaternion::identity();
    }
    let (s, c) = theta.sin_cos();
    let q = Quaternion::from_parts(c, v.v * (s / theta));
    // cos² + sin² can miss one by an ulp or two.
    UnitQuaternion(q.scale(1.0 / q.norm()))
}

/// Uniform sample on the 3-sphere, drawn from `rng`.
pub fn random_unit_from<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        // Rejection only guards against the measure-zero origin.
        if let Ok(u) = UnitQuaternion::normalize(q) {
            return u;
        }
    }
}

/// Deterministic uniform sample on the 3-sphere for a given seed.
pub fn random_unit(seed: u64) -> UnitQuaternion {
    random_unit_from(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `true` when `p` and `q` agree componentwise within [`TOLERANCE`].
pub fn approx_eq(p: &Quaternion, q: &Quaternion) -> bool {
    (p.q0 - q.q0).abs() <= TOLERANCE && (p.qv - q.qv).amax() <= TOLERANCE
}
