//! Least squares over products of augmented unit quaternions.
//!
//! Every problem is `min ½ ‖z(x)‖²` over `x ∈ AUⁿ`, where `z` stacks
//! augmented-quaternion residuals and `‖·‖` is the σ-weighted magnitude.
//! Objectives and gradients are evaluated in the ambient `7n` coordinates so
//! the only constraints are the `n` unit spheres of the quaternion blocks.

mod jacobian;
mod problems;
mod solver;

pub use jacobian::{compose_jacobians, inverse_jacobian, rot_t_apply_jacobian, Matrix7};
pub use problems::{
    residual_handeye, residual_handeye_world, residual_slam, unit_inverse_extension, Edge,
    HandEyeProblem, HandEyeWorldProblem, PoseGraphProblem, Problem,
};
pub use solver::{solve, RestartRecord, SolveResult, SolveStatus, SolverConfig};

use nalgebra::DVector;

use crate::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion, SigmaNorm};
use crate::error::SolveError;
use crate::quaternion::UNIT_DRIFT;

/// A vector of `n` augmented unit quaternions.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AuqVector(pub Vec<AugmentedUnitQuaternion>);

impl AuqVector {
    pub fn new(entries: Vec<AugmentedUnitQuaternion>) -> Self {
        Self(entries)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![AugmentedUnitQuaternion::identity(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_aq(&self) -> Vec<AugmentedQuaternion> {
        self.0.iter().map(|x| x.aq()).collect()
    }

    /// Reads back ambient blocks, rejecting any that left the sphere.
    pub fn try_from_aq(xs: &[AugmentedQuaternion]) -> Result<Self, SolveError> {
        xs.iter()
            .map(|x| {
                AugmentedUnitQuaternion::try_from_aq(x)
                    .map_err(|e| SolveError::InfeasibleInit(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    /// σ-weighted norm of the stacked vector.
    pub fn norm(&self, sigma: SigmaNorm) -> f64 {
        sigma.vector_norm(&self.as_aq())
    }
}

impl std::ops::Index<usize> for AuqVector {
    type Output = AugmentedUnitQuaternion;
    fn index(&self, i: usize) -> &Self::Output {
        &self.0[i]
    }
}

/// A least-squares problem with augmented-quaternion residuals.
pub trait AuqProblem {
    /// Number of AUQ unknowns `n`.
    fn num_blocks(&self) -> usize;

    /// Number of AQ residuals `m`.
    fn num_residuals(&self) -> usize;

    fn sigma(&self) -> SigmaNorm;

    /// Residual `k` evaluated at ambient (possibly off-sphere) blocks.
    fn residual(&self, k: usize, x: &[AugmentedQuaternion]) -> AugmentedQuaternion;

    /// Nonzero Jacobian blocks `∂z_k / ∂x_b` of residual `k`.
    fn residual_jacobians(&self, k: usize, x: &[AugmentedQuaternion]) -> Vec<(usize, Matrix7)>;

    /// Blocks held fixed by the solver.
    fn fixed_blocks(&self) -> Vec<usize> {
        Vec::new()
    }

    fn validate(&self) -> Result<(), SolveError> {
        Ok(())
    }
}

fn weights(sigma: SigmaNorm) -> [f64; 7] {
    let s = sigma.value();
    [1.0, 1.0, 1.0, 1.0, s, s, s]
}

/// `½ Σ |z_k|²` at ambient coordinates, summed in residual order.
pub fn objective_ambient<P: AuqProblem + ?Sized>(problem: &P, x: &[AugmentedQuaternion]) -> f64 {
    let sigma = problem.sigma();
    0.5 * (0..problem.num_residuals())
        .map(|k| sigma.magnitude_squared(&problem.residual(k, x)))
        .sum::<f64>()
}

pub fn objective<P: AuqProblem + ?Sized>(problem: &P, x: &AuqVector) -> f64 {
    objective_ambient(problem, &x.as_aq())
}

/// Gradient of [`objective_ambient`] in the `7n` ambient coordinates,
/// `Σ_k J_kᵀ W z_k`.
pub fn gradient_ambient<P: AuqProblem + ?Sized>(
    problem: &P,
    x: &[AugmentedQuaternion],
) -> DVector<f64> {
    let w = weights(problem.sigma());
    let mut g = DVector::zeros(7 * problem.num_blocks());
    for k in 0..problem.num_residuals() {
        let z = problem.residual(k, x).to_array();
        let wz = nalgebra::SVector::<f64, 7>::from_fn(|i, _| w[i] * z[i]);
        for (b, jac) in problem.residual_jacobians(k, x) {
            let mut rows = g.fixed_rows_mut::<7>(7 * b);
            rows += jac.transpose() * wz;
        }
    }
    g
}

pub fn gradient<P: AuqProblem + ?Sized>(problem: &P, x: &AuqVector) -> DVector<f64> {
    gradient_ambient(problem, &x.as_aq())
}

/// Removes the radial component of every quaternion block and zeroes the
/// fixed blocks, leaving the Riemannian gradient on the product of spheres.
pub fn project_to_tangent(
    g: &DVector<f64>,
    x: &[AugmentedQuaternion],
    fixed: &[usize],
) -> DVector<f64> {
    let mut out = g.clone();
    for (b, xb) in x.iter().enumerate() {
        let mut block = out.fixed_rows_mut::<7>(7 * b);
        if fixed.contains(&b) {
            block.fill(0.0);
            continue;
        }
        let p = nalgebra::Vector4::from(xb.p.to_array());
        let radial = block.fixed_rows::<4>(0).dot(&p) / p.norm_squared();
        let mut q = block.fixed_rows_mut::<4>(0);
        q -= radial * p;
    }
    out
}

/// Rotation geodesic distance (radians, invariant to quaternion sign) and
/// Euclidean translation distance between two poses.
pub fn pose_error(x: &AugmentedUnitQuaternion, x_true: &AugmentedUnitQuaternion) -> (f64, f64) {
    // 2·atan2(|vec|, |scalar|) of the relative rotation equals
    // 2·arccos(|⟨p, p_true⟩|) but keeps full precision near zero.
    let rel = x_true.rotation().conj() * x.rotation();
    let rot = 2.0 * rel.qv.norm().atan2(rel.q0.abs());
    (rot, (x.translation() - x_true.translation()).norm())
}

/// Worst [`pose_error`] over matching entries.
pub fn max_pose_error(x: &AuqVector, x_true: &AuqVector) -> (f64, f64) {
    x.0.iter()
        .zip(&x_true.0)
        .map(|(a, b)| pose_error(a, b))
        .fold((0.0, 0.0), |(r, t), (a, b)| (r.max(a), t.max(b)))
}

pub(crate) fn check_feasible(x: &AuqVector, n: usize) -> Result<(), SolveError> {
    if x.len() != n {
        return Err(SolveError::InfeasibleInit(format!(
            "expected {n} blocks, got {}",
            x.len()
        )));
    }
    for (i, b) in x.0.iter().enumerate() {
        let norm = b.rotation().norm();
        if !b.is_finite() || (norm - 1.0).abs() > UNIT_DRIFT {
            return Err(SolveError::InfeasibleInit(format!(
                "block {i} has quaternion norm {norm}"
            )));
        }
    }
    Ok(())
}
