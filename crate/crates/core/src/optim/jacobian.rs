//! Analytic Jacobians of composition and inversion in ambient coordinates.

use nalgebra::{Matrix3x4, Matrix4, SMatrix};

use crate::augmented::AugmentedQuaternion;
use crate::quaternion::Quaternion;
use crate::{Matrix3, Vector3};

pub type Matrix7 = SMatrix<f64, 7, 7>;

/// `L(p)` with `p q = L(p) q`.
fn left_mul(p: &Quaternion) -> Matrix4<f64> {
    let [p0, p1, p2, p3] = p.to_array();
    Matrix4::new(
        p0, -p1, -p2, -p3, //
        p1, p0, -p3, p2, //
        p2, p3, p0, -p1, //
        p3, -p2, p1, p0,
    )
}

/// `M(q)` with `p q = M(q) p`.
fn right_mul(q: &Quaternion) -> Matrix4<f64> {
    let [q0, q1, q2, q3] = q.to_array();
    Matrix4::new(
        q0, -q1, -q2, -q3, //
        q1, q0, q3, -q2, //
        q2, -q3, q0, q1, //
        q3, q2, -q1, q0,
    )
}

fn skew(t: &Vector3) -> Matrix3 {
    t.cross_matrix()
}

/// `∂(R(q)ᵀ t) / ∂q`, a 3×4 block.
///
/// `R(q)ᵀ t = 2 q⃗ (q⃗·t) + (q0² − |q⃗|²) t − 2 q0 (q⃗ × t)`.
pub fn rot_t_apply_jacobian(q: &Quaternion, t: &Vector3) -> Matrix3x4<f64> {
    let (q0, v) = (q.q0, q.qv);
    let d0 = 2.0 * q0 * t - 2.0 * v.cross(t);
    let dv = 2.0 * (v.dot(t) * Matrix3::identity() + v * t.transpose() - t * v.transpose())
        + 2.0 * q0 * skew(t);
    let mut j = Matrix3x4::zeros();
    j.set_column(0, &d0);
    j.fixed_view_mut::<3, 3>(0, 1).copy_from(&dv);
    j
}

/// `(∂(x∘y)/∂x, ∂(x∘y)/∂y)` for `x ∘ y = [p q, u + R(q)ᵀ t]`.
pub fn compose_jacobians(x: &AugmentedQuaternion, y: &AugmentedQuaternion) -> (Matrix7, Matrix7) {
    let mut jx = Matrix7::zeros();
    jx.fixed_view_mut::<4, 4>(0, 0).copy_from(&right_mul(&y.p));
    jx.fixed_view_mut::<3, 3>(4, 4)
        .copy_from(&y.p.rot_matrix_t());

    let mut jy = Matrix7::zeros();
    jy.fixed_view_mut::<4, 4>(0, 0).copy_from(&left_mul(&x.p));
    jy.fixed_view_mut::<3, 4>(4, 0)
        .copy_from(&rot_t_apply_jacobian(&y.p, &x.t));
    jy.fixed_view_mut::<3, 3>(4, 4)
        .copy_from(&Matrix3::identity());
    (jx, jy)
}

/// Jacobian of [`super::unit_inverse_extension`], `x ↦ [p*, −R(p) t]`.
pub fn inverse_jacobian(x: &AugmentedQuaternion) -> Matrix7 {
    let conj = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0));
    let mut j = Matrix7::zeros();
    j.fixed_view_mut::<4, 4>(0, 0).copy_from(&conj);
    // R(p) t = R(p*)ᵀ t.
    let d = -rot_t_apply_jacobian(&x.p.conj(), &x.t) * conj;
    j.fixed_view_mut::<3, 4>(4, 0).copy_from(&d);
    j.fixed_view_mut::<3, 3>(4, 4)
        .copy_from(&(-x.p.rot_matrix()));
    j
}
