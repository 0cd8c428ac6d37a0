//! Pose-error kinematics and proportional control on the AUQ group.
//!
//! For a current pose `x` and a target `x_d` the error is `x_e = x⁻¹ ∘ x_d`.
//! Its evolution is `ẋ_e = ½ (x_e ∘ ξ_e)` where the twist `ξ_e = [w̃_e, v_e]`
//! carries the error angular velocity and the generalized linear rate
//! `v_e = 2 ṫ_e − R(w̃_e)ᵀ t_e`. The proportional law
//! `ξ_e = −2 [0, K_r θ_e, K_t t_e]` with `[0, θ_e] = ln p_e` closes the loop.

use crate::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion};
use crate::error::ControlError;
use crate::quaternion::{qlog, Quaternion, UnitQuaternion};
use crate::Vector3;

/// Distance of `‖θ_e‖` from π below which a sample is flagged as close to
/// the logarithm's branch cut.
pub const BRANCH_MARGIN: f64 = 1e-3;

/// A tangent vector at the identity, `ξ = [w̃, v]` with `w̃ = [0, w]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Twist {
    pub w: Vector3,
    pub v: Vector3,
}

impl Twist {
    pub const fn new(w: Vector3, v: Vector3) -> Self {
        Self { w, v }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The augmented quaternion `[0, w, v]`.
    pub fn embed(&self) -> AugmentedQuaternion {
        AugmentedQuaternion::new(Quaternion::pure(self.w), self.v)
    }
}

/// Diagonal gain matrices `K_r = diag(kr)`, `K_t = diag(kt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    kr: Vector3,
    kt: Vector3,
}

impl Gains {
    pub fn new(kr: Vector3, kt: Vector3) -> Result<Self, ControlError> {
        let ok = |k: &Vector3| k.iter().all(|&c| c.is_finite() && c > 0.0);
        if ok(&kr) && ok(&kt) {
            Ok(Self { kr, kt })
        } else {
            Err(ControlError::InvalidGains)
        }
    }

    pub fn uniform(k: f64) -> Result<Self, ControlError> {
        Self::new(Vector3::repeat(k), Vector3::repeat(k))
    }

    pub fn kr(&self) -> Vector3 {
        self.kr
    }

    pub fn kt(&self) -> Vector3 {
        self.kt
    }

    /// Smallest diagonal entry over both matrices.
    pub fn k_min(&self) -> f64 {
        self.kr.min().min(self.kt.min())
    }
}

/// Weights of `V_e = α ‖θ_e‖² + β ‖t_e‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovWeights {
    alpha: f64,
    beta: f64,
}

impl LyapunovWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, ControlError> {
        if alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0 {
            Ok(Self { alpha, beta })
        } else {
            Err(ControlError::InvalidWeights)
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for LyapunovWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

/// `x_e = x⁻¹ ∘ x_d`.
pub fn error_auq(
    x: &AugmentedUnitQuaternion,
    xd: &AugmentedUnitQuaternion,
) -> AugmentedUnitQuaternion {
    x.inverse().compose(xd)
}

/// The same error written out: `p_e = p* p_d`, `t_e = −R(p_d)ᵀ R(p) t + t_d`.
pub fn error_auq_closed_form(
    x: &AugmentedUnitQuaternion,
    xd: &AugmentedUnitQuaternion,
) -> AugmentedUnitQuaternion {
    let p = x.rotation();
    let pd = xd.rotation();
    let te = -(pd.rot_matrix_t() * p.rot_matrix() * x.translation()) + xd.translation();
    AugmentedUnitQuaternion::new(p.conj() * pd, te)
}

/// Rotation part of the error, `θ_e` with `[0, θ_e] = ln p_e` on the short
/// branch.
pub fn error_rotation_vector(xe: &AugmentedUnitQuaternion) -> Vector3 {
    qlog(&xe.rotation()).v
}

/// Vector part of `w̃_e = w̃_d − p_e* w̃ p_e`.
pub fn error_angular_velocity(pe: &UnitQuaternion, w: &Vector3, wd: &Vector3) -> Vector3 {
    let pe = pe.quaternion();
    let we = Quaternion::pure(*wd) - pe.conj() * Quaternion::pure(*w) * pe;
    we.qv
}

/// Twist reproducing given error rates: `v_e = 2 ṫ_e − R(w̃_e)ᵀ t_e`.
///
/// `R` here is applied to the non-unit vector quaternion `w̃_e`, which scales
/// it by `‖w_e‖²`.
pub fn twist_from_error_rates(
    xe: &AugmentedUnitQuaternion,
    te_dot: &Vector3,
    we: &Vector3,
) -> Twist {
    let r_t = Quaternion::pure(*we).rot_matrix_t();
    Twist::new(*we, 2.0 * te_dot - r_t * xe.translation())
}

/// `ξ_e = −2 [0, K_r θ_e, K_t t_e]`.
pub fn proportional_control(xe: &AugmentedUnitQuaternion, gains: &Gains) -> Twist {
    let theta = error_rotation_vector(xe);
    Twist::new(
        -2.0 * gains.kr.component_mul(&theta),
        -2.0 * gains.kt.component_mul(&xe.translation()),
    )
}

/// `ẋ_e = ½ (x_e ∘ ξ)` as an ambient tangent vector.
pub fn state_derivative(xe: &AugmentedQuaternion, xi: &Twist) -> AugmentedQuaternion {
    xe.compose(&xi.embed()).scale(0.5)
}

/// `V_e = α ‖θ_e‖² + β ‖t_e‖²`.
pub fn lyapunov(xe: &AugmentedUnitQuaternion, weights: &LyapunovWeights) -> f64 {
    weights.alpha * error_rotation_vector(xe).norm_squared()
        + weights.beta * xe.translation().norm_squared()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSample {
    pub time: f64,
    pub xe: AugmentedUnitQuaternion,
    pub theta: Vector3,
    pub v: f64,
    pub we: Vector3,
    /// `|‖p‖ − 1|` removed by the renormalization that produced this sample.
    pub renorm_residual: f64,
    /// `‖θ_e‖` is within [`BRANCH_MARGIN`] of π.
    pub near_branch: bool,
}

impl TraceSample {
    pub fn te(&self) -> Vector3 {
        self.xe.translation()
    }
}

/// Closed-loop trajectory of the pose error.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlTrace {
    pub dt: f64,
    pub samples: Vec<TraceSample>,
}

impl ControlTrace {
    pub fn initial(&self) -> &TraceSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TraceSample {
        self.samples
            .last()
            .expect("trace holds at least the initial sample")
    }

    pub fn max_renorm_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.renorm_residual)
            .fold(0.0, f64::max)
    }

    pub fn any_near_branch(&self) -> bool {
        self.samples.iter().any(|s| s.near_branch)
    }
}

/// Fixed-step closed-loop simulation of the error model under
/// [`proportional_control`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simulation {
    pub gains: Gains,
    pub weights: LyapunovWeights,
    pub dt: f64,
    pub steps: usize,
}

impl Simulation {
    pub fn new(gains: Gains, dt: f64, steps: usize) -> Result<Self, ControlError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ControlError::InvalidStep(dt));
        }
        Ok(Self {
            gains,
            weights: LyapunovWeights::default(),
            dt,
            steps,
        })
    }

    pub fn with_weights(mut self, weights: LyapunovWeights) -> Self {
        self.weights = weights;
        self
    }

    fn closed_loop(&self, x: &AugmentedQuaternion) -> AugmentedQuaternion {
        // The control law only needs the rotation of the stage point.
        let n = x.p.norm();
        let unit =
            AugmentedUnitQuaternion::new(UnitQuaternion::new_unchecked(x.p.scale(1.0 / n)), x.t);
        state_derivative(x, &proportional_control(&unit, &self.gains))
    }

    fn sample(&self, time: f64, xe: AugmentedUnitQuaternion, renorm_residual: f64) -> TraceSample {
        let theta = error_rotation_vector(&xe);
        let we = proportional_control(&xe, &self.gains).w;
        TraceSample {
            time,
            xe,
            theta,
            v: lyapunov(&xe, &self.weights),
            we,
            renorm_residual,
            near_branch: theta.norm() >= std::f64::consts::PI - BRANCH_MARGIN,
        }
    }

    /// Integrates from the error `x0⁻¹ ∘ x_d` with classical RK4 and
    /// renormalizes the quaternion part after every step.
    pub fn run(
        &self,
        x0: &AugmentedUnitQuaternion,
        xd: &AugmentedUnitQuaternion,
    ) -> Result<ControlTrace, ControlError> {
        let h = self.dt;
        let mut xe = error_auq(x0, xd);
        let mut samples = Vec::with_capacity(self.steps + 1);
        samples.push(self.sample(0.0, xe, 0.0));

        for step in 1..=self.steps {
            let x = xe.aq();
            let k1 = self.closed_loop(&x);
            let k2 = self.closed_loop(&(x + k1.scale(0.5 * h)));
            let k3 = self.closed_loop(&(x + k2.scale(0.5 * h)));
            let k4 = self.closed_loop(&(x + k3.scale(h)));
            let next = x + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
            if !next.is_finite() {
                return Err(ControlError::StepDiverged { step });
            }
            let n = next.p.norm();
            let p = UnitQuaternion::normalize(next.p)
                .map_err(|_| ControlError::StepDiverged { step })?;
            xe = AugmentedUnitQuaternion::new(p, next.t);
            samples.push(self.sample(step as f64 * h, xe, (n - 1.0).abs()));
        }
        Ok(ControlTrace { dt: h, samples })
    }
}

/// [`Simulation::run`] with unit Lyapunov weights.
pub fn integrate(
    x0: &AugmentedUnitQuaternion,
    xd: &AugmentedUnitQuaternion,
    gains: &Gains,
    dt: f64,
    steps: usize,
) -> Result<ControlTrace, ControlError> {
    Simulation::new(*gains, dt, steps)?.run(x0, xd)
}
