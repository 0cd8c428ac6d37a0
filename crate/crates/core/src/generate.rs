//! Synthetic calibration and pose-graph instances with known ground truth.
//!
//! Measurements are built by inverting the measurement equations, so every
//! noise-free instance has zero residual at its ground truth. Quaternion
//! signs are whatever composition produces; no canonicalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::augmented::{AugmentedUnitQuaternion, SigmaNorm};
use crate::optim::{AuqVector, Edge, HandEyeProblem, HandEyeWorldProblem, PoseGraphProblem};
use crate::quaternion::{qexp, VectorQuaternion};
use crate::Vector3;

/// Half-width of the cube translations are drawn from.
const TRANSLATION_RANGE: f64 = 1.0;

/// Gaussian pose noise: a rotation vector with per-axis standard deviation
/// `rot_sigma` (radians of rotation angle) and additive translation noise
/// with per-axis standard deviation `trans_sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub rot_sigma: f64,
    pub trans_sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(rot_sigma: f64, trans_sigma: f64, seed: u64) -> Self {
        assert!(
            rot_sigma >= 0.0 && trans_sigma >= 0.0,
            "noise standard deviations must be nonnegative"
        );
        Self {
            rot_sigma,
            trans_sigma,
            seed,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn is_zero(&self) -> bool {
        self.rot_sigma == 0.0 && self.trans_sigma == 0.0
    }
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vector3 {
    if sigma == 0.0 {
        return Vector3::zeros();
    }
    let normal = Normal::new(0.0, sigma).expect("finite nonnegative sigma");
    Vector3::from_fn(|_, _| normal.sample(rng))
}

/// Applies one draw of `noise` to `x`, pulling randomness from `rng`.
///
/// The rotation is right-multiplied by `exp(r/2)` for a Gaussian rotation
/// vector `r`, so the added rotation angle is `‖r‖`.
pub fn perturb_with<R: Rng + ?Sized>(
    x: &AugmentedUnitQuaternion,
    rot_sigma: f64,
    trans_sigma: f64,
    rng: &mut R,
) -> AugmentedUnitQuaternion {
    let r = gaussian_vector(rng, rot_sigma);
    let dt = gaussian_vector(rng, trans_sigma);
    let dq = qexp(&VectorQuaternion::new(0.5 * r));
    let p = x.rotation() * dq;
    // Keep the unit invariant exact after the product.
    let p = crate::quaternion::UnitQuaternion::normalize(p.quaternion()).expect("unit product");
    AugmentedUnitQuaternion::new(p, x.translation() + dt)
}

/// [`perturb_with`] seeded from `noise.seed`.
pub fn perturb(x: &AugmentedUnitQuaternion, noise: &NoiseModel) -> AugmentedUnitQuaternion {
    perturb_with(x, noise.rot_sigma, noise.trans_sigma, &mut noise.rng())
}

fn random_pose(rng: &mut ChaCha8Rng) -> AugmentedUnitQuaternion {
    AugmentedUnitQuaternion::random(rng, TRANSLATION_RANGE)
}

/// `m` pairs with `b_i = x⁻¹ ∘ a_i ∘ x`.
pub fn gen_handeye(m: usize, seed: u64) -> (HandEyeProblem, AugmentedUnitQuaternion) {
    assert!(m >= 1, "need at least one measurement pair");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_pose(&mut rng);
    let x_inv = x.inverse();
    let pairs = (0..m)
        .map(|_| {
            let a = random_pose(&mut rng);
            (a, x_inv * a * x)
        })
        .collect();
    (
        HandEyeProblem {
            pairs,
            sigma: SigmaNorm::default(),
        },
        x,
    )
}

/// `m` pairs with `b_i = y⁻¹ ∘ a_i ∘ x`.
pub fn gen_handeye_world(
    m: usize,
    seed: u64,
) -> (
    HandEyeWorldProblem,
    AugmentedUnitQuaternion,
    AugmentedUnitQuaternion,
) {
    assert!(m >= 1, "need at least one measurement pair");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_pose(&mut rng);
    let y = random_pose(&mut rng);
    (handeye_world_from(m, &x, &y, &mut rng), x, y)
}

/// World/hand-eye pairs generated for a given `(x, y)`.
pub fn handeye_world_from(
    m: usize,
    x: &AugmentedUnitQuaternion,
    y: &AugmentedUnitQuaternion,
    rng: &mut ChaCha8Rng,
) -> HandEyeWorldProblem {
    let y_inv = y.inverse();
    let pairs = (0..m)
        .map(|_| {
            let a = random_pose(rng);
            (a, y_inv * a * *x)
        })
        .collect();
    HandEyeWorldProblem {
        pairs,
        sigma: SigmaNorm::default(),
    }
}

/// A chain `0 → 1 → … → n−1` plus `loop_edges` extra random arcs, with
/// exact measurements `y_ij = x_i⁻¹ ∘ x_j` and vertex 0 anchored at the
/// identity.
pub fn gen_posegraph(n: usize, loop_edges: usize, seed: u64) -> (PoseGraphProblem, AuqVector) {
    assert!(n >= 2, "need at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poses = vec![AugmentedUnitQuaternion::identity()];
    poses.extend((1..n).map(|_| random_pose(&mut rng)));

    let mut arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    for _ in 0..loop_edges {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        arcs.push((i, j));
    }
    let edges = arcs
        .into_iter()
        .map(|(i, j)| Edge {
            i,
            j,
            y: poses[i].inverse() * poses[j],
        })
        .collect();
    (
        PoseGraphProblem {
            n,
            edges,
            sigma: SigmaNorm::default(),
            anchor: 0,
        },
        AuqVector::new(poses),
    )
}

/// Perturbs both members of every pair.
pub fn noisy_handeye(problem: &HandEyeProblem, noise: &NoiseModel) -> HandEyeProblem {
    let mut rng = noise.rng();
    let pairs = problem
        .pairs
        .iter()
        .map(|(a, b)| {
            (
                perturb_with(a, noise.rot_sigma, noise.trans_sigma, &mut rng),
                perturb_with(b, noise.rot_sigma, noise.trans_sigma, &mut rng),
            )
        })
        .collect();
    HandEyeProblem {
        pairs,
        sigma: problem.sigma,
    }
}

pub fn noisy_handeye_world(
    problem: &HandEyeWorldProblem,
    noise: &NoiseModel,
) -> HandEyeWorldProblem {
    let mut rng = noise.rng();
    let pairs = problem
        .pairs
        .iter()
        .map(|(a, b)| {
            (
                perturb_with(a, noise.rot_sigma, noise.trans_sigma, &mut rng),
                perturb_with(b, noise.rot_sigma, noise.trans_sigma, &mut rng),
            )
        })
        .collect();
    HandEyeWorldProblem {
        pairs,
        sigma: problem.sigma,
    }
}

/// Perturbs every edge measurement.
pub fn noisy_posegraph(problem: &PoseGraphProblem, noise: &NoiseModel) -> PoseGraphProblem {
    let mut rng = noise.rng();
    let edges = problem
        .edges
        .iter()
        .map(|e| Edge {
            y: perturb_with(&e.y, noise.rot_sigma, noise.trans_sigma, &mut rng),
            ..*e
        })
        .collect();
    PoseGraphProblem {
        edges,
        ..problem.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmented::AugmentedQuaternion;
    use crate::optim::{pose_error, residual_handeye, residual_handeye_world, residual_slam};

    fn is_zero(z: &AugmentedQuaternion) -> bool {
        z.max_abs_diff(&AugmentedQuaternion::zero()) < 1e-12
    }

    #[test]
    fn handeye_construction_identity() {
        for seed in 0..20 {
            let (p, x) = gen_handeye(8, seed);
            assert_eq!(p.pairs.len(), 8);
            assert!(p
                .pairs
                .iter()
                .all(|(a, b)| is_zero(&residual_handeye(&x, a, b))));
        }
        assert_eq!(gen_handeye(5, 7), gen_handeye(5, 7));
        assert_ne!(gen_handeye(5, 7).1, gen_handeye(5, 8).1);
    }

    #[test]
    fn handeye_world_construction_identity() {
        for seed in 0..20 {
            let (p, x, y) = gen_handeye_world(8, seed);
            assert!(p
                .pairs
                .iter()
                .all(|(a, b)| is_zero(&residual_handeye_world(&x, &y, a, b))));
        }
        assert_eq!(gen_handeye_world(3, 1), gen_handeye_world(3, 1));

        let id = AugmentedUnitQuaternion::identity();
        let p = handeye_world_from(5, &id, &id, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(p
            .pairs
            .iter()
            .all(|(a, b)| a.aq().max_abs_diff(&b.aq()) < 1e-15));
    }

    #[test]
    fn posegraph_construction_identity() {
        for seed in 0..20 {
            let (p, x) = gen_posegraph(10, 11, seed);
            assert_eq!(p.edges.len(), 20);
            assert_eq!(x[0], AugmentedUnitQuaternion::identity());
            assert!(p.edges.iter().all(|e| e.i != e.j));
            assert!(p.is_weakly_connected());
            assert!(p
                .edges
                .iter()
                .all(|e| is_zero(&residual_slam(&x[e.i], &x[e.j], &e.y))));
        }
        let (p, x) = gen_posegraph(2, 0, 3);
        assert_eq!(p.edges.len(), 1);
        assert!(p.edges[0].y.aq().max_abs_diff(&x[1].aq()) < 1e-15);
        assert_eq!(gen_posegraph(6, 4, 9), gen_posegraph(6, 4, 9));
    }

    #[test]
    fn zero_noise_is_identity() {
        let x = AugmentedUnitQuaternion::random(&mut ChaCha8Rng::seed_from_u64(1), 1.0);
        assert_eq!(perturb(&x, &NoiseModel::new(0.0, 0.0, 5)), x);
    }

    #[test]
    fn perturbation_statistics() {
        let x = AugmentedUnitQuaternion::random(&mut ChaCha8Rng::seed_from_u64(2), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let (mut rot2, mut tr2) = (0.0, 0.0);
        for _ in 0..n {
            let y = perturb_with(&x, 0.01, 0.02, &mut rng);
            assert!((y.rotation().norm() - 1.0).abs() < 1e-12);
            let (r, t) = pose_error(&y, &x);
            rot2 += r * r;
            tr2 += t * t;
        }
        // E‖r‖² = 3σ², so the RMS angle sits at σ√3.
        let rms_rot = (rot2 / n as f64).sqrt();
        let rms_tr = (tr2 / n as f64).sqrt();
        assert!(
            (rms_rot / (0.01 * 3f64.sqrt()) - 1.0).abs() < 0.03,
            "{rms_rot}"
        );
        assert!(
            (rms_tr / (0.02 * 3f64.sqrt()) - 1.0).abs() < 0.03,
            "{rms_tr}"
        );
    }
}
