//! Anchored pose-graph optimization from random initial rotations, and the
//! gauge freedom that the anchor removes.

use auq::generate::{gen_posegraph, noisy_posegraph, NoiseModel};
use auq::optim::{max_pose_error, objective, solve, AuqVector, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (problem, truth) = gen_posegraph(10, 10, 5);
    println!(
        "{} vertices, {} edges, anchor {}",
        problem.n,
        problem.edges.len(),
        problem.anchor
    );

    let res = solve(&problem, &SolverConfig::default(), None).unwrap();
    let (rot, tr) = max_pose_error(&res.solution, &truth);
    println!(
        "noise-free: objective {:.2e}, worst pose error {rot:.1e} rad / {tr:.1e}",
        res.objective
    );

    let g = auq::augmented::AugmentedUnitQuaternion::random(&mut ChaCha8Rng::seed_from_u64(9), 1.0);
    let moved = AuqVector::new(truth.0.iter().map(|x| g * *x).collect());
    println!(
        "objective at truth {:.1e}, at g ∘ truth {:.1e}",
        objective(&problem, &truth),
        objective(&problem, &moved)
    );

    let noisy = noisy_posegraph(&problem, &NoiseModel::new(0.02, 0.02, 6));
    let res = solve(&noisy, &SolverConfig::default(), None).unwrap();
    let (rot, tr) = max_pose_error(&res.solution, &truth);
    println!(
        "noise 0.02: objective {:.2e}, worst pose error {rot:.2e} rad / {tr:.2e}",
        res.objective
    );
}
