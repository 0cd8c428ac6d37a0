//! Recover x from pairs with b = x⁻¹ ∘ a ∘ x, clean and noisy.

use auq::generate::{gen_handeye, noisy_handeye, NoiseModel};
use auq::optim::{pose_error, solve, SolverConfig};

fn main() {
    let (problem, truth) = gen_handeye(20, 1);
    let config = SolverConfig::default();

    let clean = solve(&problem, &config, None).unwrap();
    let (rot, tr) = pose_error(&clean.solution[0], &truth);
    println!("truth:     {truth}");
    println!("recovered: {}", clean.solution[0]);
    println!(
        "noise-free: status {}, objective {:.2e}, error {rot:.1e} rad / {tr:.1e}",
        clean.status, clean.objective
    );

    for sigma in [1e-3, 1e-2, 5e-2] {
        let noisy = noisy_handeye(&problem, &NoiseModel::new(sigma, sigma, 2));
        let res = solve(&noisy, &config, None).unwrap();
        let (rot, tr) = pose_error(&res.solution[0], &truth);
        println!(
            "noise {sigma:.0e}: objective {:.2e}, error {rot:.2e} rad / {tr:.2e}",
            res.objective
        );
    }
}
