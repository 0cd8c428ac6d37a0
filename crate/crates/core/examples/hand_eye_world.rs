//! Simultaneous hand-eye and robot-world calibration, b = y⁻¹ ∘ a ∘ x.

use auq::generate::gen_handeye_world;
use auq::optim::{pose_error, solve, SolverConfig};

fn main() {
    let (problem, x, y) = gen_handeye_world(8, 4);
    let res = solve(&problem, &SolverConfig::default(), None).unwrap();
    println!(
        "status {} after {} iterations, objective {:.2e}",
        res.status, res.iterations, res.objective
    );
    for (name, est, truth) in [("x", &res.solution[0], &x), ("y", &res.solution[1], &y)] {
        let (rot, tr) = pose_error(est, truth);
        println!("{name}: {est}  error {rot:.1e} rad / {tr:.1e}");
    }
    for (k, rec) in res.restarts.iter().enumerate() {
        println!(
            "restart {k}: objective {:.2e}, {} iterations, {}",
            rec.objective, rec.iterations, rec.status
        );
    }
}
