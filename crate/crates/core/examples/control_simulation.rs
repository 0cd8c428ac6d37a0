//! Proportional pose control on the error `x⁻¹ ∘ x_d`, integrated with RK4.
//!
//! Prints the Lyapunov value against the exponential bound
//! `V(0) exp(−2 k_min t)`.

use auq::augmented::AugmentedUnitQuaternion as Auq;
use auq::kinematics::{Gains, Simulation};
use auq::quaternion::UnitQuaternion;
use auq::Vector3;

fn main() {
    let x0 = Auq::identity();
    let xd = Auq::new(
        UnitQuaternion::from_axis_angle(&Vector3::new(1.0, 1.0, 0.0), 2.0),
        Vector3::new(1.0, -0.5, 2.0),
    );
    let gains = Gains::new(Vector3::new(1.0, 1.5, 2.0), Vector3::repeat(1.0)).unwrap();
    let trace = Simulation::new(gains, 1e-3, 8000)
        .unwrap()
        .run(&x0, &xd)
        .unwrap();

    let v0 = trace.initial().v;
    println!("{:>6} {:>14} {:>14} {:>12}", "t", "V", "bound", "|t_e|");
    for s in trace.samples.iter().step_by(1000) {
        let bound = v0 * (-2.0 * gains.k_min() * s.time).exp();
        println!(
            "{:>6.2} {:>14.6e} {:>14.6e} {:>12.6e}",
            s.time,
            s.v,
            bound,
            s.te().norm()
        );
    }
    println!("final error: {}", trace.last().xe);
    println!(
        "largest renormalization: {:.1e}",
        trace.max_renorm_residual()
    );
}
