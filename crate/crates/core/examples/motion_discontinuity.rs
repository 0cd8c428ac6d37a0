//! Rotation vectors jump by 2π where the quaternion passes through −1, and
//! so does rotation-vector composition.

use auq::motion::{discontinuity_report, motion_compose, Motion};
use auq::Vector3;

fn main() {
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let rows = discontinuity_report(&Vector3::new(0.0, 0.0, 1.0), &deltas).unwrap();
    println!("{:>8} {:>14} {:>14}", "delta", "rotvec jump", "⊕ jump");
    for r in &rows {
        println!(
            "{:>8.0e} {:>14.9} {:>14.9}",
            r.delta, r.rotvec_jump, r.oplus_jump
        );
    }
    println!("2π = {:.9}", std::f64::consts::TAU);

    let a = Motion::new(Vector3::new(0.0, 0.0, 3.0), Vector3::new(1.0, 0.0, 0.0)).unwrap();
    let b = Motion::new(Vector3::new(0.0, 0.0, 3.0), Vector3::zeros()).unwrap();
    let c = motion_compose(&a, &b);
    println!(
        "(r = 3ẑ) ⊙ (r = 3ẑ): r = {:?}, t = {:?}",
        c.rotation().as_slice(),
        c.translation().as_slice()
    );
}
