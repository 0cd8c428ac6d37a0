//! Composition, inversion and point action of augmented unit quaternions.

use auq::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion as Auq, SigmaNorm};
use auq::quaternion::UnitQuaternion;
use auq::Vector3;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let turn = UnitQuaternion::from_axis_angle(&Vector3::z(), FRAC_PI_2);
    let x = Auq::new(turn, Vector3::new(1.0, 0.0, 0.0));
    let y = Auq::from_translation(Vector3::new(0.0, 2.0, 0.0));

    println!("x = {x}");
    println!("y = {y}");
    println!("x ∘ y = {}", x * y);
    println!("x⁻¹ = {}", x.inverse());
    println!("x ∘ x⁻¹ = {}", x * x.inverse());

    // Translate first, then rotate.
    let v = Vector3::new(0.0, 0.0, 0.0);
    println!("x · 0 = {:?}", x.act_on_point(&v).as_slice());
    println!("homogeneous matrix of x:{:.6}", x.to_homogeneous());

    let decomposed = Auq::from_rotation(turn) * Auq::from_translation(x.translation());
    println!("[p, 0] ∘ [1, t] = {decomposed}");

    let log = x.log();
    println!(
        "log x = [r {:?}, t/2 {:?}]",
        log.r.as_slice(),
        log.t.as_slice()
    );

    // Any nonzero quaternion part is invertible in the general algebra.
    let g = AugmentedQuaternion::from_array([2.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    println!("g⁻¹ = {}", g.inverse().unwrap());

    for sigma in [0.1, 1.0, 10.0] {
        let s = SigmaNorm::new(sigma).unwrap();
        println!("‖x‖ with σ = {sigma}: {:.6}", s.magnitude(&x.aq()));
    }
}
