//! Hamilton products, rotation matrices, and the log/exp pair.

use auq::quaternion::{qexp, qlog, Quaternion, UnitQuaternion};
use auq::Vector3;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    println!("i j = {}", i * j);
    println!("j i = {}", j * i);

    let q = UnitQuaternion::from_axis_angle(&Vector3::z(), FRAC_PI_2);
    let v = Vector3::new(1.0, 0.0, 0.0);
    println!("q = {q}");
    println!("R(q) ={:.6}", q.rot_matrix());
    println!("R(q) x = {:?}", q.rotate(&v).as_slice());

    let sandwich = q.quaternion() * Quaternion::pure(v) * q.conj().quaternion();
    println!("q x q* = {sandwich}");

    let l = qlog(&q);
    println!("log q = {:?}, exp(log q) = {}", l.v.as_slice(), qexp(&l));

    // R is defined for any quaternion and scales with the squared norm.
    let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
    println!("|p|² = {}, R(p) ={:.6}", p.norm_squared(), p.rot_matrix());
}
