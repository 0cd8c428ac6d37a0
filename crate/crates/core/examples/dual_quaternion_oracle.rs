//! The same poses as unit dual quaternions: constraint counts and agreement
//! of the two products.

use auq::augmented::AugmentedUnitQuaternion as Auq;
use auq::dual;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = Auq::random(&mut rng, 1.0);
    let y = Auq::random(&mut rng, 1.0);

    let dx = dual::from_auq(&x);
    println!("x as a dual quaternion: {}", dx.get());
    println!(
        "dual quaternion constraints: |q| = 1 and q q_d* + q_d q* = 0, residual {:.1e}",
        dx.get().constraint_violation()
    );
    println!("augmented unit quaternion constraint: |p| = 1 only");

    let via_dual = dual::to_auq(&dx.mul(&dual::from_auq(&y))).unwrap();
    let direct = x * y;
    println!("x ∘ y directly:          {direct}");
    println!("x ∘ y via dual product:  {via_dual}");
    println!(
        "max difference: {:.1e}",
        direct.aq().max_abs_diff(&via_dual.aq())
    );

    let h = (x * y).to_homogeneous() - x.to_homogeneous() * y.to_homogeneous();
    println!("homogeneous matrix homomorphism error: {:.1e}", h.amax());
}
