//! Counting elements of an Eichler order near a point, certified by the
//! injection into congruence-constrained tuples.

use quatlat::counting::*;
use quatlat::lattice::families::eichler_prime_power;
use quatlat::lattice::MaximalOrder;
use quatlat::quat::*;

fn main() -> quatlat::Result<()> {
    let o = MaximalOrder::disc6();
    let lat = eichler_prime_power(&o, 5, 3)?;
    let w = build_injection(&lat, None)?;
    println!("shape {}, witness {w}", w.shape);

    let t = box_constant_for_basis(1.0, &ZBox::default(), o.alg(), o.basis());
    let z = UpperHalfPoint::new(0.25, 0.9)?;
    for l_max in [10, 50, 125] {
        let q = CountQuery { lat: lat.clone(), z, delta: 1.0, l_max, squares_only: false };
        let r = sweep_counts(&q, &w, &t)?;
        println!("L = {l_max:>3}: {:>5} elements, bound {}, shape term {:.1}", r.total, r.explicit_bound, bound_shape(&r.shape, l_max, false));
    }
    Ok(())
}
