//! Arithmetic in the indefinite algebra (3, -1) and its real embedding.

use quatlat::quat::*;

fn main() -> quatlat::Result<()> {
    let alg = QuatAlg::disc6();
    println!("ramified at {:?}, discriminant {}", alg.ramified(), alg.d());

    let a = alg.from_ints([1, 2, -1, 3]);
    let b = alg.from_ints([0, 1, 1, 0]);
    let ab = a.mul(&b)?;
    println!("a = {a}, b = {b}, ab = {ab}");
    println!("nrd(a) nrd(b) = {}, nrd(ab) = {}", a.nrd() * b.nrd(), ab.nrd());
    println!("trd(a) = {}, a^-1 = {}", a.trd(), a.inverse()?);

    let m = iota_inf(&a);
    println!("iota(a) = {m:?}, det = {:.6}", mat2_det(&m));

    // an element of norm 1 moves i by a hyperbolic amount
    let u = alg.from_ints([2, 1, 0, 0]);
    let z = UpperHalfPoint::i();
    println!("nrd(2 + I) = {}, u(i, (2 + I) i) = {:.6}", u.nrd(), u_displacement(&z, &iota_inf(&u)));

    let t = box_constant(1.0, &ZBox::default(), &alg);
    println!("box constant for delta = 1 on [-1, 1] x [1/2, 2]: {:.6}", t.t);
    Ok(())
}
