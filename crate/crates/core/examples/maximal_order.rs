//! Saturating the Lipschitz order to a maximal order and checking it.

use quatlat::lattice::*;
use quatlat::linalg::QMat;
use quatlat::quat::QuatAlg;

fn main() -> quatlat::Result<()> {
    let alg = QuatAlg::new(3, -1)?;
    let o = MaximalOrder::default_for(&alg)?;
    println!("basis 1, w, i2, i3:");
    for q in o.basis() {
        println!("  {q}");
    }
    let max = Lattice4::maximal(&o);
    println!("reduced discriminant {}", max.reduced_discriminant()?);

    let lip: QMat = [alg.one(), alg.i(), alg.j(), alg.ij()].iter().map(|q| o.rat_coords(q)).collect::<Result<_, _>>()?;
    let lip = hnf_canonicalize(&lip, &o)?;
    println!("Z + ZI + ZJ + ZIJ: index {}, discriminant {}", lip.level()?, lip.reduced_discriminant()?);
    let sat = saturate_to_maximal(&lip)?;
    println!("saturated: index {}, discriminant {}", sat.level()?, sat.reduced_discriminant()?);
    Ok(())
}
