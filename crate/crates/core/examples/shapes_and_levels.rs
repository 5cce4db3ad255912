//! Levels, shapes and invariant factors of standard orders.

use quatlat::arith::Factored;
use quatlat::lattice::families::*;
use quatlat::lattice::*;

fn main() -> quatlat::Result<()> {
    let o = MaximalOrder::disc6();
    let max = Lattice4::maximal(&o);
    let orders = vec![
        ("O", max.clone()),
        ("Z + 2O", scalar_order(&o, 2)?),
        ("Z + 3O", scalar_order(&o, 3)?),
        ("Z + 2P2", ramified_level_order(&o, 2)?),
        ("Eichler 35", eichler(&o, &Factored::from_u64(35))?),
        ("Eichler 5^3", eichler(&o, &"5^3".parse()?)?),
    ];
    println!("{:<12} {:>6} {:>16} {:>18} {:>6}", "order", "N", "shape", "factors", "disc");
    for (name, l) in orders {
        let s = l.shape()?;
        let f = invariant_factors(&l, &max)?;
        println!(
            "{:<12} {:>6} {:>16} {:>18} {:>6}",
            name,
            l.level()?,
            s.to_string(),
            f.to_string(),
            l.reduced_discriminant()?
        );
    }
    Ok(())
}
