//! Below the threshold m*, elements of small norm in a deep order commute.

use quatlat::counting::{order_small_norm_check, small_norm_threshold};
use quatlat::lattice::families::{eichler_prime_power, ramified_level_order};
use quatlat::lattice::MaximalOrder;
use quatlat::quat::UpperHalfPoint;

fn main() -> quatlat::Result<()> {
    let o = MaximalOrder::disc6();
    let z = UpperHalfPoint::new(0.1, 1.2)?;
    let orders = [
        ("Z + 3P3", ramified_level_order(&o, 3)?),
        ("Eichler 5^4", eichler_prime_power(&o, 5, 4)?),
        ("Eichler 7^4", eichler_prime_power(&o, 7, 4)?),
    ];
    for (name, ord) in orders {
        let m_star = small_norm_threshold(&ord, &z, 1.0)?;
        let r = order_small_norm_check(&ord, &z, 1.0, u64::MAX, 8)?;
        println!(
            "{name}: m* = {m_star}, counts {:?}, {} pairs and {} triples checked",
            r.per_m, r.pairs_checked, r.triples_checked
        );
    }
    Ok(())
}
